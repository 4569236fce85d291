#include "t2g/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "t2g/rng.hpp"

namespace t2g::gbdt {

void GbdtParams::validate() const {
    if (iterations <= 0)
        throw InvalidParams("iterations must be positive");
    if (!(learning_rate > 0.0 && learning_rate <= 1.0))
        throw InvalidParams("learning_rate must be in (0, 1]");
    if (max_depth < 1 || max_depth > 16)
        throw InvalidParams("max_depth must lie in [1, 16], got " + std::to_string(max_depth));
    if (loss != "rmse")
        throw InvalidParams("unsupported loss '" + loss + "', only rmse is available");
    if (histogram_bins <= 0)
        throw InvalidParams("histogram_bins must be positive");
    if (l2_leaf_reg < 0.0)
        throw InvalidParams("l2_leaf_reg must be non-negative");
    if (cat_prior_weight < 0.0)
        throw InvalidParams("cat_prior_weight must be non-negative");
}

void AlignedDataset::validate() const {
    const std::size_t n = target.size();
    if (numeric.size() != n)
        throw ArityMismatch("numeric rows and targets disagree in length");
    if (!category.empty() && category.size() != n)
        throw ArityMismatch("categorical column and targets disagree in length");
    if (!meta.empty() && meta.size() != n)
        throw ArityMismatch("metadata and targets disagree in length");
    const std::size_t arity = numeric.empty() ? 0 : numeric.front().size();
    for (const auto& row : numeric) {
        if (row.size() != arity)
            throw ArityMismatch("ragged numeric feature rows");
        for (double v : row)
            if (!std::isfinite(v))
                throw InvalidParams("non-finite feature value");
    }
    for (double y : target)
        if (!std::isfinite(y))
            throw InvalidParams("non-finite target value");
}

std::size_t ObliviousTree::leaf_index(const std::vector<double>& features) const {
    std::size_t index = 0;
    for (std::size_t level = 0; level < splits.size(); ++level) {
        const Split& s = splits[level];
        if (features[static_cast<std::size_t>(s.feature)] > s.threshold)
            index |= std::size_t{1} << level;
    }
    return index;
}

double CatStatistics::encode(std::int64_t category) const {
    auto it = stats.find(category);
    const double sum = it == stats.end() ? 0.0 : it->second.first;
    const double count = it == stats.end() ? 0.0 : static_cast<double>(it->second.second);
    return (sum + prior_weight * global_mean) / (count + prior_weight);
}

OrderedEncoding encode_categorical_ordered(const std::vector<std::int64_t>& categories,
                                           const std::vector<double>& targets,
                                           const std::vector<std::size_t>& permutation,
                                           double prior_weight) {
    const std::size_t n = categories.size();
    if (targets.size() != n || permutation.size() != n)
        throw ArityMismatch("categories, targets and permutation must agree in length");

    double global_mean = 0.0;
    for (double y : targets) global_mean += y;
    global_mean = n > 0 ? global_mean / static_cast<double>(n) : 0.0;

    OrderedEncoding out;
    out.frozen.global_mean = global_mean;
    out.frozen.prior_weight = prior_weight;
    out.encoded.assign(n, 0.0);

    std::map<std::int64_t, std::pair<double, std::size_t>> running;
    for (std::size_t pos = 0; pos < n; ++pos) {
        const std::size_t i = permutation[pos];
        auto& [sum, count] = running[categories[i]];
        out.encoded[i] =
            (sum + prior_weight * global_mean) / (static_cast<double>(count) + prior_weight);
        sum += targets[i];
        count += 1;
    }
    out.frozen.stats = std::move(running);
    return out;
}

namespace {

// Candidate thresholds per feature, computed once per training set. With few
// distinct values every midpoint is a candidate; otherwise histogram_bins
// quantile cuts are taken over the distinct sorted values.
std::vector<double> candidate_thresholds(std::vector<double> column, int bins) {
    std::sort(column.begin(), column.end());
    column.erase(std::unique(column.begin(), column.end()), column.end());
    const std::size_t n_unique = column.size();
    if (n_unique < 2) return {};

    std::vector<double> thresholds;
    if (n_unique <= static_cast<std::size_t>(bins)) {
        thresholds.reserve(n_unique - 1);
        for (std::size_t i = 0; i + 1 < n_unique; ++i)
            thresholds.push_back((column[i] + column[i + 1]) / 2.0);
    } else {
        for (int k = 1; k < bins; ++k) {
            const std::size_t idx = static_cast<std::size_t>(
                static_cast<double>(k) * static_cast<double>(n_unique) / bins);
            const std::size_t hi = std::min(std::max<std::size_t>(idx, 1), n_unique - 1);
            const double t = (column[hi - 1] + column[hi]) / 2.0;
            if (thresholds.empty() || t > thresholds.back()) thresholds.push_back(t);
        }
    }
    return thresholds;
}

// bin(x) = number of thresholds strictly below x, so the split at threshold
// index j sends bins 0..j left and j+1.. right, matching `value > threshold`.
inline int bin_of(const std::vector<double>& thresholds, double x) {
    return static_cast<int>(std::lower_bound(thresholds.begin(), thresholds.end(), x) -
                            thresholds.begin());
}

struct BinStat {
    double sum = 0.0;
    double count = 0.0;
};

// Contribution of one leaf to the (negated) regularized squared error:
// with leaf value v = S / (n + l2), the error decreases by S^2 (n + 2 l2)
// / (n + l2)^2, so the split with the largest total wins.
inline double leaf_gain(double sum, double count, double l2) {
    const double denom = count + l2;
    if (denom <= 0.0) return 0.0;
    return sum * sum * (count + 2.0 * l2) / (denom * denom);
}

double rmse_of(const std::vector<double>& residuals) {
    double ss = 0.0;
    for (double r : residuals) ss += r * r;
    return std::sqrt(ss / static_cast<double>(residuals.size()));
}

}  // namespace

double GbdtModel::raw_score(const std::vector<double>& encoded_features) const {
    double score = base_prediction;
    for (const ObliviousTree& tree : trees)
        score += params.learning_rate * tree.leaf_values[tree.leaf_index(encoded_features)];
    return score;
}

GbdtModel fit(const AlignedDataset& dataset, const GbdtParams& params, FitTrace* trace) {
    params.validate();
    dataset.validate();
    const std::size_t n = dataset.size();
    if (n == 0)
        throw EmptyDataset("cannot fit on an empty dataset");

    const std::size_t numeric_arity = dataset.numeric.empty() ? 0 : dataset.numeric.front().size();

    GbdtModel model;
    model.params = params;

    // 1. Min-max normalization, fitted on this (training) data.
    model.feature_norm.assign(numeric_arity, MinMax{});
    for (std::size_t f = 0; f < numeric_arity; ++f) {
        MinMax& mm = model.feature_norm[f];
        mm.min = mm.max = dataset.numeric.front()[f];
        for (const auto& row : dataset.numeric) {
            mm.min = std::min(mm.min, row[f]);
            mm.max = std::max(mm.max, row[f]);
        }
        if (!params.normalize) mm = MinMax{0.0, 1.0};  // identity
    }
    model.target_norm.min = *std::min_element(dataset.target.begin(), dataset.target.end());
    model.target_norm.max = *std::max_element(dataset.target.begin(), dataset.target.end());
    if (!params.normalize) model.target_norm = MinMax{0.0, 1.0};

    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = model.target_norm.normalize(dataset.target[i]);

    // 2. Ordered target-statistic encoding of the categorical column.
    const std::size_t total_features = numeric_arity + (dataset.has_categorical() ? 1 : 0);
    std::vector<std::vector<double>> columns(total_features, std::vector<double>(n));
    for (std::size_t f = 0; f < numeric_arity; ++f)
        for (std::size_t i = 0; i < n; ++i)
            columns[f][i] = model.feature_norm[f].normalize(dataset.numeric[i][f]);

    if (dataset.has_categorical()) {
        std::vector<std::size_t> permutation = random_permutation(n, params.seed);
        OrderedEncoding enc = encode_categorical_ordered(dataset.category, y, permutation,
                                                         params.cat_prior_weight);
        columns[numeric_arity] = enc.encoded;
        model.cat = std::move(enc.frozen);
        if (trace) {
            trace->permutation = std::move(permutation);
            trace->training_encoding = columns[numeric_arity];
        }
    }

    // 3. Base prediction: normalized-target mean.
    model.base_prediction = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);

    // 4. Boosting. Residuals are the negative rmse-loss gradient.
    std::vector<double> residuals(n);
    for (std::size_t i = 0; i < n; ++i) residuals[i] = y[i] - model.base_prediction;

    std::vector<std::vector<double>> thresholds(total_features);
    std::vector<std::vector<int>> bins(total_features);
    bool any_candidates = false;
    for (std::size_t f = 0; f < total_features; ++f) {
        thresholds[f] = candidate_thresholds(columns[f], params.histogram_bins);
        bins[f].resize(n);
        for (std::size_t i = 0; i < n; ++i) bins[f][i] = bin_of(thresholds[f], columns[f][i]);
        if (!thresholds[f].empty()) any_candidates = true;
    }

    std::vector<std::size_t> leaf_of(n, 0);
    for (int iter = 0; iter < params.iterations; ++iter) {
        double residual_ss = 0.0;
        for (double r : residuals) residual_ss += r * r;
        if (residual_ss <= 1e-28 * static_cast<double>(n) || !any_candidates)
            break;  // nothing left to learn

        ObliviousTree tree;
        std::fill(leaf_of.begin(), leaf_of.end(), 0);
        std::size_t n_leaves = 1;

        for (int level = 0; level < params.max_depth; ++level) {
            int best_feature = -1;
            int best_threshold_idx = -1;
            double best_gain = -1.0;

            for (std::size_t f = 0; f < total_features; ++f) {
                if (thresholds[f].empty()) continue;
                const std::size_t n_bins = thresholds[f].size() + 1;

                // One pass: per-(leaf, bin) residual sums and counts.
                std::vector<BinStat> hist(n_leaves * n_bins);
                for (std::size_t i = 0; i < n; ++i) {
                    BinStat& b = hist[leaf_of[i] * n_bins + static_cast<std::size_t>(bins[f][i])];
                    b.sum += residuals[i];
                    b.count += 1.0;
                }
                std::vector<BinStat> totals(n_leaves);
                for (std::size_t leaf = 0; leaf < n_leaves; ++leaf)
                    for (std::size_t b = 0; b < n_bins; ++b) {
                        totals[leaf].sum += hist[leaf * n_bins + b].sum;
                        totals[leaf].count += hist[leaf * n_bins + b].count;
                    }

                // Sweep thresholds left to right with running prefix stats.
                std::vector<BinStat> left(n_leaves);
                for (std::size_t j = 0; j + 1 < n_bins; ++j) {
                    double gain = 0.0;
                    for (std::size_t leaf = 0; leaf < n_leaves; ++leaf) {
                        BinStat& l = left[leaf];
                        const BinStat& cell = hist[leaf * n_bins + j];
                        l.sum += cell.sum;
                        l.count += cell.count;
                        gain += leaf_gain(l.sum, l.count, params.l2_leaf_reg);
                        gain += leaf_gain(totals[leaf].sum - l.sum, totals[leaf].count - l.count,
                                          params.l2_leaf_reg);
                    }
                    // strict improvement keeps the tie-break at lowest
                    // feature index, then lowest threshold
                    if (gain > best_gain) {
                        best_gain = gain;
                        best_feature = static_cast<int>(f);
                        best_threshold_idx = static_cast<int>(j);
                    }
                }
            }

            if (best_feature < 0) break;  // no splittable feature at all

            const double threshold =
                thresholds[static_cast<std::size_t>(best_feature)]
                          [static_cast<std::size_t>(best_threshold_idx)];
            tree.splits.push_back({best_feature, threshold});
            const auto& fbins = bins[static_cast<std::size_t>(best_feature)];
            for (std::size_t i = 0; i < n; ++i)
                if (fbins[i] > best_threshold_idx) leaf_of[i] |= std::size_t{1} << level;
            n_leaves <<= 1;
        }

        if (tree.splits.empty()) break;

        // Leaf values: regularized residual means.
        std::vector<BinStat> leaf_stats(n_leaves);
        for (std::size_t i = 0; i < n; ++i) {
            leaf_stats[leaf_of[i]].sum += residuals[i];
            leaf_stats[leaf_of[i]].count += 1.0;
        }
        tree.leaf_values.assign(n_leaves, 0.0);
        for (std::size_t leaf = 0; leaf < n_leaves; ++leaf) {
            const double denom = leaf_stats[leaf].count + params.l2_leaf_reg;
            if (denom > 0.0 && leaf_stats[leaf].count > 0.0)
                tree.leaf_values[leaf] = leaf_stats[leaf].sum / denom;
        }

        for (std::size_t i = 0; i < n; ++i)
            residuals[i] -= params.learning_rate * tree.leaf_values[leaf_of[i]];
        model.trees.push_back(std::move(tree));

        if (trace) trace->train_rmse.push_back(rmse_of(residuals));
    }

    return model;
}

double predict(const GbdtModel& model, const std::vector<double>& numeric,
               std::optional<std::int64_t> category) {
    if (numeric.size() != model.numeric_arity())
        throw ArityMismatch("expected " + std::to_string(model.numeric_arity()) +
                            " numeric features, got " + std::to_string(numeric.size()));
    if (model.cat.has_value() != category.has_value())
        throw ArityMismatch(model.cat ? "model was trained with a categorical feature"
                                      : "model was trained without a categorical feature");

    std::vector<double> encoded(model.numeric_arity() + (model.cat ? 1 : 0));
    for (std::size_t f = 0; f < model.numeric_arity(); ++f)
        encoded[f] = model.feature_norm[f].normalize(numeric[f]);
    if (model.cat) encoded[model.numeric_arity()] = model.cat->encode(*category);

    return model.target_norm.denormalize(model.raw_score(encoded));
}

// ---------------------------------------------------------------------------
// Serialization: canonical JSON (nlohmann orders keys lexicographically and
// prints shortest round-trip doubles, so identical models give identical
// bytes).

namespace {

constexpr const char* kFormatTag = "t2g-gbdt";
constexpr int kFormatVersion = 1;

using json = nlohmann::json;

json params_to_json(const GbdtParams& p) {
    return json{{"iterations", p.iterations},
                {"learning_rate", p.learning_rate},
                {"max_depth", p.max_depth},
                {"loss", p.loss},
                {"histogram_bins", p.histogram_bins},
                {"seed", p.seed},
                {"l2_leaf_reg", p.l2_leaf_reg},
                {"cat_prior_weight", p.cat_prior_weight},
                {"normalize", p.normalize}};
}

GbdtParams params_from_json(const json& j) {
    GbdtParams p;
    p.iterations = j.at("iterations").get<int>();
    p.learning_rate = j.at("learning_rate").get<double>();
    p.max_depth = j.at("max_depth").get<int>();
    p.loss = j.at("loss").get<std::string>();
    p.histogram_bins = j.at("histogram_bins").get<int>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.l2_leaf_reg = j.at("l2_leaf_reg").get<double>();
    p.cat_prior_weight = j.at("cat_prior_weight").get<double>();
    p.normalize = j.at("normalize").get<bool>();
    return p;
}

}  // namespace

std::string serialize_model(const GbdtModel& model) {
    json j;
    j["format"] = kFormatTag;
    j["version"] = kFormatVersion;
    j["params"] = params_to_json(model.params);
    j["base_prediction"] = model.base_prediction;

    json norm;
    norm["target"] = {model.target_norm.min, model.target_norm.max};
    json feats = json::array();
    for (const MinMax& mm : model.feature_norm) feats.push_back({mm.min, mm.max});
    norm["features"] = feats;
    j["norm"] = norm;

    if (model.cat) {
        json cat;
        cat["global_mean"] = model.cat->global_mean;
        cat["prior_weight"] = model.cat->prior_weight;
        json stats = json::array();
        for (const auto& [category, sc] : model.cat->stats)
            stats.push_back({category, sc.first, sc.second});
        cat["stats"] = stats;
        j["cat"] = cat;
    }

    json trees = json::array();
    for (const ObliviousTree& tree : model.trees) {
        json t;
        json splits = json::array();
        for (const auto& s : tree.splits) splits.push_back({s.feature, s.threshold});
        t["splits"] = splits;
        t["leaves"] = tree.leaf_values;
        trees.push_back(t);
    }
    j["trees"] = trees;

    if (!model.extra.empty()) j["extra"] = model.extra;

    return j.dump(2) + "\n";
}

GbdtModel deserialize_model(const std::string& bytes) {
    json j;
    try {
        j = json::parse(bytes);
    } catch (const json::exception& e) {
        throw FormatVersionMismatch(std::string("not a model file: ") + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != kFormatTag)
            throw FormatVersionMismatch("unknown format tag");
        if (j.at("version").get<int>() != kFormatVersion)
            throw FormatVersionMismatch("unsupported model format version " +
                                        j.at("version").dump());

        GbdtModel model;
        model.params = params_from_json(j.at("params"));
        model.base_prediction = j.at("base_prediction").get<double>();

        const json& norm = j.at("norm");
        model.target_norm = {norm.at("target").at(0).get<double>(),
                             norm.at("target").at(1).get<double>()};
        for (const json& f : norm.at("features"))
            model.feature_norm.push_back({f.at(0).get<double>(), f.at(1).get<double>()});

        if (j.contains("cat")) {
            CatStatistics cat;
            cat.global_mean = j["cat"].at("global_mean").get<double>();
            cat.prior_weight = j["cat"].at("prior_weight").get<double>();
            for (const json& row : j["cat"].at("stats"))
                cat.stats[row.at(0).get<std::int64_t>()] = {row.at(1).get<double>(),
                                                            row.at(2).get<std::size_t>()};
            model.cat = std::move(cat);
        }

        const int total_features =
            static_cast<int>(model.feature_norm.size()) + (model.cat ? 1 : 0);
        for (const json& t : j.at("trees")) {
            ObliviousTree tree;
            for (const json& s : t.at("splits")) {
                ObliviousTree::Split split{s.at(0).get<int>(), s.at(1).get<double>()};
                if (split.feature < 0 || split.feature >= total_features)
                    throw FormatVersionMismatch("split references feature " +
                                                std::to_string(split.feature));
                tree.splits.push_back(split);
            }
            tree.leaf_values = t.at("leaves").get<std::vector<double>>();
            if (tree.leaf_values.size() != std::size_t{1} << tree.splits.size())
                throw FormatVersionMismatch("leaf count does not match tree depth");
            model.trees.push_back(std::move(tree));
        }

        if (j.contains("extra"))
            model.extra = j["extra"].get<std::map<std::string, std::string>>();

        return model;
    } catch (const json::exception& e) {
        throw FormatVersionMismatch(std::string("malformed model file: ") + e.what());
    }
}

void save_model(const GbdtModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write file '" + path.string() + "'");
    out << serialize_model(model);
    if (!out)
        throw IoError("write failed for '" + path.string() + "'");
}

GbdtModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open file '" + path.string() + "'");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_model(bytes);
}

}  // namespace t2g::gbdt
