#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "t2g/date.hpp"
#include "t2g/errors.hpp"

namespace t2g::gbdt {

struct GbdtParams {
    int iterations = 300;
    double learning_rate = 0.1;
    int max_depth = 6;          // hard cap 16
    std::string loss = "rmse";  // the only loss this artifact supports
    int histogram_bins = 32;
    std::uint64_t seed = 0;
    double l2_leaf_reg = 1.0;
    double cat_prior_weight = 1.0;
    bool normalize = true;  // min-max scale features and target to [0,1]

    void validate() const;
};

// Every node at a given level tests the same (feature, threshold): a sample's
// leaf index is the bit vector of its split outcomes, level 0 in the least
// significant bit, bit = 1 iff feature value > threshold.
struct ObliviousTree {
    struct Split {
        int feature = 0;
        double threshold = 0.0;
    };
    std::vector<Split> splits;        // one per level
    std::vector<double> leaf_values;  // 2^depth entries

    int depth() const { return static_cast<int>(splits.size()); }
    std::size_t leaf_index(const std::vector<double>& features) const;
};

// Per-category target statistics frozen at the end of training, plus the
// global prior used for unseen categories.
struct CatStatistics {
    double global_mean = 0.0;   // full-training-set mean of (normalized) targets
    double prior_weight = 1.0;
    std::map<std::int64_t, std::pair<double, std::size_t>> stats;  // category -> (sum, count)

    double encode(std::int64_t category) const;
};

struct MinMax {
    double min = 0.0;
    double max = 0.0;

    // Zero-variance columns map to 0 so they become uninformative.
    double normalize(double v) const { return max > min ? (v - min) / (max - min) : 0.0; }
    double denormalize(double v) const { return v * (max - min) + min; }
};

struct SampleMeta {
    std::int64_t station_code = 0;
    Date date;
};

// Model-facing dataset: numeric feature rows, an optional categorical column,
// targets, and per-sample metadata for reporting.
struct AlignedDataset {
    std::vector<std::vector<double>> numeric;  // [n][arity]
    std::vector<std::int64_t> category;        // size n, or empty for none
    std::vector<double> target;                // size n
    std::vector<SampleMeta> meta;              // size n, or empty

    std::size_t size() const { return target.size(); }
    bool has_categorical() const { return !category.empty(); }
    void validate() const;
};

struct GbdtModel {
    GbdtParams params;
    double base_prediction = 0.0;  // normalized-space training target mean
    std::vector<ObliviousTree> trees;
    std::optional<CatStatistics> cat;  // present iff trained with a categorical
    std::vector<MinMax> feature_norm;  // one per numeric feature
    MinMax target_norm;
    std::map<std::string, std::string> extra;  // pipeline annotations, round-tripped verbatim

    std::size_t numeric_arity() const { return feature_norm.size(); }

    // Normalized-space ensemble output for an already encoded+normalized row.
    double raw_score(const std::vector<double>& encoded_features) const;
};

class InvalidParams : public Error {
public:
    explicit InvalidParams(const std::string& message) : Error("InvalidParams", message) {}
};

class EmptyDataset : public Error {
public:
    explicit EmptyDataset(const std::string& message) : Error("EmptyDataset", message) {}
};

class ArityMismatch : public Error {
public:
    explicit ArityMismatch(const std::string& message) : Error("ArityMismatch", message) {}
};

class FormatVersionMismatch : public Error {
public:
    explicit FormatVersionMismatch(const std::string& message)
        : Error("FormatVersionMismatch", message) {}
};

// Ordered target-statistic encoding. Sample i's encoding uses only samples
// strictly before it in `permutation`:
//   enc(i) = (sum_prior_same_category + prior_weight * global_mean)
//          / (count_prior + prior_weight)
// with global_mean the mean of all `targets`. Returns the per-sample encoded
// column and the frozen full-set statistics for inference.
struct OrderedEncoding {
    std::vector<double> encoded;  // in sample order (not permutation order)
    CatStatistics frozen;
};

OrderedEncoding encode_categorical_ordered(const std::vector<std::int64_t>& categories,
                                           const std::vector<double>& targets,
                                           const std::vector<std::size_t>& permutation,
                                           double prior_weight);

// Optional training introspection; fit fills it when given.
struct FitTrace {
    std::vector<double> train_rmse;          // normalized space, after each tree
    std::vector<std::size_t> permutation;    // encoding order (empty without categorical)
    std::vector<double> training_encoding;   // ordered-statistics column used in training
};

GbdtModel fit(const AlignedDataset& dataset, const GbdtParams& params, FitTrace* trace = nullptr);

// Denormalized prediction for one sample given as (numeric features, category).
double predict(const GbdtModel& model, const std::vector<double>& numeric,
               std::optional<std::int64_t> category = std::nullopt);

void save_model(const GbdtModel& model, const std::filesystem::path& path);
GbdtModel load_model(const std::filesystem::path& path);

std::string serialize_model(const GbdtModel& model);   // canonical bytes
GbdtModel deserialize_model(const std::string& bytes);

}  // namespace t2g::gbdt
