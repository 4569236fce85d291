#include "t2g/smoothing.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <tuple>

namespace t2g::sg {

namespace {

constexpr int kMaxWindow = 51;  // keeps the normal equations well-conditioned

void validate(const SgFilterSpec& spec) {
    if (spec.window < 3 || spec.window % 2 == 0)
        throw InvalidSpec("window must be an odd integer >= 3, got " +
                          std::to_string(spec.window));
    if (spec.window > kMaxWindow)
        throw InvalidSpec("window capped at " + std::to_string(kMaxWindow));
    if (spec.polyorder < 0 || spec.polyorder >= spec.window)
        throw InvalidSpec("polyorder must satisfy 0 <= polyorder < window");
}

// Solves A x = b in place by Gaussian elimination with partial pivoting.
std::vector<double> solve_linear(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        if (a[pivot][col] == 0.0)
            throw InvalidSpec("singular normal equations");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t ri = n; ri-- > 0;) {
        double acc = b[ri];
        for (std::size_t c = ri + 1; c < n; ++c) acc -= a[ri][c] * x[c];
        x[ri] = acc / a[ri][ri];
    }
    return x;
}

// Least-squares polynomial coefficients for samples y at positions
// offset..offset+n-1 (degree `order`). Returns c0..c_order.
std::vector<double> fit_polynomial(const double* y, int n, int offset, int order) {
    const int terms = order + 1;
    std::vector<std::vector<double>> gram(terms, std::vector<double>(terms, 0.0));
    std::vector<double> rhs(terms, 0.0);
    for (int i = 0; i < n; ++i) {
        const double x = offset + i;
        double pow_j = 1.0;
        std::vector<double> powers(static_cast<std::size_t>(terms));
        for (int j = 0; j < terms; ++j) {
            powers[j] = pow_j;
            pow_j *= x;
        }
        for (int j = 0; j < terms; ++j) {
            rhs[j] += powers[j] * y[i];
            for (int k = 0; k < terms; ++k) gram[j][k] += powers[j] * powers[k];
        }
    }
    return solve_linear(std::move(gram), std::move(rhs));
}

double eval_polynomial(const std::vector<double>& coeffs, double x) {
    double acc = 0.0;
    for (std::size_t j = coeffs.size(); j-- > 0;) acc = acc * x + coeffs[j];
    return acc;
}

std::vector<double> compute_coefficients(const SgFilterSpec& spec) {
    const int m = spec.half_window();
    const int terms = spec.polyorder + 1;

    // Gram matrix G[j][k] = sum_i i^(j+k) over i = -m..m.
    std::vector<std::vector<double>> gram(terms, std::vector<double>(terms, 0.0));
    for (int i = -m; i <= m; ++i) {
        std::vector<double> powers(static_cast<std::size_t>(terms));
        double p = 1.0;
        for (int j = 0; j < terms; ++j) {
            powers[j] = p;
            p *= i;
        }
        for (int j = 0; j < terms; ++j)
            for (int k = 0; k < terms; ++k) gram[j][k] += powers[j] * powers[k];
    }

    // The smoothed value at position 0 is c0 of the fitted polynomial, and
    // c = G^-1 A^T y, so the weight of sample i is (G^-1)[0] . (1, i, i^2, ...).
    std::vector<double> e0(static_cast<std::size_t>(terms), 0.0);
    e0[0] = 1.0;
    std::vector<double> g_inv_row0 = solve_linear(std::move(gram), std::move(e0));

    std::vector<double> weights(static_cast<std::size_t>(spec.window), 0.0);
    for (int i = -m; i <= m; ++i) {
        double acc = 0.0;
        double p = 1.0;
        for (int j = 0; j < terms; ++j) {
            acc += g_inv_row0[j] * p;
            p *= i;
        }
        weights[static_cast<std::size_t>(i + m)] = acc;
    }
    return weights;
}

std::shared_mutex cache_mutex;
std::map<std::pair<int, int>, std::vector<double>> coefficient_cache;

}  // namespace

EdgeMode edge_mode_from_string(const std::string& s) {
    if (s == "mirror") return EdgeMode::mirror;
    if (s == "polynomial_fit") return EdgeMode::polynomial_fit;
    throw InvalidSpec("unknown edge mode '" + s + "'");
}

const char* to_string(EdgeMode mode) {
    return mode == EdgeMode::mirror ? "mirror" : "polynomial_fit";
}

std::vector<double> sg_coefficients(const SgFilterSpec& spec) {
    validate(spec);
    const auto key = std::make_pair(spec.window, spec.polyorder);
    {
        std::shared_lock lock(cache_mutex);
        auto it = coefficient_cache.find(key);
        if (it != coefficient_cache.end()) return it->second;
    }
    std::vector<double> weights = compute_coefficients(spec);
    std::unique_lock lock(cache_mutex);
    return coefficient_cache.emplace(key, std::move(weights)).first->second;
}

std::vector<double> sg_filter(const std::vector<double>& values, const SgFilterSpec& spec) {
    const std::vector<double> w = sg_coefficients(spec);
    const int m = spec.half_window();
    const std::size_t n = values.size();
    if (n < static_cast<std::size_t>(spec.window))
        throw SeriesTooShort(static_cast<std::size_t>(spec.window), n);
    for (double v : values)
        if (!std::isfinite(v))
            throw InvalidSpec("sg_filter input must be finite");

    std::vector<double> out(n, 0.0);

    // Interior: plain convolution.
    for (std::size_t i = static_cast<std::size_t>(m); i + static_cast<std::size_t>(m) < n; ++i) {
        double acc = 0.0;
        for (int j = -m; j <= m; ++j)
            acc += w[static_cast<std::size_t>(j + m)] * values[i + static_cast<std::size_t>(j)];
        out[i] = acc;
    }

    if (spec.edge_mode == EdgeMode::mirror) {
        // index -k maps to k, index n-1+k maps to n-1-k (no edge repeat)
        auto mirrored = [&](std::ptrdiff_t idx) {
            if (idx < 0) idx = -idx;
            const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(n) - 1;
            if (idx > last) idx = 2 * last - idx;
            return values[static_cast<std::size_t>(idx)];
        };
        for (int i = 0; i < m; ++i) {
            double head = 0.0, tail = 0.0;
            for (int j = -m; j <= m; ++j) {
                head += w[static_cast<std::size_t>(j + m)] * mirrored(i + j);
                tail += w[static_cast<std::size_t>(j + m)] *
                        mirrored(static_cast<std::ptrdiff_t>(n) - 1 - i + j);
            }
            out[static_cast<std::size_t>(i)] = head;
            out[n - 1 - static_cast<std::size_t>(i)] = tail;
        }
    } else {
        const auto head_fit = fit_polynomial(values.data(), spec.window, -m, spec.polyorder);
        const auto tail_fit = fit_polynomial(values.data() + (n - static_cast<std::size_t>(spec.window)),
                                             spec.window, -m, spec.polyorder);
        for (int i = 0; i < m; ++i) {
            out[static_cast<std::size_t>(i)] = eval_polynomial(head_fit, i - m);
            out[n - 1 - static_cast<std::size_t>(i)] = eval_polynomial(tail_fit, m - i);
        }
    }
    return out;
}

prep::DailySeries sg_filter_series(const prep::DailySeries& series, const SgFilterSpec& spec) {
    std::vector<double> values;
    values.reserve(series.points.size());
    for (const auto& [date, v] : series.points) values.push_back(v);

    std::vector<double> smoothed = sg_filter(values, spec);

    prep::DailySeries out = series;
    out.smoothed = true;
    for (std::size_t i = 0; i < smoothed.size(); ++i) out.points[i].second = smoothed[i];
    return out;
}

}  // namespace t2g::sg
