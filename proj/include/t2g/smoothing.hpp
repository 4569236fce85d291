#pragma once

#include <string>
#include <vector>

#include "t2g/errors.hpp"
#include "t2g/preprocess.hpp"

namespace t2g::sg {

enum class EdgeMode {
    mirror,          // extend by reflecting interior samples (no edge repeat)
    polynomial_fit,  // fit the first/last window once, evaluate at edge offsets
};

EdgeMode edge_mode_from_string(const std::string& s);
const char* to_string(EdgeMode mode);

struct SgFilterSpec {
    int window = 7;      // odd, >= 3, <= 51
    int polyorder = 2;   // >= 0, < window
    EdgeMode edge_mode = EdgeMode::mirror;

    int half_window() const { return (window - 1) / 2; }
};

class InvalidSpec : public Error {
public:
    explicit InvalidSpec(const std::string& message) : Error("InvalidSpec", message) {}
};

class SeriesTooShort : public Error {
public:
    SeriesTooShort(std::size_t needed, std::size_t got)
        : Error("SeriesTooShort", "series of length " + std::to_string(got) +
                                      " is shorter than the filter window " +
                                      std::to_string(needed)),
          needed_(needed),
          got_(got) {}

    std::size_t needed() const { return needed_; }
    std::size_t got() const { return got_; }

private:
    std::size_t needed_;
    std::size_t got_;
};

// Central-point least-squares smoothing weights: fit a degree-`polyorder`
// polynomial over window positions -m..m and evaluate the fit at 0. The
// weights sum to 1 and are symmetric. Results are cached per spec; the cache
// is safe under concurrent readers.
std::vector<double> sg_coefficients(const SgFilterSpec& spec);

// Same-length smoothed copy. Interior points are the convolution with
// sg_coefficients; edges follow spec.edge_mode.
std::vector<double> sg_filter(const std::vector<double>& values, const SgFilterSpec& spec);

prep::DailySeries sg_filter_series(const prep::DailySeries& series, const SgFilterSpec& spec);

}  // namespace t2g::sg
