#pragma once

#include <cstdint>
#include <vector>

namespace t2g {

// SplitMix64 (Steele, Lea, Flood 2014; Vigna's reference constants).
// Every seeded operation in this project draws from this generator so that
// splits, permutations and fixtures reproduce bit-exactly on any platform
// or reimplementation. Constants:
//   increment  0x9E3779B97F4A7C15
//   mix 1      0xBF58476D1CE4E5B9  (after z ^= z >> 30)
//   mix 2      0x94D049BB133111EB  (after z ^= z >> 27)
//   final      z ^= z >> 31
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Uniform in [0, n). n must be > 0. Uses plain modulo; the bias is
    // irrelevant at our sizes and the mapping is part of the documented
    // reproducibility contract.
    std::uint64_t next_below(std::uint64_t n) { return next() % n; }

private:
    std::uint64_t state_;
};

// Fisher-Yates: for i = n-1 down to 1, swap a[i] with a[next_below(i+1)].
template <typename T>
void shuffle(std::vector<T>& items, SplitMix64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(items[i - 1], items[j]);
    }
}

// The identity permutation 0..n-1 shuffled with the generator above.
inline std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    SplitMix64 rng(seed);
    shuffle(perm, rng);
    return perm;
}

}  // namespace t2g
