#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace vibrokit {

/// Seeded random source with fully pinned output sequences.
///
/// mt19937_64 is specified bit-for-bit by the standard; the distributions
/// here are implemented by hand because the std:: distribution objects are
/// not, and dataset generation promises byte-identical files per seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; consumes exactly two draws per call.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        // shift u1 into (0, 1] so the log argument never hits zero
        u1 = 1.0 - u1;
        constexpr double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    /// Uniform index in [0, n). Modulo bias is irrelevant at our sizes.
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }

private:
    std::mt19937_64 gen_;
};

/// In-place Fisher-Yates shuffle, pinned to Rng::index draw order.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = rng.index(i);
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace vibrokit
