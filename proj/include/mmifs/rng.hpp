#ifndef MMIFS_RNG_HPP
#define MMIFS_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace mmifs {

// Seeded random source. Only the engine's raw 64-bit output is pinned by the
// standard, so every distribution transform lives here; a given seed then
// yields the same sequence on any conforming toolchain.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) :
        engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [0, n), rejection sampled
    std::uint64_t bounded(std::uint64_t n) {
        if (n == 0) { throw std::invalid_argument("Rng::bounded: n must be positive"); }
        const std::uint64_t threshold = (0ULL - n) % n;
        for (;;) {
            const std::uint64_t x = next_u64();
            if (x >= threshold) { return x % n; }
        }
    }

    // uniform integer in [lo, hi], inclusive
    int uniform_int(int lo, int hi) {
        if (lo > hi) { throw std::invalid_argument("Rng::uniform_int: empty range"); }
        return lo + static_cast<int>(bounded(static_cast<std::uint64_t>(hi) - lo + 1));
    }

    // standard normal, Marsaglia polar method
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = 0.0, v = 0.0, s = 0.0;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    // chi-squared variate with r degrees of freedom: sum of r squared normals
    double chi_squared(int r) {
        if (r < 1) { throw std::invalid_argument("Rng::chi_squared: r must be >= 1"); }
        double sum = 0.0;
        for (int i = 0; i < r; ++i) {
            const double z = normal();
            sum += z * z;
        }
        return sum;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace mmifs

#endif
