#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <numbers>

namespace tvmdp {

/// Counter-based splitmix64 stream: the n-th output is a fixed mix of
/// seed + n * golden_gamma, so runs are reproducible from the seed alone and
/// the scheme is easy to restate in other languages (trajectory statistics
/// match across reimplementations even if libm rounding differs in the
/// Gaussian tail).
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = seed_ + (++counter_) * 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::size_t next_below(std::size_t n) {
        return static_cast<std::size_t>(next_unit() * static_cast<double>(n)) % n;
    }

    /// Standard normal via Box-Muller; consumes two uniforms per pair and
    /// caches the second deviate.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] so the log is finite.
        const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Sample from N(mean, L L^T) given the lower Cholesky factor L.
    Eigen::Vector2d next_gaussian2(const Eigen::Vector2d& mean, const Eigen::Matrix2d& chol_lower) {
        const Eigen::Vector2d z(next_gaussian(), next_gaussian());
        return mean + chol_lower * z;
    }

  private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace tvmdp
