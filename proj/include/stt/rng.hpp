#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace stt {

// Seeded random stream used by every generator and initializer in the library.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. The uniform/normal mappings below are implemented here instead of
// using std::*_distribution (whose algorithms are implementation-defined), so
// a given seed reproduces the same stream on every conforming platform. The
// normal draw is the Marsaglia polar transform; it only calls sqrt and log.
class rng {
  public:
    explicit rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1) with 53 random mantissa bits.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1]; never returns an exact zero.
    double uniform01_open() {
        return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
    }

    // Unbiased uniform integer in [0, bound), bound >= 1, by rejection.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % bound;
        std::uint64_t v;
        do {
            v = eng_();
        } while (v >= limit);
        return v % bound;
    }

    // Standard normal deviate.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace stt
