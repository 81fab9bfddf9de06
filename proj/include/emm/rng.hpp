#pragma once

// Deterministic seeding.  Every random stream in the library is derived from
// one master seed through split_seed; streams are identified by fixed ids,
// so adding a new consumer never shifts the draws of an existing one.

#include <cmath>
#include <cstdint>
#include <random>

namespace emm {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Child stream `stream` of `master`.  Splits compose: derive per-variable
// seeds first, then per-component seeds from those.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(master ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

// Standard-normal stream: mt19937_64 + explicit Box-Muller, so the byte
// stream does not depend on the standard library's distribution internals.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Uniform in (0,1]; never returns 0, so log() above is safe.
    double uniform01() {
        return static_cast<double>((rng_() >> 11) + 1) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound) by rejection; bias-free and portable.
    std::uint64_t bounded(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = rng_();
            if (r >= threshold) return r % bound;
        }
    }

private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace emm
