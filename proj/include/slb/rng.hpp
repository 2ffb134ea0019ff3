#pragma once

#include <cstdint>
#include <random>

namespace slb {

/// Mixes a 64-bit word (splitmix64 finalizer). Used to derive independent
/// stream seeds from (master seed, n, replicate) triples.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    return mix64(master ^ mix64(a ^ mix64(b)));
}

/// Seeded generator with explicit transforms so that streams are identical
/// across standard library implementations (std::normal_distribution is not
/// portable; mt19937_64 output is).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }

    /// Uniform on [0,1) with 53-bit resolution.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; consumes two uniforms per pair.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double c = std::cos(6.283185307179586476925286766559 * u2);
        const double s = std::sin(6.283185307179586476925286766559 * u2);
        spare_ = r * s;
        have_spare_ = true;
        return r * c;
    }

    /// +1 or -1 with equal probability.
    double sign() { return (engine_() & 1u) ? 1.0 : -1.0; }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace slb
