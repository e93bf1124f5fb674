#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace hardy {

/// Deterministic, platform-independent random stream. All randomness in the
/// project flows from one top-level seed through named derivation paths, e.g.
///     Rng(seed).child("search").child(attempt)
/// so each attempt/trial owns an independent reproducible stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(mix(seed ^ 0x9e3779b97f4a7c15ull)) {}

    Rng child(std::string_view name) const {
        std::uint64_t h = 0xcbf29ce484222325ull; // FNV-1a over the path component
        for (unsigned char c : name) {
            h ^= c;
            h *= 0x100000001b3ull;
        }
        return Rng(mix(state_ ^ h));
    }

    Rng child(std::uint64_t index) const { return Rng(mix(state_ + 0x632be59bd9b4e019ull * (index + 1))); }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    /// Uniform in [0,1), 53 random bits; bit-reproducible everywhere.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    int sign() { return (next_u64() >> 63) ? -1 : 1; }

    /// Integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    /// Standard normal via Box-Muller (deterministic across platforms).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    static std::uint64_t mix(std::uint64_t z) { // splitmix64 finalizer
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace hardy
