#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace jcap {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}
}  // namespace detail

/// Derives an independent sub-seed from (master, label, a, b). Components and
/// trials must never share a stream, so every consumer passes a distinct
/// label/index combination.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
    // FNV-1a over the label, then splitmix chaining over the numeric parts.
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    std::uint64_t s = master;
    std::uint64_t out = detail::splitmix64(s);
    s = out ^ h;
    out = detail::splitmix64(s);
    s = out ^ a;
    out = detail::splitmix64(s);
    s = out ^ b;
    return detail::splitmix64(s);
}

/// Deterministic random stream. Uniform/Gaussian mappings are implemented
/// explicitly (not via std distributions) so output is identical across
/// standard library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1).
    double uniform() { return double(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Integer in [0, n).
    std::uint64_t index(std::uint64_t n) { return gen_() % n; }

    /// Standard normal via Box-Muller (pairs cached).
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double c = std::cos(2.0 * M_PI * u2);
        double sn = std::sin(2.0 * M_PI * u2);
        spare_ = r * sn;
        have_spare_ = true;
        return r * c;
    }

    bool coin() { return (gen_() >> 63) != 0; }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace jcap
