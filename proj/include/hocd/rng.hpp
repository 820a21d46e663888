#ifndef HOCD_RNG_HPP
#define HOCD_RNG_HPP

#include <cmath>
#include <cstdint>
#include <string_view>

namespace hocd {

// Deterministic, platform-independent generator (splitmix64 core). All
// randomness in the toolkit flows from one master seed through named
// streams, so results are reproducible regardless of thread count.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1), 53-bit resolution.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; two uniforms per draw, no cached state.
    double next_normal() {
        double u1 = next_unit();
        while (u1 <= 0.0) u1 = next_unit();
        const double u2 = next_unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    /// Uniform on [lo, hi).
    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    /// Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        // modulo bias is negligible for n << 2^64; kept simple for portability
        return next_u64() % n;
    }

private:
    std::uint64_t state_;
};

/// Named-stream seed splitter: mixes the master seed with a stream name and
/// an index. Distinct (name, index) pairs give independent streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                                 std::uint64_t index = 0) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (const char c : stream) {
        h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
        h *= 0x100000001b3ULL;
    }
    Rng mixer(master ^ h ^ (index * 0xd6e8feb86659fd93ULL));
    return mixer.next_u64();
}

}  // namespace hocd

#endif
