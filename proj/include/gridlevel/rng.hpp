#pragma once

#include <cstdint>
#include <random>

namespace gridlevel {

/// splitmix64 step; used to derive independent seed streams from one
/// master seed so that adding customers/islands never shifts the draws of
/// the existing ones.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Stable seed for (master, stream, substream); e.g. per-customer or
/// per-island-per-generation streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t substream = 0) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    s = a ^ (stream * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
    std::uint64_t b = splitmix64(s);
    s = b ^ (substream * 0x9e3779b97f4a7c15ULL + 1);
    return splitmix64(s);
}

/// Deterministic RNG with hand-rolled distributions. std::mt19937_64 output
/// is pinned by the standard, but the standard distributions are not;
/// rolling our own keeps runs bit-identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53-bit resolution.
    double next_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [lo, hi], inclusive.
    std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(bounded(span));
    }

    /// Uniform real in [lo, hi).
    double next_real(double lo, double hi) { return lo + next_double() * (hi - lo); }

    bool next_bool(double p_true) { return next_double() < p_true; }

private:
    /// Unbiased bounded draw (Lemire's method with rejection).
    std::uint64_t bounded(std::uint64_t span) {
        if (span == 0) return engine_();
        std::uint64_t x = engine_();
        __uint128_t m = static_cast<__uint128_t>(x) * span;
        std::uint64_t l = static_cast<std::uint64_t>(m);
        if (l < span) {
            const std::uint64_t t = -span % span;
            while (l < t) {
                x = engine_();
                m = static_cast<__uint128_t>(x) * span;
                l = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    std::mt19937_64 engine_;
};

}  // namespace gridlevel
