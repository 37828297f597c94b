#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace gridopa::rng {

/// SplitMix64 finalizer, used to derive well-spread seeds from small integers.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Purpose tags keep the per-realization streams independent, so that
/// paired scenarios consume demand noise, weather and trigger draws in
/// lockstep even when cascade activity differs.
enum class Stream : std::uint64_t {
    DemandNoise = 0,
    Weather = 1,
    Triggers = 2,
    CascadeDraws = 3,
    Placement = 4,
    WindAssignment = 5,
};

/// Documented seed-splitting rule: two SplitMix64 rounds over
/// (master, realization) and one over the stream purpose.
constexpr std::uint64_t derive_seed(std::uint64_t master_seed,
                                    std::uint64_t realization,
                                    Stream purpose) {
    std::uint64_t h = splitmix64(master_seed);
    h = splitmix64(h ^ (0xA0761D6478BD642FULL * (realization + 1)));
    h = splitmix64(h ^ (0xE7037ED1A0B428DBULL * (static_cast<std::uint64_t>(purpose) + 1)));
    return h;
}

/// Deterministic random stream with explicitly specified draw functions.
/// std::mt19937_64 output is pinned by the standard; the uniform/normal
/// mappings are implemented here so results do not depend on the standard
/// library's distribution internals.
class RngStream {
public:
    RngStream() : engine_(0) {}
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; draws are generated in pairs and the
    /// spare is cached, so consumption is two 64-bit words per pair.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    bool bernoulli(double p) { return uniform() < p; }

    std::uint64_t next_u64() { return engine_(); }

    /// Integer in [0, n) by rejection-free scaling (n is tiny here; modulo
    /// bias at n << 2^53 is far below statistical resolution).
    std::size_t below(std::size_t n) {
        return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace gridopa::rng
