#pragma once

#include <cstdint>
#include <random>

namespace crowd {

// Seedable random generator with named substreams. Replication k of an
// experiment with seed s draws from Rng::substream(s, k), so replications
// are reproducible independently of execution order.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

    static Rng substream(std::uint64_t seed, std::uint64_t stream) {
        return Rng(mix(seed) ^ mix(stream + 0x632BE59BD9B4E019ull));
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Fair coin returning +1 or -1.
    int coin_sign() { return (engine_() & 1u) ? +1 : -1; }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(uniform01() * static_cast<double>(n)) % n;
    }

    double gamma(double shape) {
        std::gamma_distribution<double> d(shape, 1.0);
        return d(engine_);
    }

    double beta(double a, double b) {
        const double x = gamma(a);
        const double y = gamma(b);
        return x / (x + y);
    }

    double normal() {
        std::normal_distribution<double> d(0.0, 1.0);
        return d(engine_);
    }

    std::mt19937_64& engine() { return engine_; }

private:
    // SplitMix64 finalizer; decorrelates nearby seeds and stream indices.
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ull;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

    std::mt19937_64 engine_;
};

}  // namespace crowd
