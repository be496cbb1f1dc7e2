#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>

namespace sti {

// splitmix64; used for seeding and for deriving independent stream seeds
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// xoshiro256++ with explicit stream derivation. All randomness in the
// project flows from one root seed: stream(root, id) seeds a generator
// from splitmix64 over (root, id), so any (operation, sample) pair owns
// a reproducible generator independent of thread scheduling.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64_next(sm);
    }

    static Rng stream(std::uint64_t root, std::uint64_t id) {
        std::uint64_t sm = root;
        std::uint64_t a = splitmix64_next(sm);
        sm ^= id * 0xd1342543de82ef95ull + 0x632be59bd9b4e019ull;
        return Rng(a ^ splitmix64_next(sm));
    }

    // combine fields into a stream id (order matters)
    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
        std::uint64_t sm = a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2));
        return splitmix64_next(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0,1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // uniform in (0,1); rejects the exact 0 (probability 2^-53 per draw)
    double uniform_pos() {
        double u;
        do {
            u = uniform();
        } while (u == 0.0);
        return u;
    }

    std::uint64_t uniform_int(std::uint64_t n) {
        // Lemire-style rejection-free enough for our n << 2^64
        return next() % n;
    }

    bool coin() { return (next() >> 63) != 0; }

    bool bernoulli(double p) { return uniform() < p; }

    double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

    // Knuth product method; split recursively for large means so the
    // running product never underflows
    std::uint64_t poisson(double mean) {
        assert(mean >= 0.0);
        std::uint64_t total = 0;
        while (mean > 32.0) {
            double half = mean * 0.5;
            total += poisson_small(half);
            mean -= half;
        }
        return total + poisson_small(mean);
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t poisson_small(double mean) {
        if (mean <= 0.0) return 0;
        const double limit = std::exp(-mean);
        double prod = 1.0;
        std::uint64_t k = 0;
        while (true) {
            prod *= uniform();
            if (prod <= limit) return k;
            ++k;
        }
    }

    std::uint64_t s_[4];
};

}  // namespace sti
