#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "dreg/core.hpp"

namespace dreg {

// Seeded generator with explicit transforms. The standard distribution
// objects are implementation-defined, so every transform lives here to keep
// runs reproducible across compilers.
struct Rng {
    std::mt19937_64 gen;

    explicit Rng(std::uint64_t seed) : gen(seed) {}

    std::uint64_t next_u64() { return gen(); }

    // uniform on [0, 1) with 53-bit resolution
    double uniform() {
        return static_cast<double>(gen() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    // unbiased integer draw in [0, n)
    std::size_t uniform_index(std::size_t n) {
        if (n == 0) throw ValueError("uniform_index: n must be positive");
        std::uint64_t bound = UINT64_MAX - UINT64_MAX % n;
        for (;;) {
            std::uint64_t r = gen();
            if (r < bound) return static_cast<std::size_t>(r % n);
        }
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // uniform over the euclidean ball of the given radius centered at 0
    vec uniform_ball(std::size_t d, double radius) {
        vec x(d);
        double n2 = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            x[i] = gaussian();
            n2 += x[i] * x[i];
        }
        double n = std::sqrt(n2);
        if (n == 0.0) return x;  // measure-zero; the origin is a fine answer
        double r = radius * std::pow(uniform(), 1.0 / static_cast<double>(d));
        for (double& xi : x) xi *= r / n;
        return x;
    }

  private:
    bool have_spare_ = false;
    double spare_ = 0.0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-indexed draws: the value at a counter depends only on (seed,
// counter), never on call order. The bandit learner uses this for its
// coordinate picks so a round can be replayed in isolation.
struct CounterRng {
    std::uint64_t seed = 0;

    double uniform_at(std::uint64_t counter) const {
        std::uint64_t h = splitmix64(seed ^ splitmix64(counter));
        return static_cast<double>(h >> 11) * 0x1.0p-53;
    }

    std::size_t index_at(std::uint64_t counter, std::size_t n) const {
        if (n == 0) throw ValueError("index_at: n must be positive");
        double u = uniform_at(counter);
        std::size_t i = static_cast<std::size_t>(u * static_cast<double>(n));
        return i >= n ? n - 1 : i;
    }
};

}  // namespace dreg
