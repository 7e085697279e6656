// random.hpp — reproducible random streams
//
// Every stochastic quantity is drawn from a Stream keyed by
// (seed, purpose, index_a, index_b). Streams are independent mt19937_64
// instances seeded through a SplitMix64 mix of the key, so results are
// bit-reproducible for a fixed seed regardless of thread count or the
// order in which streams are consumed. All variates are derived from raw
// 64-bit draws with explicit arithmetic (no implementation-defined
// std::*_distribution).

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace zenodot::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

enum class Purpose : std::uint64_t {
    bath_draw = 1,
    trajectory = 2,
    generic = 3,
};

class Stream {
  public:
    Stream(std::uint64_t seed, Purpose purpose, std::uint64_t a = 0, std::uint64_t b = 0) {
        std::uint64_t k = splitmix64(seed);
        k = splitmix64(k ^ static_cast<std::uint64_t>(purpose));
        k = splitmix64(k ^ a);
        k = splitmix64(k ^ b);
        gen_.seed(k);
    }

    std::uint64_t next_u64() { return gen_(); }

    // uniform in [0, 1)
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // exponential inter-arrival time for the given rate (> 0)
    double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

    double gaussian(double mean = 0.0, double sd = 1.0) {
        if (have_spare_) {
            have_spare_ = false;
            return mean + sd * spare_;
        }
        // Box-Muller on two fresh uniforms; u clamped away from 0
        double u = uniform01();
        if (u <= 0.0) u = 0x1.0p-53;
        double v = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double two_pi_v = 2.0 * 3.14159265358979323846 * v;
        spare_ = r * std::sin(two_pi_v);
        have_spare_ = true;
        return mean + sd * r * std::cos(two_pi_v);
    }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace zenodot::rng
