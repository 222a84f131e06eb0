#pragma once
// Counter-based 64-bit generator (splitmix64 output function over key+counter)
// with cheap stream splitting, so every experiment replica gets an independent
// stream derived from one recorded master seed.
#include <cmath>
#include <cstdint>

namespace gshift {

class Rng {
  public:
    explicit Rng(uint64_t key = 0, uint64_t ctr = 0) : key_(key), ctr_(ctr) {}

    static uint64_t mix(uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    uint64_t next() { return mix(key_ + 0x632BE59BD9B4E019ULL * ++ctr_); }

    // Independent child stream; deterministic in (key, stream).
    Rng split(uint64_t stream) const { return Rng(mix(key_ ^ mix(stream ^ 0xA5A5A5A5DEADBEEFULL))); }

    uint64_t key() const { return key_; }

    // Uniform double in [0, 1) from the top 53 bits.
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Unbiased integer in [0, n).
    uint64_t below(uint64_t n) {
        uint64_t threshold = (0 - n) % n;
        for (;;) {
            uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }
    int uniform_int(int n) { return int(below(uint64_t(n))); }

    double normal() {
        // Box-Muller; uniform() == 0 is guarded to keep log finite.
        double u1 = 1.0 - uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // Exact Poisson: inversion by sequential search for small means, PTRS
    // transformed rejection (Hormann) for large ones.
    uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        if (mean < 30.0) {
            double L = std::exp(-mean), p = 1.0;
            uint64_t k = 0;
            do {
                ++k;
                p *= uniform();
            } while (p > L);
            return k - 1;
        }
        const double b = 0.931 + 2.53 * std::sqrt(mean);
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double v_r = 0.9277 - 3.6224 / (b - 2.0);
        for (;;) {
            double u = uniform() - 0.5;
            double v = uniform();
            double us = 0.5 - std::abs(u);
            double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
            if (us >= 0.07 && v <= v_r) return uint64_t(k);
            if (k < 0.0 || (us < 0.013 && v > us)) continue;
            if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
                k * std::log(mean) - mean - std::lgamma(k + 1.0))
                return uint64_t(k);
        }
    }

  private:
    uint64_t key_, ctr_;
};

}  // namespace gshift
