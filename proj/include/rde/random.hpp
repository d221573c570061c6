#pragma once

#include <cstdint>
#include <random>

#include "rde/weight_vector.hpp"

namespace rde {

// splitmix64: cheap, well-distributed stream derivation from (root seed, index).
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
    std::uint64_t s = root ^ (0xA0761D6478BD642Full * (stream + 1));
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return a ^ (b << 1);
}

// mt19937_64 engine output is specified by the standard, so sequences are
// portable; sampling helpers are hand-rolled because std distributions are not.
class Rng {
   public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    double u01() { return double(eng_() >> 11) * 0x1.0p-53; }

    // Inverse-CDF draw from a normalized weight vector.
    Symbol sample(const WeightVector& v) {
        const double r = u01();
        double acc = 0;
        for (int a = 0; a < v.q; ++a) {
            acc += v.w[a];
            if (r < acc) return a;
        }
        return v.q - 1;
    }

    int sample_pmf(const double* p, int m) {
        const double r = u01();
        double acc = 0;
        for (int i = 0; i < m; ++i) {
            acc += p[i];
            if (r < acc) return i;
        }
        return m - 1;
    }

    int uniform_int(int m) { return int(eng_() % std::uint64_t(m)); }

   private:
    std::mt19937_64 eng_;
};

}  // namespace rde
