#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rde {

// Residue arithmetic modulo a prime q. q is validated once at construction so
// downstream code can assume invertibility of nonzero elements.
struct PrimeModulus {
    int q;

    explicit PrimeModulus(int q_) : q(q_) {
        if (q < 2) throw std::invalid_argument("modulus must be >= 2, got " + std::to_string(q));
        for (int d = 2; d * d <= q; ++d) {
            if (q % d == 0)
                throw std::invalid_argument("modulus must be prime, got " + std::to_string(q));
        }
    }

    int add(int a, int b) const { return (a + b) % q; }
    int sub(int a, int b) const { return ((a - b) % q + q) % q; }
    int mul(int a, int b) const { return int(std::int64_t(a) * b % q); }
};

using Symbol = int;
using SymbolVector = std::vector<Symbol>;

inline bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

inline int log2_exact(std::size_t n) {
    int k = 0;
    while ((std::size_t(1) << k) < n) ++k;
    return k;
}

inline void validate_symbols(const SymbolVector& u, const PrimeModulus& q,
                             bool require_pow2 = true) {
    if (require_pow2 && !is_power_of_two(u.size()))
        throw std::invalid_argument("symbol vector length must be a power of two, got " +
                                    std::to_string(u.size()));
    for (Symbol s : u) {
        if (s < 0 || s >= q.q)
            throw std::invalid_argument("symbol " + std::to_string(s) +
                                        " out of range for alphabet size " + std::to_string(q.q));
    }
}

}  // namespace rde
