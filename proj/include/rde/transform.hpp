#pragma once

#include <stdexcept>
#include <vector>

#include "rde/prime_field.hpp"

namespace rde {

// v = u * G^{ x k} mod q where G = [[1,0],[1,1]], in natural (non-bit-reversed)
// order. Implemented as the in-place butterfly: per level, each first-half slot
// of a block absorbs its partner: (u1, u2) -> (u1 + u2, u2).
inline SymbolVector polar_transform(const SymbolVector& u, const PrimeModulus& q) {
    validate_symbols(u, q);  // also rejects non-power-of-two lengths
    SymbolVector v = u;
    const std::size_t n = v.size();
    for (std::size_t h = n / 2; h >= 1; h /= 2) {
        for (std::size_t o = 0; o < n; o += 2 * h) {
            for (std::size_t j = o; j < o + h; ++j) v[j] = q.add(v[j], v[j + h]);
        }
        if (h == 1) break;
    }
    return v;
}

// Inverse via (G^{-1})^{ x k} with G^{-1} = [[1,0],[q-1,1]]: the butterfly run
// with subtraction, levels visited in the opposite order.
inline SymbolVector polar_inverse(const SymbolVector& v, const PrimeModulus& q) {
    validate_symbols(v, q);  // also rejects non-power-of-two lengths
    SymbolVector u = v;
    const std::size_t n = u.size();
    for (std::size_t h = 1; h <= n / 2; h *= 2) {
        for (std::size_t o = 0; o < n; o += 2 * h) {
            for (std::size_t j = o; j < o + h; ++j) u[j] = q.sub(u[j], u[j + h]);
        }
    }
    return u;
}

// Dense G^{ x k} for cross-checking the butterfly against an explicit
// matrix product. Intended for small n only.
inline std::vector<std::vector<int>> kronecker_matrix(int k, const PrimeModulus& q) {
    std::vector<std::vector<int>> m = {{1}};
    for (int level = 0; level < k; ++level) {
        const std::size_t s = m.size();
        std::vector<std::vector<int>> next(2 * s, std::vector<int>(2 * s, 0));
        // G (x) m  with G = [[1,0],[1,1]]
        for (std::size_t r = 0; r < s; ++r)
            for (std::size_t c = 0; c < s; ++c) {
                next[r][c] = m[r][c];
                next[r + s][c] = m[r][c];
                next[r + s][c + s] = m[r][c];
            }
        m = std::move(next);
    }
    (void)q;
    return m;
}

inline SymbolVector matrix_apply(const SymbolVector& u, const std::vector<std::vector<int>>& g,
                                 const PrimeModulus& q) {
    const std::size_t n = u.size();
    SymbolVector v(n, 0);
    for (std::size_t c = 0; c < n; ++c) {
        std::int64_t acc = 0;
        for (std::size_t r = 0; r < n; ++r) acc += std::int64_t(u[r]) * g[r][c];
        v[c] = int(acc % q.q);
    }
    return v;
}

}  // namespace rde
