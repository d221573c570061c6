#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "rde/prime_field.hpp"

namespace rde {

// Raised when a conditioning path has probability zero (all-zero weight after a
// combine). Callers that can prove the path is reachable treat this as fatal.
struct impossible_path : std::runtime_error {
    impossible_path() : std::runtime_error("conditioning path has probability zero") {}
};

constexpr int kMaxQ = 8;

// Length-q nonnegative weights, kept normalized to sum 1; the log of the
// discarded scale is tracked so joint probabilities remain recoverable.
struct WeightVector {
    std::array<double, kMaxQ> w{};
    int q = 0;
    double log_scale = 0.0;

    WeightVector() = default;
    explicit WeightVector(int q_) : q(q_) {
        if (q_ < 2 || q_ > kMaxQ) throw std::invalid_argument("weight vector alphabet out of range");
    }

    static WeightVector uniform(int q_) {
        WeightVector v(q_);
        for (int a = 0; a < q_; ++a) v.w[a] = 1.0 / q_;
        return v;
    }

    double operator[](int a) const { return w[a]; }
    double& operator[](int a) { return w[a]; }

    double sum() const {
        double s = 0;
        for (int a = 0; a < q; ++a) s += w[a];
        return s;
    }

    // Normalizes in place; throws impossible_path when the total mass is zero.
    WeightVector& normalize() {
        const double s = sum();
        if (!(s > 0.0)) throw impossible_path();
        for (int a = 0; a < q; ++a) w[a] /= s;
        log_scale += std::log(s);
        return *this;
    }

    bool is_uniform(double tol = 1e-15) const {
        for (int a = 0; a < q; ++a)
            if (std::abs(w[a] - 1.0 / q) > tol) return false;
        return true;
    }
};

// out(u1) proportional to sum_{u2} a(u1+u2 mod q) * b(u2).
inline WeightVector sc_combine_minus(const WeightVector& a, const WeightVector& b) {
    WeightVector out(a.q);
    for (int u1 = 0; u1 < a.q; ++u1) {
        double acc = 0;
        for (int u2 = 0; u2 < a.q; ++u2) acc += a.w[(u1 + u2) % a.q] * b.w[u2];
        out.w[u1] = acc;
    }
    out.log_scale = a.log_scale + b.log_scale;
    return out.normalize();
}

// out(u2) proportional to a(u1+u2 mod q) * b(u2) for the already-fixed u1.
inline WeightVector sc_combine_plus(const WeightVector& a, const WeightVector& b, Symbol u1) {
    WeightVector out(a.q);
    for (int u2 = 0; u2 < a.q; ++u2) out.w[u2] = a.w[(u1 + u2) % a.q] * b.w[u2];
    out.log_scale = a.log_scale + b.log_scale;
    return out.normalize();
}

// Bhattacharyya value of a normalized conditional:
// (1/(q-1)) * sum_{a != a'} sqrt(w_a w_a') = ((sum_a sqrt(w_a))^2 - 1) / (q-1).
inline double bhattacharyya_conditional(const WeightVector& v) {
    double s = 0;
    for (int a = 0; a < v.q; ++a) s += std::sqrt(v.w[a]);
    double z = (s * s - v.sum()) / (v.q - 1);
    if (z < 0) z = 0;
    if (z > 1) z = 1;
    return z;
}

// Z(A|B) = (1/(q-1)) sum_{a != a'} sum_b sqrt(P(a,b) P(a',b)) for a joint pmf
// given as joint[a][b] with A ranging over the q-ary alphabet.
inline double bhattacharyya(const std::vector<std::vector<double>>& joint) {
    const std::size_t q = joint.size();
    if (q < 2) throw std::invalid_argument("bhattacharyya needs alphabet size >= 2");
    const std::size_t nb = joint[0].size();
    double z = 0;
    for (std::size_t b = 0; b < nb; ++b) {
        double s = 0, t = 0;
        for (std::size_t a = 0; a < q; ++a) {
            const double p = joint[a][b];
            if (p < 0) throw std::invalid_argument("bhattacharyya: negative probability");
            s += std::sqrt(p);
            t += p;
        }
        z += s * s - t;
    }
    z /= double(q - 1);
    if (z < 0) z = 0;
    if (z > 1) z = 1;
    return z;
}

// Entropy of an unnormalized weight array in nats, with 0 log 0 = 0.
inline double entropy_nats(const double* w, std::size_t m) {
    double tot = 0;
    for (std::size_t i = 0; i < m; ++i) tot += w[i];
    if (!(tot > 0)) return 0.0;
    double h = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (w[i] > 0) h -= w[i] * std::log(w[i] / tot);
    }
    return h / tot;
}

inline double nats_to_base(double h_nats, int base) { return h_nats / std::log(double(base)); }

}  // namespace rde
