#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rde/prime_field.hpp"
#include "rde/random.hpp"
#include "rde/weight_vector.hpp"

namespace rde {

constexpr double kProbTol = 1e-12;

// Memoryless joint pmf Q(x,y) over finite alphabets.
struct JointSource {
    int nx = 0, ny = 0;
    std::vector<double> Q;  // row-major: Q[x*ny + y]

    JointSource() = default;
    JointSource(int nx_, int ny_, std::vector<double> q) : nx(nx_), ny(ny_), Q(std::move(q)) {
        if (nx < 1 || ny < 1 || Q.size() != std::size_t(nx) * ny)
            throw std::invalid_argument("joint source dimension mismatch");
        double s = 0;
        for (double p : Q) {
            if (p < 0) throw std::invalid_argument("joint source has negative probability");
            s += p;
        }
        if (std::abs(s - 1.0) > kProbTol)
            throw std::invalid_argument("joint source pmf sums to " + std::to_string(s));
        for (double& p : Q) p /= s;
    }

    double prob(int x, int y) const { return Q[std::size_t(x) * ny + y]; }

    // (x,y) letter pairs with positive probability, lexicographic order.
    std::vector<std::pair<int, int>> support() const {
        std::vector<std::pair<int, int>> s;
        for (int x = 0; x < nx; ++x)
            for (int y = 0; y < ny; ++y)
                if (prob(x, y) > 0) s.emplace_back(x, y);
        return s;
    }

    std::vector<double> marginal_y() const {
        std::vector<double> m(ny, 0.0);
        for (int x = 0; x < nx; ++x)
            for (int y = 0; y < ny; ++y) m[y] += prob(x, y);
        return m;
    }
};

// Bounded per-letter distortion d(x, xhat) in [0, d_max].
struct DistortionMetric {
    int nx = 0, nq = 0;
    std::vector<double> d;  // d[x*nq + xhat]
    double d_max = 0.0;

    DistortionMetric() = default;
    DistortionMetric(int nx_, int nq_, std::vector<double> vals)
        : nx(nx_), nq(nq_), d(std::move(vals)) {
        if (d.size() != std::size_t(nx) * nq) throw std::invalid_argument("distortion dimension mismatch");
        for (double v : d) {
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::invalid_argument("distortion values must be finite and nonnegative");
            d_max = std::max(d_max, v);
        }
    }

    static DistortionMetric hamming(int nx_, int nq_) {
        std::vector<double> vals(std::size_t(nx_) * nq_, 1.0);
        for (int x = 0; x < std::min(nx_, nq_); ++x) vals[std::size_t(x) * nq_ + x] = 0.0;
        return DistortionMetric(nx_, nq_, std::move(vals));
    }

    double operator()(int x, int xhat) const { return d[std::size_t(x) * nq + xhat]; }
};

// Conditional pmf P(xhat | x, y): one length-q row per source letter pair.
struct TestChannel {
    int nx = 0, ny = 0, q = 0;
    std::vector<double> rows;  // rows[(x*ny + y)*q + xhat]

    TestChannel() = default;
    TestChannel(int nx_, int ny_, int q_, std::vector<double> r)
        : nx(nx_), ny(ny_), q(q_), rows(std::move(r)) {
        if (rows.size() != std::size_t(nx) * ny * q)
            throw std::invalid_argument("test channel dimension mismatch");
        for (int s = 0; s < nx * ny; ++s) {
            double sum = 0;
            for (int a = 0; a < q; ++a) {
                const double p = rows[std::size_t(s) * q + a];
                if (p < 0) throw std::invalid_argument("test channel has negative probability");
                sum += p;
            }
            if (std::abs(sum - 1.0) > kProbTol)
                throw std::invalid_argument("test channel row " + std::to_string(s) +
                                            " sums to " + std::to_string(sum));
            for (int a = 0; a < q; ++a) rows[std::size_t(s) * q + a] /= sum;
        }
    }

    const double* row(int x, int y) const { return &rows[(std::size_t(x) * ny + y) * q]; }
    double prob(int x, int y, int xhat) const { return row(x, y)[xhat]; }

    // Reconstruction prior P(xhat) induced together with the source.
    std::vector<double> reconstruction_prior(const JointSource& src) const {
        std::vector<double> p(q, 0.0);
        for (int x = 0; x < nx; ++x)
            for (int y = 0; y < ny; ++y)
                for (int a = 0; a < q; ++a) p[a] += src.prob(x, y) * prob(x, y, a);
        return p;
    }
};

// Analytic operating point of a (source, channel, distortion) triple; entropy
// units are base q.
struct OperatingPoint {
    double R_star = 0.0;
    double D_star = 0.0;
    double Delta_star = 0.0;
};

// Core evaluation on raw channel rows: rows[(x*ny + y)*q + a] = P(x̂=a | x,y).
// Rows at zero-probability source pairs are ignored.
inline OperatingPoint operating_point_from_rows(const JointSource& src, const double* rows,
                                                int q, const DistortionMetric& dist) {
    std::vector<double> prior(std::size_t(q), 0.0);
    double hxy_cond = 0.0;  // H(Xhat | X,Y) in nats
    double dstar = 0.0;
    std::vector<double> joint_y_xh(std::size_t(src.ny) * q, 0.0);
    for (int x = 0; x < src.nx; ++x) {
        for (int y = 0; y < src.ny; ++y) {
            const double pxy = src.prob(x, y);
            if (pxy <= 0) continue;
            const double* row = &rows[(std::size_t(x) * src.ny + y) * q];
            hxy_cond += pxy * entropy_nats(row, std::size_t(q));
            for (int a = 0; a < q; ++a) {
                const double pj = pxy * row[a];
                prior[std::size_t(a)] += pj;
                dstar += pj * dist(x, a);
                joint_y_xh[std::size_t(y) * q + a] += pj;
            }
        }
    }
    const double h_prior = entropy_nats(prior.data(), prior.size());
    // H(Y | Xhat) = H(Y, Xhat) - H(Xhat)
    const double h_joint = entropy_nats(joint_y_xh.data(), joint_y_xh.size());
    OperatingPoint op;
    op.R_star = nats_to_base(h_prior - hxy_cond, q);
    op.D_star = dstar;
    op.Delta_star = nats_to_base(h_joint - h_prior, q);
    return op;
}

inline OperatingPoint target_point(const JointSource& src, const TestChannel& ch,
                                   const DistortionMetric& dist) {
    if (src.nx != ch.nx || src.ny != ch.ny || dist.nx != src.nx || dist.nq != ch.q)
        throw std::invalid_argument("target_point: dimension mismatch");
    return operating_point_from_rows(src, ch.rows.data(), ch.q, dist);
}

// Reverse ("per-reconstruction") channel W(x,y | xhat) with its prior.
struct ReverseChannel {
    int nx = 0, ny = 0, q = 0;
    std::vector<double> W;          // W[xhat*(nx*ny) + (x*ny+y)]
    std::vector<double> prior;      // P(xhat)
    std::vector<int> degenerate;    // xhat symbols with zero prior (flagged, not dropped)

    const double* column(int xhat) const { return &W[std::size_t(xhat) * nx * ny]; }
};

inline ReverseChannel test_channel_from_joint(int nx, int ny, int q,
                                              const std::vector<double>& joint) {
    if (joint.size() != std::size_t(nx) * ny * q)
        throw std::invalid_argument("test_channel_from_joint: dimension mismatch");
    double total = 0;
    for (double p : joint) {
        if (p < 0) throw std::invalid_argument("joint pmf has negative probability");
        total += p;
    }
    if (std::abs(total - 1.0) > kProbTol)
        throw std::invalid_argument("joint pmf sums to " + std::to_string(total));
    ReverseChannel rc;
    rc.nx = nx;
    rc.ny = ny;
    rc.q = q;
    rc.prior.assign(q, 0.0);
    rc.W.assign(std::size_t(q) * nx * ny, 0.0);
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y)
            for (int a = 0; a < q; ++a)
                rc.prior[a] += joint[(std::size_t(x) * ny + y) * q + a] / total;
    for (int a = 0; a < q; ++a) {
        if (rc.prior[a] <= 0.0) {
            rc.degenerate.push_back(a);
            continue;
        }
        for (int x = 0; x < nx; ++x)
            for (int y = 0; y < ny; ++y)
                rc.W[std::size_t(a) * nx * ny + std::size_t(x) * ny + y] =
                    joint[(std::size_t(x) * ny + y) * q + a] / total / rc.prior[a];
    }
    return rc;
}

// Binary-reconstruction symmetry: searches for an involutive permutation pi of
// the (x,y) letter pairs with W(x,y | 1) = W(pi(x,y) | 0). Only defined for q=2.
inline std::optional<std::vector<int>> is_symmetric(const ReverseChannel& rc,
                                                    double tol = 1e-9) {
    if (rc.q != 2) throw std::invalid_argument("symmetry search is defined for q = 2 only");
    const int m = rc.nx * rc.ny;
    const double* w0 = rc.column(0);
    const double* w1 = rc.column(1);
    std::vector<int> perm(m, -1);
    // Depth-first pairing: the smallest unassigned s is matched to t with
    // W(s|1)=W(t|0) and W(t|1)=W(s|0) (so pi = pi^{-1} holds by construction).
    std::function<bool()> rec = [&]() -> bool {
        int s = -1;
        for (int i = 0; i < m; ++i)
            if (perm[i] < 0) { s = i; break; }
        if (s < 0) return true;
        for (int t = 0; t < m; ++t) {
            if (perm[t] >= 0 && t != s) continue;
            if (t == s) {
                if (std::abs(w1[s] - w0[s]) > tol) continue;
                perm[s] = s;
                if (rec()) return true;
                perm[s] = -1;
            } else {
                if (std::abs(w1[s] - w0[t]) > tol || std::abs(w1[t] - w0[s]) > tol) continue;
                perm[s] = t;
                perm[t] = s;
                if (rec()) return true;
                perm[s] = perm[t] = -1;
            }
        }
        return false;
    };
    if (rec()) return perm;
    return std::nullopt;
}

inline std::pair<SymbolVector, SymbolVector> sample_source(const JointSource& src, int n,
                                                           Rng& rng) {
    if (n < 1) throw std::invalid_argument("sample_source: n must be >= 1");
    SymbolVector xs(n), ys(n);
    for (int j = 0; j < n; ++j) {
        const int s = rng.sample_pmf(src.Q.data(), src.nx * src.ny);
        xs[j] = s / src.ny;
        ys[j] = s % src.ny;
    }
    return {std::move(xs), std::move(ys)};
}

// ---- presets -------------------------------------------------------------

// Doubly symmetric binary source: X uniform, Y = X xor Bern(p).
inline JointSource dsbs_source(double p) {
    if (p < 0 || p > 1) throw std::invalid_argument("dsbs crossover out of range");
    return JointSource(2, 2, {(1 - p) / 2, p / 2, p / 2, (1 - p) / 2});
}

// X ~ Bern(1/2), Y = X through a Z-channel: P(Y=0 | X=1) = a.
inline JointSource zchannel_source(double a) {
    if (a < 0 || a > 1) throw std::invalid_argument("z-channel parameter out of range");
    return JointSource(2, 2, {0.5, 0.0, 0.5 * a, 0.5 * (1 - a)});
}

// P(xhat | x, y) = BSC(eps) applied to x, independent of y (binary alphabets).
inline TestChannel bsc_test_channel(const JointSource& src, double eps) {
    if (src.nx != 2) throw std::invalid_argument("bsc test channel expects binary X");
    std::vector<double> rows;
    rows.reserve(std::size_t(src.nx) * src.ny * 2);
    for (int x = 0; x < src.nx; ++x)
        for (int y = 0; y < src.ny; ++y) {
            rows.push_back(x == 0 ? 1 - eps : eps);
            rows.push_back(x == 0 ? eps : 1 - eps);
        }
    return TestChannel(src.nx, src.ny, 2, std::move(rows));
}

// P(xhat | x, y) = noise[(xhat - x) mod q], x treated as a q-ary symbol.
inline TestChannel additive_noise_test_channel(const JointSource& src, int q,
                                               const std::vector<double>& noise) {
    if (int(noise.size()) != q) throw std::invalid_argument("noise pmf size mismatch");
    std::vector<double> rows(std::size_t(src.nx) * src.ny * q);
    for (int x = 0; x < src.nx; ++x)
        for (int y = 0; y < src.ny; ++y)
            for (int a = 0; a < q; ++a)
                rows[(std::size_t(x) * src.ny + y) * q + a] = noise[((a - x) % q + q) % q];
    return TestChannel(src.nx, src.ny, q, std::move(rows));
}

}  // namespace rde
