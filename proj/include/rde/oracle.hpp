#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rde/construction.hpp"
#include "rde/parallel.hpp"
#include "rde/prime_field.hpp"
#include "rde/random.hpp"
#include "rde/sc_process.hpp"
#include "rde/source_model.hpp"
#include "rde/transform.hpp"
#include "rde/weight_vector.hpp"

namespace rde {

// Resource/guard violations (mapped to exit code 3 by the CLI).
struct limit_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr double kOracleGuard = 1e8;

// Exhaustive evaluation is allowed only while (|X||Y|q)^n stays within the
// guard, counting full alphabets (not just support).
inline void check_oracle_guard(const JointSource& src, int q, int n,
                               double limit = kOracleGuard) {
    const double base = double(src.nx) * src.ny * q;
    if (double(n) * std::log(base) > std::log(limit) + 1e-9)
        throw limit_error("exhaustive evaluation guard exceeded: (" +
                          std::to_string(src.nx * src.ny * q) + ")^" + std::to_string(n) +
                          " > " + fmt17g(limit));
}

// Base-`base` digit expansions of 0..count-1, most significant digit first,
// flattened row-major (count x n).
inline std::vector<std::uint8_t> index_digits(long long count, int n, int base) {
    std::vector<std::uint8_t> out(std::size_t(count) * n);
    for (long long v = 0; v < count; ++v) {
        long long rem = v;
        for (int j = n - 1; j >= 0; --j) {
            out[std::size_t(v) * n + j] = std::uint8_t(rem % base);
            rem /= base;
        }
    }
    return out;
}

// Digit tables of u and x̂ = u·G_n for every u, built through the dense
// Kronecker matrix so downstream exhaustive checks do not depend on the
// butterfly implementation they are meant to validate.
struct TransformTables {
    int n = 0, q = 0;
    long long qn = 0;
    std::vector<std::uint8_t> u_digits;   // qn x n, u_1 first
    std::vector<std::uint8_t> xh_digits;  // qn x n
};

inline TransformTables make_transform_tables(int n, int q) {
    PrimeModulus mod(q);
    TransformTables tt;
    tt.n = n;
    tt.q = q;
    tt.qn = 1;
    for (int j = 0; j < n; ++j) tt.qn *= q;
    tt.u_digits = index_digits(tt.qn, n, q);
    tt.xh_digits.resize(std::size_t(tt.qn) * n);
    const auto g = kronecker_matrix(log2_exact(std::size_t(n)), mod);
    SymbolVector u(std::size_t(n), 0);
    for (long long iu = 0; iu < tt.qn; ++iu) {
        for (int j = 0; j < n; ++j) u[std::size_t(j)] = tt.u_digits[std::size_t(iu) * n + j];
        const SymbolVector xh = matrix_apply(u, g, mod);
        for (int j = 0; j < n; ++j) tt.xh_digits[std::size_t(iu) * n + j] = std::uint8_t(xh[std::size_t(j)]);
    }
    return tt;
}

// P(u^n) table for one fixed source realization, by direct summation with the
// matrix-based transform. This is the reference implementation the SC engine
// is checked against.
class ExactRealizationTable {
  public:
    ExactRealizationTable(const std::vector<WeightVector>& leaves, const TransformTables& tt)
        : tt_(&tt), w_(std::size_t(tt.qn), 1.0) {
        if (int(leaves.size()) != tt.n)
            throw std::invalid_argument("ExactRealizationTable: leaf count mismatch");
        for (long long iu = 0; iu < tt.qn; ++iu)
            for (int j = 0; j < tt.n; ++j)
                w_[std::size_t(iu)] *= leaves[std::size_t(j)].w[tt.xh_digits[std::size_t(iu) * tt.n + j]];
    }

    const std::vector<double>& table() const { return w_; }

    // P(U_i = . | U^{i-1} = path) with i = path.size(), by scanning all u.
    WeightVector conditional(const SymbolVector& path) const {
        const int i = int(path.size());
        if (i >= tt_->n) throw std::invalid_argument("conditional: path too long");
        long long packed = 0;
        for (Symbol s : path) packed = packed * tt_->q + s;
        long long stride = 1;
        for (int j = i + 1; j < tt_->n; ++j) stride *= tt_->q;  // q^{n-i-1}
        WeightVector out(tt_->q);
        for (long long iu = 0; iu < tt_->qn; ++iu) {
            if (iu / (stride * tt_->q) != packed) continue;
            out.w[std::size_t((iu / stride) % tt_->q)] += w_[std::size_t(iu)];
        }
        out.normalize();
        return out;
    }

  private:
    const TransformTables* tt_;
    std::vector<double> w_;
};

// Materialized law over (x^n, y^n, u^n); index = is * num_u + iu where is packs
// the per-position (x,y) letter pairs base |X||Y| and iu packs u base q, both
// most-significant-first.
struct ExactDistribution {
    int n = 0, q = 0, nx = 0, ny = 0;
    long long num_source = 0, num_u = 0;
    std::vector<double> p;

    double total() const {
        KahanSum s;
        for (double v : p) s.add(v);
        return s.get();
    }
};

inline ExactDistribution enumerate_joint(const JointSource& src, const TestChannel& ch, int n) {
    check_oracle_guard(src, ch.q, n);
    const TransformTables tt = make_transform_tables(n, ch.q);
    const int ns = src.nx * src.ny;
    ExactDistribution dist;
    dist.n = n;
    dist.q = ch.q;
    dist.nx = src.nx;
    dist.ny = src.ny;
    dist.num_u = tt.qn;
    dist.num_source = 1;
    for (int j = 0; j < n; ++j) dist.num_source *= ns;
    dist.p.assign(std::size_t(dist.num_source) * tt.qn, 0.0);
    std::vector<std::uint8_t> sdig(std::size_t(n), 0);
    for (long long is = 0; is < dist.num_source; ++is) {
        long long rem = is;
        for (int j = n - 1; j >= 0; --j) {
            sdig[std::size_t(j)] = std::uint8_t(rem % ns);
            rem /= ns;
        }
        double pq = 1.0;
        for (int j = 0; j < n; ++j) pq *= src.Q[sdig[std::size_t(j)]];
        if (pq <= 0.0) continue;
        for (long long iu = 0; iu < tt.qn; ++iu) {
            double w = pq;
            for (int j = 0; j < n; ++j)
                w *= ch.rows[std::size_t(sdig[std::size_t(j)]) * ch.q +
                             tt.xh_digits[std::size_t(iu) * n + j]];
            dist.p[std::size_t(is) * tt.qn + iu] = w;
        }
    }
    return dist;
}

enum class FrozenMode { averaged, fixed };

struct SweepOptions {
    FrozenMode mode = FrozenMode::averaged;
    bool skip_induced = false;   // compute only the exact Z / entropy profiles
    int cross_check_stride = 0;  // rows between SC-engine cross-checks; 0 auto, <0 off
    double cross_check_tol = 1e-10;
    int threads = 0;
    DistortionMetric metric;     // empty -> Hamming on (|X|, q)
};

// Every exact quantity produced by one exhaustive sweep. Entropies are base q;
// per-letter values are divided by n; tv is the L1 distance between the target
// and encoder-induced joint laws of (x^n, y^n, u^n).
struct OracleReport {
    int n = 0, q = 0;
    std::vector<double> Z_cond, Z_marg;  // exact Bhattacharyya profiles
    std::vector<double> H_cond;          // H(U_i | U^{i-1}, X^n, Y^n), base q
    double total_p = 0, total_e = 0;     // mass checks (must be 1)
    double tv = 0;                       // || P - P_enc ||_1
    double tv_bound = 0;                 // sum_F sqrt(2 ln2 log2(q) (1 - H_cond[i]))
    double pe = 0;                       // exact decode error probability under P_enc
    double pe_bound = 0;                 // sum_D Z_marg[i]
    double distortion_target = 0;        // E_P[d]/n
    double distortion_encoder = 0;       // E_Penc[d]/n (encoder output vs x)
    double distortion_decoded = 0;       // E_Pdec[d]/n (decoded output vs x)
    double distortion_decoded_error_part = 0;    // error-event share of the above
    double distortion_decoded_noerror_part = 0;  // complementary share, summed separately
    double equivocation = 0;             // H(Y^n | U_I, U_F)/n under P_enc
    double h_y_given_xhat_p = 0;         // H(Y^n | X̂^n)/n under P
    double h_y_given_xhat_e = 0;         // ... under P_enc
    double h_yxhat_p = 0, h_yxhat_e = 0; // block joint entropies H(Y^n, X̂^n)
    double h_xhat_p = 0, h_xhat_e = 0;   // block entropies H(X̂^n)
};

namespace detail {

// Sum-over-children fold of a length q^n table into prefix levels
// levels[i][p] = P(prefix p of length i); levels[n] aliases the input.
inline std::vector<std::vector<double>> fold_prefix_levels(const std::vector<double>& full,
                                                           int n, int q) {
    std::vector<std::vector<double>> levels(std::size_t(n) + 1);
    levels[std::size_t(n)] = full;
    for (int i = n - 1; i >= 0; --i) {
        const auto& child = levels[std::size_t(i) + 1];
        auto& cur = levels[std::size_t(i)];
        cur.assign(child.size() / std::size_t(q), 0.0);
        for (std::size_t p = 0; p < cur.size(); ++p) {
            double s = 0;
            for (int a = 0; a < q; ++a) s += child[p * std::size_t(q) + a];
            cur[p] = s;
        }
    }
    return levels;
}

// Conditional of the next symbol after `prefix` read off prefix levels.
inline WeightVector level_conditional(const std::vector<std::vector<double>>& levels,
                                      int i, long long prefix, int q) {
    WeightVector out(q);
    for (int a = 0; a < q; ++a)
        out.w[std::size_t(a)] = levels[std::size_t(i) + 1][std::size_t(prefix) * q + a];
    out.normalize();  // throws impossible_path on a zero prefix
    return out;
}

// Walks the SC engine along a greedy positive-probability path and compares
// every conditional with the enumerated tables. Throws logic_error on drift.
inline void cross_check_engine(const std::vector<WeightVector>& leaves,
                               const std::vector<std::vector<double>>& levels, int n, int q,
                               double tol, const char* what) {
    ScProcess engine(leaves);
    long long prefix = 0;
    for (int i = 0; i < n; ++i) {
        const WeightVector we = engine.conditional();
        const WeightVector wt = level_conditional(levels, i, prefix, q);
        for (int a = 0; a < q; ++a)
            if (std::abs(we.w[std::size_t(a)] - wt.w[std::size_t(a)]) > tol)
                throw std::logic_error(std::string("SC recursion disagrees with exhaustive ") +
                                       what + " conditionals at index " + std::to_string(i) +
                                       ": " + fmt17g(we.w[std::size_t(a)]) + " vs " +
                                       fmt17g(wt.w[std::size_t(a)]));
        int pick = 0;
        for (int a = 0; a < q; ++a)
            if (wt.w[std::size_t(a)] > wt.w[std::size_t(pick)]) pick = a;
        engine.advance(pick);
        prefix = prefix * q + pick;
    }
}

inline double entropy_base_q(const std::vector<double>& table, int q) {
    return nats_to_base(entropy_nats(table.data(), table.size()), q);
}

}  // namespace detail

// One exhaustive pass over every positive-probability (x^n, y^n) and all u^n.
// Computes the exact Z/entropy profiles of the chain, the encoder-induced law
// (frozen symbols uniform i.i.d. or fixed to spec.u_F), the deterministic
// decoder's outputs, and every derived metric, with deterministic accumulation
// independent of the thread count.
inline OracleReport exact_sweep(const JointSource& src, const TestChannel& ch,
                                const PolarSpec& spec, const SweepOptions& opt = {}) {
    spec.validate();
    if (spec.q != ch.q) throw std::invalid_argument("exact_sweep: alphabet mismatch");
    if (src.nx != ch.nx || src.ny != ch.ny)
        throw std::invalid_argument("exact_sweep: source/channel dimension mismatch");
    check_oracle_guard(src, ch.q, spec.n);

    const int n = spec.n, q = spec.q;
    const int ns = src.nx * src.ny;
    const TransformTables tt = make_transform_tables(n, q);
    const long long qn = tt.qn;

    // index kind: 0 = information, 1 = frozen, 2 = marginal-decoded
    std::vector<int> kind(std::size_t(n), 0);
    std::vector<int> frozen_slot(std::size_t(n), -1);
    for (std::size_t j = 0; j < spec.F.size(); ++j) {
        kind[std::size_t(spec.F[j])] = 1;
        frozen_slot[std::size_t(spec.F[j])] = int(j);
    }
    for (int i : spec.D) kind[std::size_t(i)] = 2;

    // ---- global marginal chain -----------------------------------------
    const std::vector<double> prior = ch.reconstruction_prior(src);
    std::vector<double> tm(std::size_t(qn), 1.0);
    for (long long iu = 0; iu < qn; ++iu)
        for (int j = 0; j < n; ++j)
            tm[std::size_t(iu)] *= prior[tt.xh_digits[std::size_t(iu) * n + j]];
    const auto am = detail::fold_prefix_levels(tm, n, q);

    OracleReport rep;
    rep.n = n;
    rep.q = q;
    rep.Z_marg.assign(std::size_t(n), 0.0);
    for (int i = 0; i < n; ++i) {
        const auto& lvl = am[std::size_t(i) + 1];
        KahanSum z;
        for (std::size_t p = 0; p < lvl.size(); p += std::size_t(q)) {
            double s = 0, t = 0;
            for (int a = 0; a < q; ++a) {
                s += std::sqrt(lvl[p + std::size_t(a)]);
                t += lvl[p + std::size_t(a)];
            }
            z.add((s * s - t) / double(q - 1));
        }
        rep.Z_marg[std::size_t(i)] = std::clamp(z.get(), 0.0, 1.0);
    }
    for (int i : spec.D) rep.pe_bound += rep.Z_marg[std::size_t(i)];

    if (opt.cross_check_stride >= 0) {
        // marginal chain: engine vs enumeration, once (law is row-independent)
        detail::cross_check_engine(marginal_leaves(src, ch, n), am, n, q, opt.cross_check_tol,
                                   "marginal");
    }

    // Global per-u factor of the induced law: frozen factor times the product
    // of marginal-chain ratios at decoded positions. Zero numerators yield
    // probability zero; any mass defect is caught by the final total check.
    std::vector<double> md(std::size_t(qn), 1.0);
    if (!opt.skip_induced) {
        for (long long iu = 0; iu < qn; ++iu) {
            double prod = 1.0;
            long long pref = 0;
            for (int j = 0; j < n && prod > 0; ++j) {
                const int a = tt.u_digits[std::size_t(iu) * n + j];
                if (kind[std::size_t(j)] == 1) {
                    if (opt.mode == FrozenMode::averaged) prod /= double(q);
                    else if (spec.u_F[std::size_t(frozen_slot[std::size_t(j)])] != a) prod = 0.0;
                } else if (kind[std::size_t(j)] == 2) {
                    const double num = am[std::size_t(j) + 1][std::size_t(pref * q + a)];
                    prod = num == 0.0 ? 0.0 : prod * num / am[std::size_t(j)][std::size_t(pref)];
                }
                pref = pref * q + a;
            }
            md[std::size_t(iu)] = prod;
        }
    }

    // ---- deterministic decoder table -----------------------------------
    // û copies u on information/frozen positions and fills decoded positions
    // with the argmax of the marginal conditional given the decoded prefix
    // (ties to the smallest symbol). err marks û != u.
    std::vector<std::uint8_t> xhd_digits;
    std::vector<std::uint8_t> err;
    std::vector<long long> key(std::size_t(qn), 0);   // packed u at I ∪ F positions
    std::vector<long long> ixh(std::size_t(qn), 0);   // packed x̂ digits
    long long nkey = 1;
    for (int j = 0; j < n; ++j)
        if (kind[std::size_t(j)] != 2) nkey *= q;
    if (!opt.skip_induced) {
        xhd_digits.resize(std::size_t(qn) * n);
        err.assign(std::size_t(qn), 0);
        PrimeModulus mod(q);
        const auto g = kronecker_matrix(log2_exact(std::size_t(n)), mod);
        SymbolVector uh(std::size_t(n), 0);
        for (long long iu = 0; iu < qn; ++iu) {
            long long pref = 0;
            for (int j = 0; j < n; ++j) {
                int a = tt.u_digits[std::size_t(iu) * n + j];
                if (kind[std::size_t(j)] == 2) {
                    const auto& lvl = am[std::size_t(j) + 1];
                    int pick = 0;
                    for (int b = 1; b < q; ++b)
                        if (lvl[std::size_t(pref * q + b)] > lvl[std::size_t(pref * q + pick)])
                            pick = b;
                    if (pick != a) err[std::size_t(iu)] = 1;
                    a = pick;
                } else {
                    key[std::size_t(iu)] = key[std::size_t(iu)] * q +
                                           tt.u_digits[std::size_t(iu) * n + j];
                }
                uh[std::size_t(j)] = a;
                pref = pref * q + a;
            }
            const SymbolVector xhd = matrix_apply(uh, g, mod);
            for (int j = 0; j < n; ++j)
                xhd_digits[std::size_t(iu) * n + j] = std::uint8_t(xhd[std::size_t(j)]);
            long long px = 0;
            for (int j = 0; j < n; ++j) px = px * q + tt.xh_digits[std::size_t(iu) * n + j];
            ixh[std::size_t(iu)] = px;
        }
    }

    const DistortionMetric dist =
        opt.metric.nx > 0 ? opt.metric : DistortionMetric::hamming(src.nx, q);
    if (dist.nx != src.nx || dist.nq != q)
        throw std::invalid_argument("exact_sweep: distortion metric dimension mismatch");

    long long num_source = 1, num_y = 1;
    for (int j = 0; j < n; ++j) {
        num_source *= ns;
        num_y *= src.ny;
    }

    // ---- partitioned sweep over source realizations --------------------
    constexpr int kUnits = 16;
    struct UnitAcc {
        std::vector<KahanSum> zc, hc;  // per-index profile contributions
        KahanSum total_p, total_e, tv, pe, d_p, d_e, d_d, d_d_err, d_d_ok;
        std::vector<double> eq, yxh_p, yxh_e;  // distribution tables
        long long rows = 0;
    };
    std::vector<UnitAcc> units(kUnits);
    const long long rows_per_unit = (num_source + kUnits - 1) / kUnits;
    const long long stride = opt.cross_check_stride > 0
                                 ? opt.cross_check_stride
                                 : std::max<long long>(1, num_source / 32);

    run_units(kUnits, opt.threads, [&](int unit) {
        UnitAcc& acc = units[std::size_t(unit)];
        acc.zc.assign(std::size_t(n), KahanSum{});
        acc.hc.assign(std::size_t(n), KahanSum{});
        if (!opt.skip_induced) {
            acc.eq.assign(std::size_t(num_y * nkey), 0.0);
            acc.yxh_p.assign(std::size_t(num_y * qn), 0.0);
            acc.yxh_e.assign(std::size_t(num_y * qn), 0.0);
        }
        std::vector<std::uint8_t> sdig(std::size_t(n), 0);
        std::vector<double> t(std::size_t(qn), 0.0);
        std::vector<double> pe_row;
        std::vector<const double*> row_ch(std::size_t(n), nullptr);
        std::vector<std::array<double, kMaxQ>> row_d(std::size_t(n), std::array<double, kMaxQ>{});
        const long long lo = unit * rows_per_unit;
        const long long hi = std::min(num_source, lo + rows_per_unit);
        for (long long is = lo; is < hi; ++is) {
            long long rem = is;
            for (int j = n - 1; j >= 0; --j) {
                sdig[std::size_t(j)] = std::uint8_t(rem % ns);
                rem /= ns;
            }
            double pq = 1.0;
            for (int j = 0; j < n; ++j) pq *= src.Q[sdig[std::size_t(j)]];
            if (pq <= 0.0) continue;
            ++acc.rows;
            long long iy = 0;
            for (int j = 0; j < n; ++j) {
                row_ch[std::size_t(j)] = &ch.rows[std::size_t(sdig[std::size_t(j)]) * q];
                const int x = sdig[std::size_t(j)] / src.ny;
                for (int a = 0; a < q; ++a) row_d[std::size_t(j)][std::size_t(a)] = dist(x, a);
                iy = iy * src.ny + (sdig[std::size_t(j)] % src.ny);
            }
            // conditioned table and its prefix levels for this realization
            for (long long iu = 0; iu < qn; ++iu) {
                double w = 1.0;
                for (int j = 0; j < n; ++j)
                    w *= row_ch[std::size_t(j)][tt.xh_digits[std::size_t(iu) * n + j]];
                t[std::size_t(iu)] = w;
            }
            const auto levels = detail::fold_prefix_levels(t, n, q);
            for (int i = 0; i < n; ++i) {
                const auto& lvl = levels[std::size_t(i) + 1];
                double z = 0, h = 0;
                for (std::size_t p = 0; p < lvl.size(); p += std::size_t(q)) {
                    double s = 0, tot = 0;
                    for (int a = 0; a < q; ++a) {
                        s += std::sqrt(lvl[p + std::size_t(a)]);
                        tot += lvl[p + std::size_t(a)];
                    }
                    z += (s * s - tot) / double(q - 1);
                    if (tot > 0) {
                        for (int a = 0; a < q; ++a) {
                            const double b = lvl[p + std::size_t(a)];
                            if (b > 0) h -= b * std::log(b / tot);
                        }
                    }
                }
                acc.zc[std::size_t(i)].add(pq * z);
                acc.hc[std::size_t(i)].add(pq * h);
            }
            if ((is % stride) == 0 && opt.cross_check_stride >= 0) {
                SymbolVector xs(std::size_t(n), 0), ys(std::size_t(n), 0);
                for (int j = 0; j < n; ++j) {
                    xs[std::size_t(j)] = sdig[std::size_t(j)] / src.ny;
                    ys[std::size_t(j)] = sdig[std::size_t(j)] % src.ny;
                }
                detail::cross_check_engine(conditioned_leaves(ch, xs, ys), levels, n, q,
                                           opt.cross_check_tol, "conditioned");
            }
            if (opt.skip_induced) {
                for (long long iu = 0; iu < qn; ++iu) acc.total_p.add(pq * t[std::size_t(iu)]);
                continue;
            }
            // encoder-induced conditional for this realization
            pe_row.assign(std::size_t(qn), 0.0);
            for (long long iu = 0; iu < qn; ++iu) {
                double prod = md[std::size_t(iu)];
                if (prod == 0.0) continue;
                long long pref = 0;
                for (int j = 0; j < n; ++j) {
                    const int a = tt.u_digits[std::size_t(iu) * n + j];
                    if (kind[std::size_t(j)] == 0) {
                        const double num = levels[std::size_t(j) + 1][std::size_t(pref * q + a)];
                        if (num == 0.0) {
                            prod = 0.0;
                            break;
                        }
                        prod *= num / levels[std::size_t(j)][std::size_t(pref)];
                    }
                    pref = pref * q + a;
                }
                pe_row[std::size_t(iu)] = prod;
            }
            for (long long iu = 0; iu < qn; ++iu) {
                const double jp = pq * t[std::size_t(iu)];
                const double je = pq * pe_row[std::size_t(iu)];
                acc.total_p.add(jp);
                acc.total_e.add(je);
                acc.tv.add(std::abs(jp - je));
                double dval = 0, ddec = 0;
                for (int j = 0; j < n; ++j) {
                    dval += row_d[std::size_t(j)][tt.xh_digits[std::size_t(iu) * n + j]];
                    ddec += row_d[std::size_t(j)][xhd_digits[std::size_t(iu) * n + j]];
                }
                acc.d_p.add(jp * dval);
                acc.d_e.add(je * dval);
                acc.d_d.add(je * ddec);
                if (err[std::size_t(iu)]) {
                    acc.d_d_err.add(je * ddec);
                    acc.pe.add(je);
                } else {
                    acc.d_d_ok.add(je * ddec);
                }
                acc.eq[std::size_t(iy * nkey + key[std::size_t(iu)])] += je;
                acc.yxh_p[std::size_t(iy * qn + ixh[std::size_t(iu)])] += jp;
                acc.yxh_e[std::size_t(iy * qn + ixh[std::size_t(iu)])] += je;
            }
        }
    });

    // ---- ordered reduction ---------------------------------------------
    rep.Z_cond.assign(std::size_t(n), 0.0);
    rep.H_cond.assign(std::size_t(n), 0.0);
    for (int i = 0; i < n; ++i) {
        KahanSum z, h;
        for (int u = 0; u < kUnits; ++u) {
            z.add(units[std::size_t(u)].zc[std::size_t(i)].get());
            h.add(units[std::size_t(u)].hc[std::size_t(i)].get());
        }
        rep.Z_cond[std::size_t(i)] = std::clamp(z.get(), 0.0, 1.0);
        rep.H_cond[std::size_t(i)] = nats_to_base(h.get(), q);
    }
    KahanSum total_p, total_e, tv, pe, d_p, d_e, d_d, d_d_err, d_d_ok;
    for (int u = 0; u < kUnits; ++u) {
        total_p.add(units[std::size_t(u)].total_p.get());
        total_e.add(units[std::size_t(u)].total_e.get());
        tv.add(units[std::size_t(u)].tv.get());
        pe.add(units[std::size_t(u)].pe.get());
        d_p.add(units[std::size_t(u)].d_p.get());
        d_e.add(units[std::size_t(u)].d_e.get());
        d_d.add(units[std::size_t(u)].d_d.get());
        d_d_err.add(units[std::size_t(u)].d_d_err.get());
        d_d_ok.add(units[std::size_t(u)].d_d_ok.get());
    }
    rep.total_p = total_p.get();
    if (std::abs(rep.total_p - 1.0) > 1e-10)
        throw std::logic_error("exhaustive sweep: target law mass " + fmt17g(rep.total_p));
    for (int i : spec.F)
        rep.tv_bound += std::sqrt(std::max(
            0.0, 2.0 * std::log(2.0) * std::log2(double(q)) * (1.0 - rep.H_cond[std::size_t(i)])));
    if (opt.skip_induced) return rep;

    rep.total_e = total_e.get();
    if (std::abs(rep.total_e - 1.0) > 1e-10)
        throw std::logic_error("exhaustive sweep: induced law mass " + fmt17g(rep.total_e) +
                               " (frozen values likely incompatible with the source support)");
    rep.tv = tv.get();
    rep.pe = pe.get();
    rep.distortion_target = d_p.get() / n;
    rep.distortion_encoder = d_e.get() / n;
    rep.distortion_decoded = d_d.get() / n;
    rep.distortion_decoded_error_part = d_d_err.get() / n;
    rep.distortion_decoded_noerror_part = d_d_ok.get() / n;

    std::vector<double> eq(std::size_t(num_y * nkey), 0.0);
    std::vector<double> yxh_p(std::size_t(num_y * qn), 0.0);
    std::vector<double> yxh_e(std::size_t(num_y * qn), 0.0);
    for (int u = 0; u < kUnits; ++u) {
        if (units[std::size_t(u)].eq.empty()) continue;
        for (std::size_t j = 0; j < eq.size(); ++j) eq[j] += units[std::size_t(u)].eq[j];
        for (std::size_t j = 0; j < yxh_p.size(); ++j) {
            yxh_p[j] += units[std::size_t(u)].yxh_p[j];
            yxh_e[j] += units[std::size_t(u)].yxh_e[j];
        }
    }
    std::vector<double> eq_marg(std::size_t(nkey), 0.0);
    for (long long iy = 0; iy < num_y; ++iy)
        for (long long k2 = 0; k2 < nkey; ++k2)
            eq_marg[std::size_t(k2)] += eq[std::size_t(iy * nkey + k2)];
    std::vector<double> xh_m_p(std::size_t(qn), 0.0), xh_m_e(std::size_t(qn), 0.0);
    for (long long iy = 0; iy < num_y; ++iy)
        for (long long v = 0; v < qn; ++v) {
            xh_m_p[std::size_t(v)] += yxh_p[std::size_t(iy * qn + v)];
            xh_m_e[std::size_t(v)] += yxh_e[std::size_t(iy * qn + v)];
        }
    rep.equivocation =
        (detail::entropy_base_q(eq, q) - detail::entropy_base_q(eq_marg, q)) / n;
    rep.h_yxhat_p = detail::entropy_base_q(yxh_p, q);
    rep.h_yxhat_e = detail::entropy_base_q(yxh_e, q);
    rep.h_xhat_p = detail::entropy_base_q(xh_m_p, q);
    rep.h_xhat_e = detail::entropy_base_q(xh_m_e, q);
    rep.h_y_given_xhat_p = (rep.h_yxhat_p - rep.h_xhat_p) / n;
    rep.h_y_given_xhat_e = (rep.h_yxhat_e - rep.h_xhat_e) / n;
    return rep;
}

// Exact Z / conditional-entropy profiles only (induced-law work skipped).
inline OracleReport exact_z_profiles(const JointSource& src, const TestChannel& ch, int n,
                                     int threads = 0) {
    PolarSpec trivial;
    trivial.n = n;
    trivial.k = log2_exact(std::size_t(n));
    trivial.q = ch.q;
    trivial.I.resize(std::size_t(n));
    for (int i = 0; i < n; ++i) trivial.I[std::size_t(i)] = i;
    trivial.Z_cond.assign(std::size_t(n), 0.0);
    trivial.Z_marg.assign(std::size_t(n), 0.0);
    SweepOptions opt;
    opt.skip_induced = true;
    opt.threads = threads;
    return exact_sweep(src, ch, trivial, opt);
}

// Materialized encoder-induced law (same layout as enumerate_joint).
inline ExactDistribution exact_pe(const JointSource& src, const TestChannel& ch,
                                  const PolarSpec& spec,
                                  FrozenMode mode = FrozenMode::averaged) {
    spec.validate();
    check_oracle_guard(src, ch.q, spec.n);
    const int n = spec.n, q = spec.q;
    const int ns = src.nx * src.ny;
    const TransformTables tt = make_transform_tables(n, q);

    std::vector<int> kind(std::size_t(n), 0);
    std::vector<int> frozen_slot(std::size_t(n), -1);
    for (std::size_t j = 0; j < spec.F.size(); ++j) {
        kind[std::size_t(spec.F[j])] = 1;
        frozen_slot[std::size_t(spec.F[j])] = int(j);
    }
    for (int i : spec.D) kind[std::size_t(i)] = 2;

    const std::vector<double> prior = ch.reconstruction_prior(src);
    std::vector<double> tm(std::size_t(tt.qn), 1.0);
    for (long long iu = 0; iu < tt.qn; ++iu)
        for (int j = 0; j < n; ++j)
            tm[std::size_t(iu)] *= prior[tt.xh_digits[std::size_t(iu) * n + j]];
    const auto am = detail::fold_prefix_levels(tm, n, q);

    ExactDistribution dist;
    dist.n = n;
    dist.q = q;
    dist.nx = src.nx;
    dist.ny = src.ny;
    dist.num_u = tt.qn;
    dist.num_source = 1;
    for (int j = 0; j < n; ++j) dist.num_source *= ns;
    dist.p.assign(std::size_t(dist.num_source) * tt.qn, 0.0);

    std::vector<std::uint8_t> sdig(std::size_t(n), 0);
    std::vector<double> t(std::size_t(tt.qn), 0.0);
    for (long long is = 0; is < dist.num_source; ++is) {
        long long rem = is;
        for (int j = n - 1; j >= 0; --j) {
            sdig[std::size_t(j)] = std::uint8_t(rem % ns);
            rem /= ns;
        }
        double pq = 1.0;
        for (int j = 0; j < n; ++j) pq *= src.Q[sdig[std::size_t(j)]];
        if (pq <= 0.0) continue;
        for (long long iu = 0; iu < tt.qn; ++iu) {
            double w = 1.0;
            for (int j = 0; j < n; ++j)
                w *= ch.rows[std::size_t(sdig[std::size_t(j)]) * q +
                             tt.xh_digits[std::size_t(iu) * n + j]];
            t[std::size_t(iu)] = w;
        }
        const auto levels = detail::fold_prefix_levels(t, n, q);
        for (long long iu = 0; iu < tt.qn; ++iu) {
            double prod = pq;
            long long pref = 0;
            for (int j = 0; j < n && prod > 0; ++j) {
                const int a = tt.u_digits[std::size_t(iu) * n + j];
                if (kind[std::size_t(j)] == 0) {
                    const double num = levels[std::size_t(j) + 1][std::size_t(pref * q + a)];
                    prod = num == 0.0 ? 0.0 : prod * num / levels[std::size_t(j)][std::size_t(pref)];
                } else if (kind[std::size_t(j)] == 1) {
                    if (mode == FrozenMode::averaged) prod /= double(q);
                    else if (spec.u_F[std::size_t(frozen_slot[std::size_t(j)])] != a) prod = 0.0;
                } else {
                    const double num = am[std::size_t(j) + 1][std::size_t(pref * q + a)];
                    prod = num == 0.0 ? 0.0 : prod * num / am[std::size_t(j)][std::size_t(pref)];
                }
                pref = pref * q + a;
            }
            dist.p[std::size_t(is) * tt.qn + iu] = prod;
        }
    }
    return dist;
}

// ---- single-quantity wrappers (each runs one full sweep) ----------------

struct VariationalDistanceResult {
    double exact = 0;  // L1 distance
    double bound = 0;  // entropy-gap bound over the frozen set
};

inline VariationalDistanceResult exact_variational_distance(const JointSource& src,
                                                            const TestChannel& ch,
                                                            const PolarSpec& spec,
                                                            FrozenMode mode = FrozenMode::averaged) {
    SweepOptions opt;
    opt.mode = mode;
    const OracleReport rep = exact_sweep(src, ch, spec, opt);
    return {rep.tv, rep.tv_bound};
}

inline double exact_equivocation(const JointSource& src, const TestChannel& ch,
                                 const PolarSpec& spec, FrozenMode mode = FrozenMode::averaged) {
    SweepOptions opt;
    opt.mode = mode;
    return exact_sweep(src, ch, spec, opt).equivocation;
}

struct DistortionResult {
    double decoded = 0;  // E[d]/n against the decoder output
    double pe = 0;       // exact probability the decoded block differs
    double pe_bound = 0; // sum of marginal Bhattacharyya values over decoded set
};

inline DistortionResult exact_distortion(const JointSource& src, const TestChannel& ch,
                                         const PolarSpec& spec,
                                         FrozenMode mode = FrozenMode::averaged) {
    SweepOptions opt;
    opt.mode = mode;
    const OracleReport rep = exact_sweep(src, ch, spec, opt);
    return {rep.distortion_decoded, rep.pe, rep.pe_bound};
}

}  // namespace rde
