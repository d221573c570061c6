#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rde/io.hpp"
#include "rde/oracle.hpp"  // limit_error
#include "rde/parallel.hpp"
#include "rde/source_model.hpp"

namespace rde {

// The request itself is outside the achievable range (e.g. privacy above H(Y)).
struct infeasible_request : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// The request is plausible but no swept point satisfies it.
struct no_feasible_point : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FrontierPoint {
    OperatingPoint op;
    TestChannel channel;
};

struct RegionFrontier {
    int nx = 0, ny = 0, q = 0;
    int grid_res = 0, refine_iters = 0;
    std::vector<FrontierPoint> points;  // non-dominated, sorted by (R, D)
};

namespace detail {

// All length-q tuples of nonnegative integers summing to res, lexicographic.
inline std::vector<std::vector<int>> simplex_compositions(int res, int q) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(std::size_t(q), 0);
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == q - 1) {
            cur[std::size_t(pos)] = left;
            out.push_back(cur);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            cur[std::size_t(pos)] = v;
            rec(pos + 1, left - v);
        }
    };
    rec(0, res);
    return out;
}

// Monotone staircase over (D, Delta): keeps, for the points inserted so far,
// the maximal Delta achievable at each distortion level. Used to prune
// dominated (R, D, Delta) triples after sorting by rate.
class DominanceStaircase {
  public:
    explicit DominanceStaircase(double tol) : tol_(tol) {}

    bool dominated(double D, double Delta) const {
        auto it = stairs_.upper_bound(D + tol_);
        if (it == stairs_.begin()) return false;
        --it;
        return it->second >= Delta - tol_;
    }

    void insert(double D, double Delta) {
        auto it = stairs_.lower_bound(D);
        while (it != stairs_.end() && it->second <= Delta) it = stairs_.erase(it);
        stairs_[D] = Delta;
    }

  private:
    double tol_;
    std::map<double, double> stairs_;  // D -> best Delta among D' <= D
};

// One full pass of accept-if-improving pairwise mass moves on every channel
// row, repeated until no move helps; step sizes halve each round. Minimizes
// rate subject to distortion/privacy caps. Returns the achieved rate.
inline double refine_rows(const JointSource& src, const DistortionMetric& dist, int q,
                          std::vector<double>& rows, double d_cap, double delta_floor,
                          int refine_iters) {
    double best_r = operating_point_from_rows(src, rows.data(), q, dist).R_star;
    const int ns = src.nx * src.ny;
    for (int t = 1; t <= refine_iters; ++t) {
        const double step = std::pow(0.5, t);
        for (int sweep = 0; sweep < 100; ++sweep) {
            bool improved = false;
            for (int s = 0; s < ns; ++s) {
                const int x = s / src.ny, y = s % src.ny;
                if (src.prob(x, y) <= 0) continue;
                for (int a = 0; a < q; ++a) {
                    for (int b = 0; b < q; ++b) {
                        if (a == b) continue;
                        const double m = std::min(step, rows[std::size_t(s) * q + a]);
                        if (m <= 0) continue;
                        rows[std::size_t(s) * q + a] -= m;
                        rows[std::size_t(s) * q + b] += m;
                        const OperatingPoint op =
                            operating_point_from_rows(src, rows.data(), q, dist);
                        if (op.R_star < best_r - 1e-15 && op.D_star <= d_cap + 1e-12 &&
                            op.Delta_star >= delta_floor - 1e-12) {
                            best_r = op.R_star;
                            improved = true;
                        } else {
                            rows[std::size_t(s) * q + a] += m;
                            rows[std::size_t(s) * q + b] -= m;
                        }
                    }
                }
            }
            if (!improved) break;
        }
    }
    return best_r;
}

}  // namespace detail

// Exhaustive simplex-grid sweep of test channels, keeping the non-dominated
// (R, D, Delta) achievers (smaller rate, smaller distortion, larger privacy),
// each then tightened by local descent on rate at its own (D, Delta).
inline RegionFrontier sweep_region(const JointSource& src, const DistortionMetric& dist, int q,
                                   int grid_res = 20, int refine_iters = 12,
                                   long long budget = 2000000, int threads = 0) {
    if (src.nx * src.ny > 16 || q > 5)
        throw limit_error("sweep_region: alphabet dimensions exceed the exhaustive-grid bound");
    if (dist.nx != src.nx || dist.nq != q)
        throw std::invalid_argument("sweep_region: distortion metric dimension mismatch");
    if (grid_res < 1) throw std::invalid_argument("sweep_region: grid_res must be >= 1");
    const auto comps = detail::simplex_compositions(grid_res, q);
    const long long nc = (long long)comps.size();
    const int ns = src.nx * src.ny;
    // channel rows at zero-probability source pairs do not affect any metric;
    // pin them to the first composition instead of multiplying the sweep
    std::vector<int> free_rows;
    for (int s = 0; s < ns; ++s)
        if (src.Q[std::size_t(s)] > 0) free_rows.push_back(s);
    long long total = 1;
    for (std::size_t j = 0; j < free_rows.size(); ++j) {
        if (total > budget / nc + 1) {
            total = budget + 1;
            break;
        }
        total *= nc;
    }
    if (total > budget)
        throw limit_error("sweep_region: grid has more than " + std::to_string(budget) +
                          " channels; lower grid_res");

    std::vector<double> R(std::size_t(total), 0.0), D(std::size_t(total), 0.0), Del(std::size_t(total), 0.0);
    auto rows_for = [&](long long g, std::vector<double>& rows) {
        std::fill(rows.begin(), rows.end(), 0.0);
        for (int s = 0; s < ns; ++s) rows[std::size_t(s) * q] = 1.0;
        long long rem = g;
        for (std::size_t j = 0; j < free_rows.size(); ++j) {
            const auto& c = comps[std::size_t(rem % nc)];
            rem /= nc;
            const int s = free_rows[j];
            for (int a = 0; a < q; ++a)
                rows[std::size_t(s) * q + a] = double(c[std::size_t(a)]) / grid_res;
        }
    };
    constexpr int kUnits = 16;
    const long long per_unit = (total + kUnits - 1) / kUnits;
    run_units(kUnits, threads, [&](int unit) {
        std::vector<double> rows(std::size_t(ns) * q, 0.0);
        const long long lo = unit * per_unit, hi = std::min(total, lo + per_unit);
        for (long long g = lo; g < hi; ++g) {
            rows_for(g, rows);
            const OperatingPoint op = operating_point_from_rows(src, rows.data(), q, dist);
            R[std::size_t(g)] = op.R_star;
            D[std::size_t(g)] = op.D_star;
            Del[std::size_t(g)] = op.Delta_star;
        }
    });

    std::vector<long long> order(std::size_t(total), 0);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](long long a, long long b) {
        if (R[std::size_t(a)] != R[std::size_t(b)]) return R[std::size_t(a)] < R[std::size_t(b)];
        if (D[std::size_t(a)] != D[std::size_t(b)]) return D[std::size_t(a)] < D[std::size_t(b)];
        if (Del[std::size_t(a)] != Del[std::size_t(b)])
            return Del[std::size_t(a)] > Del[std::size_t(b)];
        return a < b;
    });
    constexpr double kTol = 1e-9;
    detail::DominanceStaircase stairs(kTol);
    std::vector<long long> kept;
    for (long long g : order) {
        if (stairs.dominated(D[std::size_t(g)], Del[std::size_t(g)])) continue;
        stairs.insert(D[std::size_t(g)], Del[std::size_t(g)]);
        kept.push_back(g);
    }

    RegionFrontier frontier;
    frontier.nx = src.nx;
    frontier.ny = src.ny;
    frontier.q = q;
    frontier.grid_res = grid_res;
    frontier.refine_iters = refine_iters;
    std::vector<double> rows(std::size_t(ns) * q, 0.0);
    for (long long g : kept) {
        rows_for(g, rows);
        const OperatingPoint coarse = operating_point_from_rows(src, rows.data(), q, dist);
        detail::refine_rows(src, dist, q, rows, coarse.D_star, coarse.Delta_star, refine_iters);
        FrontierPoint pt;
        pt.channel = TestChannel(src.nx, src.ny, q, rows);
        pt.op = target_point(src, pt.channel, dist);
        frontier.points.push_back(std::move(pt));
    }
    // refinement can introduce new dominance; prune once more
    std::sort(frontier.points.begin(), frontier.points.end(),
              [](const FrontierPoint& a, const FrontierPoint& b) {
                  if (a.op.R_star != b.op.R_star) return a.op.R_star < b.op.R_star;
                  if (a.op.D_star != b.op.D_star) return a.op.D_star < b.op.D_star;
                  return a.op.Delta_star > b.op.Delta_star;
              });
    detail::DominanceStaircase stairs2(kTol);
    std::vector<FrontierPoint> pruned;
    for (auto& pt : frontier.points) {
        if (stairs2.dominated(pt.op.D_star, pt.op.Delta_star)) continue;
        stairs2.insert(pt.op.D_star, pt.op.Delta_star);
        pruned.push_back(std::move(pt));
    }
    frontier.points = std::move(pruned);
    return frontier;
}

// Minimal-rate stored point meeting (D <= D_max, Delta >= Delta_min), with a
// final descent pass against the query constraints themselves so the answer
// can slide off the grid toward the true boundary.
inline FrontierPoint min_rate_at(const JointSource& src, const DistortionMetric& dist,
                                 double D_max, double Delta_min, const RegionFrontier& frontier,
                                 int refine_iters = 12) {
    if (frontier.nx != src.nx || frontier.ny != src.ny)
        throw std::invalid_argument("min_rate_at: frontier was computed for another source");
    const std::vector<double> my = src.marginal_y();
    const double hy = nats_to_base(entropy_nats(my.data(), my.size()), frontier.q);
    if (D_max < 0)
        throw infeasible_request("min_rate_at: negative distortion target is unachievable");
    if (Delta_min > hy + 1e-12)
        throw infeasible_request("min_rate_at: privacy target exceeds H(Y) = " + fmt17g(hy));
    const FrontierPoint* best = nullptr;
    for (const auto& pt : frontier.points) {
        if (pt.op.D_star > D_max + 1e-12 || pt.op.Delta_star < Delta_min - 1e-12) continue;
        if (!best || pt.op.R_star < best->op.R_star) best = &pt;
    }
    if (!best)
        throw no_feasible_point("min_rate_at: no swept channel meets (D <= " + fmt17g(D_max) +
                                ", Delta >= " + fmt17g(Delta_min) + "); try a finer grid");
    std::vector<double> rows = best->channel.rows;
    detail::refine_rows(src, dist, frontier.q, rows, D_max, Delta_min, refine_iters);
    FrontierPoint out;
    out.channel = TestChannel(src.nx, src.ny, frontier.q, rows);
    out.op = target_point(src, out.channel, dist);
    if (out.op.R_star > best->op.R_star + 1e-12)
        throw std::logic_error("min_rate_at: refinement increased the rate");
    return out;
}

// CSV export: one row per frontier point; channel columns are the conditional
// probabilities P(x̂=a | x, y) in (x, y, a) lexicographic order.
inline std::string frontier_csv(const RegionFrontier& f) {
    std::ostringstream out;
    out << "R,D,Delta";
    for (int x = 0; x < f.nx; ++x)
        for (int y = 0; y < f.ny; ++y)
            for (int a = 0; a < f.q; ++a) out << ",p_x" << x << "_y" << y << "_a" << a;
    out << "\r\n";
    for (const auto& pt : f.points) {
        out << fmt17g(pt.op.R_star) << ',' << fmt17g(pt.op.D_star) << ','
            << fmt17g(pt.op.Delta_star);
        for (double v : pt.channel.rows) out << ',' << fmt17g(v);
        out << "\r\n";
    }
    return out.str();
}

}  // namespace rde
