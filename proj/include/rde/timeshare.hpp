#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rde/construction.hpp"
#include "rde/io.hpp"
#include "rde/oracle.hpp"
#include "rde/source_model.hpp"

namespace rde {

// The ensemble average misses the requested target, so no derandomized plan
// can be guaranteed; a larger blocklength or looser epsilon is needed.
struct precondition_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exact performance of one frozen vector.
struct FrozenPoint {
    SymbolVector u_F;
    double D_n = 0;      // exact decoded distortion per letter
    double Delta_n = 0;  // exact equivocation per letter, base q
};

// Either one frozen vector or a timeshared pair with weight alpha on the first.
struct TimeSharePlan {
    bool is_pair = false;
    SymbolVector u_F1, u_F2;
    double alpha = 1.0;
    double d_combined = 0, delta_combined = 0;

    void assert_meets(double d_target, double delta_target) const {
        if (d_combined > d_target + 1e-9 || delta_combined < delta_target - 1e-9)
            throw std::logic_error("timeshare plan violates its target invariant");
    }
};

// Exact (D_n, Delta_n) for every frozen vector, in lexicographic u_F order.
inline std::vector<FrozenPoint> evaluate_frozen_ensemble(const JointSource& src,
                                                         const TestChannel& ch,
                                                         const PolarSpec& spec,
                                                         long long limit = 4096,
                                                         int threads = 0) {
    spec.validate();
    double count_d = std::pow(double(spec.q), double(spec.F.size()));
    if (count_d > double(limit))
        throw limit_error("frozen ensemble has " + fmt17g(count_d) + " vectors, limit " +
                          std::to_string(limit));
    const long long count = (long long)std::llround(count_d);
    std::vector<FrozenPoint> points;
    points.reserve(std::size_t(count));
    PolarSpec work = spec;
    SweepOptions opt;
    opt.mode = FrozenMode::fixed;
    opt.threads = threads;
    for (long long v = 0; v < count; ++v) {
        long long rem = v;
        work.u_F.assign(spec.F.size(), 0);
        for (int j = int(spec.F.size()) - 1; j >= 0; --j) {
            work.u_F[std::size_t(j)] = Symbol(rem % spec.q);
            rem /= spec.q;
        }
        const OracleReport rep = exact_sweep(src, ch, work, opt);
        points.push_back({work.u_F, rep.distortion_decoded, rep.equivocation});
    }
    return points;
}

namespace detail {

inline double cross(const FrozenPoint& o, const FrozenPoint& a, const FrozenPoint& b) {
    return (a.D_n - o.D_n) * (b.Delta_n - o.Delta_n) - (a.Delta_n - o.Delta_n) * (b.D_n - o.D_n);
}

// Full convex hull (Andrew monotone chain) of the (D_n, Delta_n) points,
// counterclockwise, without the duplicated closing vertex.
inline std::vector<FrozenPoint> convex_hull(std::vector<FrozenPoint> pts) {
    std::sort(pts.begin(), pts.end(), [](const FrozenPoint& a, const FrozenPoint& b) {
        if (a.D_n != b.D_n) return a.D_n < b.D_n;
        return a.Delta_n < b.Delta_n;
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const FrozenPoint& a, const FrozenPoint& b) {
                              return a.D_n == b.D_n && a.Delta_n == b.Delta_n;
                          }),
              pts.end());
    const std::size_t m = pts.size();
    if (m <= 2) return pts;
    std::vector<FrozenPoint> hull(2 * m);
    std::size_t h = 0;
    for (std::size_t i = 0; i < m; ++i) {  // lower chain
        while (h >= 2 && cross(hull[h - 2], hull[h - 1], pts[i]) <= 0) --h;
        hull[h++] = pts[i];
    }
    const std::size_t lower = h + 1;
    for (std::size_t i = m - 1; i-- > 0;) {  // upper chain
        while (h >= lower && cross(hull[h - 2], hull[h - 1], pts[i]) <= 0) --h;
        hull[h++] = pts[i];
    }
    hull.resize(h - 1);
    return hull;
}

// Feasible alpha interval of  alpha*p + (1-alpha)*r  against the target
// (D <= dt, Delta >= det), intersected with [0,1]; empty -> lo > hi.
inline std::pair<double, double> alpha_interval(const FrozenPoint& p, const FrozenPoint& r,
                                                double dt, double det) {
    double lo = 0.0, hi = 1.0;
    auto apply = [&](double coeff, double rhs, bool upper) {
        // upper: coeff*alpha <= rhs; lower: coeff*alpha >= rhs
        if (!upper) {
            coeff = -coeff;
            rhs = -rhs;
        }
        if (coeff > 0) hi = std::min(hi, rhs / coeff);
        else if (coeff < 0) lo = std::max(lo, rhs / coeff);
        else if (rhs < -1e-12) lo = 1.0, hi = -1.0;  // constant constraint violated
    };
    apply(p.D_n - r.D_n, dt - r.D_n, true);
    apply(p.Delta_n - r.Delta_n, det - r.Delta_n, false);
    return {lo, hi};
}

}  // namespace detail

// Derandomization: pick one frozen vector if some point already meets the
// target, otherwise timeshare along a convex-hull edge that crosses into the
// target quadrant (minimal feasible weight). Requires the ensemble average to
// meet the target, which is what the averaged guarantees promise.
inline TimeSharePlan select_plan(const std::vector<FrozenPoint>& points, double d_target,
                                 double delta_target) {
    if (points.empty()) throw std::invalid_argument("select_plan: no points");
    KahanSum sd, sdel;
    for (const auto& p : points) {
        sd.add(p.D_n);
        sdel.add(p.Delta_n);
    }
    const double avg_d = sd.get() / double(points.size());
    const double avg_del = sdel.get() / double(points.size());
    if (avg_d > d_target + 1e-12 || avg_del < delta_target - 1e-12)
        throw precondition_error(
            "select_plan: ensemble average (" + fmt17g(avg_d) + ", " + fmt17g(avg_del) +
            ") misses the target (" + fmt17g(d_target) + ", " + fmt17g(delta_target) + ")");

    const FrozenPoint* single = nullptr;
    for (const auto& p : points) {
        if (p.D_n > d_target + 1e-12 || p.Delta_n < delta_target - 1e-12) continue;
        if (!single || p.D_n < single->D_n ||
            (p.D_n == single->D_n && p.Delta_n > single->Delta_n))
            single = &p;  // ties beyond (min D, max Delta) keep the first = lex least u_F
    }
    TimeSharePlan plan;
    if (single) {
        plan.u_F1 = single->u_F;
        plan.d_combined = single->D_n;
        plan.delta_combined = single->Delta_n;
        plan.assert_meets(d_target, delta_target);
        return plan;
    }

    const std::vector<FrozenPoint> hull = detail::convex_hull(points);
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const FrozenPoint& p = hull[i];
        const FrozenPoint& r = hull[(i + 1) % hull.size()];
        auto [lo, hi] = detail::alpha_interval(p, r, d_target, delta_target);
        if (lo > hi + 1e-12) continue;
        const double alpha = std::clamp(lo, 0.0, 1.0);
        plan.is_pair = true;
        plan.u_F1 = p.u_F;
        plan.u_F2 = r.u_F;
        plan.alpha = alpha;
        plan.d_combined = alpha * p.D_n + (1 - alpha) * r.D_n;
        plan.delta_combined = alpha * p.Delta_n + (1 - alpha) * r.Delta_n;
        plan.assert_meets(d_target, delta_target);
        return plan;
    }
    throw std::logic_error(
        "select_plan: average meets the target but no vertex or hull edge does");
}

// Hull of the (D_n, Delta_n) cloud in traversal order (used for reporting and
// for the pair-selection scan above).
inline std::vector<FrozenPoint> ensemble_hull(const std::vector<FrozenPoint>& points) {
    return detail::convex_hull(points);
}

inline std::string ensemble_csv(const std::vector<FrozenPoint>& points) {
    std::ostringstream out;
    const std::size_t nf = points.empty() ? 0 : points.front().u_F.size();
    for (std::size_t j = 0; j < nf; ++j) out << "uF_" << j << ',';
    out << "D_n,Delta_n\r\n";
    for (const auto& p : points) {
        for (Symbol s : p.u_F) out << s << ',';
        out << fmt17g(p.D_n) << ',' << fmt17g(p.Delta_n) << "\r\n";
    }
    return out.str();
}

}  // namespace rde
