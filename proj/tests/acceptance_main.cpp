// End-to-end acceptance gate for the toolkit. Each criterion is an
// independent check with pinned tolerances; run one with --criterion N or all
// with no arguments. Output is one [PASS]/[FAIL] line per criterion (plus
// indented measurement detail); the exit code is nonzero if anything failed.
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "pinned_values.hpp"
#include "rde/codec.hpp"
#include "rde/oracle.hpp"
#include "rde/random.hpp"
#include "rde/region.hpp"
#include "rde/sc_process.hpp"
#include "rde/timeshare.hpp"

namespace {

using namespace rde;

std::string strf(const char* f, ...) {
    char buf[768];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return std::string(buf);
}

void verdict(int num, bool ok, const std::string& text) {
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", num, text.c_str());
    std::fflush(stdout);
}

void detail(const std::string& text) {
    std::printf("  %s\n", text.c_str());
    std::fflush(stdout);
}

struct ModelFixture {
    const char* name;
    JointSource src;
    TestChannel ch;
    int q;
};

std::vector<ModelFixture> model_fixtures() {
    return {{"dsbs", fx::dsbs(), fx::dsbs_ch(), 2},
            {"zsrc", fx::zsrc(), fx::zsrc_ch(), 2},
            {"tern", fx::tern(), fx::tern_ch(), 3}};
}

ModelFixture fixture_by_name(const std::string& name) {
    if (name == "dsbs") return {"dsbs", fx::dsbs(), fx::dsbs_ch(), 2};
    if (name == "zch") return {"zch", fx::zsrc(), fx::zsrc_ch(), 2};
    if (name == "tern") return {"tern", fx::tern(), fx::tern_ch(), 3};
    throw std::invalid_argument("unknown fixture: " + name);
}

SelectParams rank_params(double rate_target, double marg_threshold) {
    SelectParams p;
    p.mode = "rank";
    p.rate_target = rate_target;
    p.marg_threshold = marg_threshold;
    return p;
}

double h2_bits(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

// ---------------------------------------------------------------------------
// Criterion 1: the sequential-decomposition engine reproduces brute-force
// prefix conditionals at every index, on realization-conditioned chains and
// on the decoder's marginal chain. Exhaustive over all paths where the path
// count is small; sampled paths otherwise.

struct WalkStats {
    double worst = 0;
    long long cnt = 0;
};

void walk_paths(const std::vector<WeightVector>& leaves, const TransformTables& tt, int q,
                bool exhaustive, Rng& rng, WalkStats& st) {
    const int n = int(leaves.size());
    const ExactRealizationTable brute(leaves, tt);
    ScProcess engine(leaves);
    SymbolVector path;
    const long long reps = exhaustive ? tt.qn : 1;
    for (long long iu = 0; iu < reps; ++iu) {
        engine.reset(leaves);
        path.clear();
        for (int i = 0; i < n; ++i) {
            const WeightVector want = brute.conditional(path);
            const WeightVector got = engine.conditional();
            for (int a = 0; a < q; ++a) st.worst = std::max(st.worst, std::fabs(got[a] - want[a]));
            ++st.cnt;
            const Symbol next = exhaustive
                                    ? Symbol(tt.u_digits[std::size_t(iu) * std::size_t(n) + std::size_t(i)])
                                    : rng.sample(want);
            engine.advance(next);
            path.push_back(next);
        }
    }
}

bool criterion1() {
    const double tol = 1e-10;
    Rng rng(20260801);
    WalkStats st;
    for (const auto& f : model_fixtures()) {
        for (int n : {2, 4, 8}) {
            const TransformTables tt = make_transform_tables(n, f.q);
            const bool exhaustive = tt.qn <= 1024;
            for (int rep = 0; rep < 100; ++rep) {
                const auto [xs, ys] = sample_source(f.src, n, rng);
                walk_paths(conditioned_leaves(f.ch, xs, ys), tt, f.q, exhaustive, rng, st);
            }
            // decoder-side chain built from the reconstruction prior
            walk_paths(marginal_leaves(f.src, f.ch, n), tt, f.q, exhaustive, rng, st);
        }
    }
    const bool ok = st.worst <= tol;
    verdict(1, ok,
            strf("sequential conditionals match brute-force enumeration "
                 "(worst |diff| %.3e over %lld prefix checks, tol %.0e)",
                 st.worst, st.cnt, tol));
    return ok;
}

// ---------------------------------------------------------------------------
// Criterion 2: the block transform and its inverse are mutual inverses over
// every supported prime alphabet up to n = 256, and the binary transform is
// an involution.

bool criterion2() {
    Rng rng(7);
    long long vectors = 0, bad = 0;
    for (int q : {2, 3, 5}) {
        const PrimeModulus pm(q);
        for (int n = 2; n <= 256; n *= 2) {
            for (int rep = 0; rep < 1000; ++rep) {
                SymbolVector u(std::size_t(n), 0);
                for (auto& s : u) s = Symbol(rng.uniform_int(q));
                const SymbolVector x = polar_transform(u, pm);
                if (polar_inverse(x, pm) != u) ++bad;
                if (q == 2 && polar_transform(x, pm) != u) ++bad;
                ++vectors;
            }
        }
    }
    const bool ok = bad == 0;
    verdict(2, ok,
            strf("transform/inverse round-trip exact for q in {2,3,5} up to n=256 "
                 "(%lld vectors, %lld mismatches; binary involution included)",
                 vectors, bad));
    return ok;
}

// ---------------------------------------------------------------------------
// Criterion 3: the single-letter frontier machinery. The closed-form binary
// target point must match the direct-summation evaluation; the swept frontier
// must contain both degenerate corners; and a constrained minimum-rate query
// at the analytic operating point must land within 5e-3 of the analytic rate.

bool criterion3() {
    const JointSource src = fx::dsbs();
    const TestChannel ch = fx::dsbs_ch();
    const DistortionMetric dist = DistortionMetric::hamming(2, 2);
    const double p = 0.1, eps = 0.11;
    const double r_closed = 1.0 - h2_bits(eps);
    const double d_closed = eps;
    const double delta_closed = h2_bits(p * (1.0 - eps) + (1.0 - p) * eps);

    const OperatingPoint tp = target_point(src, ch, dist);
    const double terr = std::max({std::fabs(tp.R_star - r_closed), std::fabs(tp.D_star - d_closed),
                                  std::fabs(tp.Delta_star - delta_closed)});
    detail(strf("target point (R=%.15f D=%.15f Delta=%.15f), closed-form gap %.3e", tp.R_star,
                tp.D_star, tp.Delta_star, terr));

    const RegionFrontier fr = sweep_region(src, dist, 2, 20, 12);
    bool corner_zero_rate = false, corner_zero_dist = false;
    for (const auto& fp : fr.points) {
        if (fp.op.R_star <= 1e-9 && std::fabs(fp.op.Delta_star - 1.0) <= 1e-9)
            corner_zero_rate = true;
        if (fp.op.D_star <= 1e-9 && std::fabs(fp.op.R_star - 1.0) <= 1e-9 &&
            std::fabs(fp.op.Delta_star - h2_bits(p)) <= 1e-9)
            corner_zero_dist = true;
    }
    detail(strf("frontier: %lld points, zero-rate corner %s, zero-distortion corner %s",
                (long long)fr.points.size(), corner_zero_rate ? "present" : "MISSING",
                corner_zero_dist ? "present" : "MISSING"));

    const FrontierPoint qp = min_rate_at(src, dist, d_closed, delta_closed, fr, 12);
    const double qgap = std::fabs(qp.op.R_star - r_closed);
    detail(strf("constrained query at (D<=%.2f, Delta>=%.6f): R=%.6f vs analytic %.6f (gap %.2e)",
                d_closed, delta_closed, qp.op.R_star, r_closed, qgap));

    const bool ok = terr <= 1e-12 && corner_zero_rate && corner_zero_dist && qgap <= 5e-3;
    verdict(3, ok,
            strf("frontier target gap %.2e (tol 1e-12), corners %s, query rate gap %.2e (tol 5e-3)",
                 terr, (corner_zero_rate && corner_zero_dist) ? "present" : "missing", qgap));
    return ok;
}

// ---------------------------------------------------------------------------
// Criterion 4: Monte-Carlo distortion at long blocklengths. With rank-mode
// construction held within 0.1 of the analytic rate, the empirical distortion
// at n = 4096 must come within 0.02 of the analytic distortion, and the
// distortion must be nonincreasing across n in {256, 1024, 4096} up to the
// combined confidence half-widths.

bool criterion4() {
    const JointSource src = fx::dsbs();
    const TestChannel ch = fx::dsbs_ch();
    const DistortionMetric dist = DistortionMetric::hamming(2, 2);
    const double r_star = 1.0 - h2_bits(0.11), d_star = 0.11;
    const SelectParams sp = rank_params(0.55, 0.0);
    const long long samples = 10000, trials = 2000;

    std::vector<double> dn, hw;
    bool rate_ok = true;
    for (int n : {256, 1024, 4096}) {
        const PolarSpec spec = construct_sets(src, ch, n, sp, samples, 9000ull + n, 0);
        rate_ok = rate_ok && spec.rate() <= r_star + 0.1 + 1e-12;
        const ExperimentReport rep = run_trials(spec, src, ch, dist, FrozenPolicy::uniform, {},
                                                trials, 500ull + n, 0);
        dn.push_back(rep.distortion_mean);
        hw.push_back(rep.distortion_half_width);
        detail(strf("n=%4d rate=%.6f D_hat=%.6f (+-%.6f) pe_hat=%.6f", n, spec.rate(),
                    rep.distortion_mean, rep.distortion_half_width, rep.pe_hat));
    }
    const bool final_ok = dn.back() <= d_star + 0.02 + 1e-12;
    bool trend_ok = true;
    for (std::size_t i = 0; i + 1 < dn.size(); ++i) {
        const double slack = std::sqrt(hw[i] * hw[i] + hw[i + 1] * hw[i + 1]);
        if (dn[i + 1] > dn[i] + slack) trend_ok = false;
    }
    const bool ok = rate_ok && final_ok && trend_ok;
    verdict(4, ok,
            strf("empirical distortion D_hat(4096)=%.5f <= %.5f and nonincreasing in n "
                 "(%.5f -> %.5f -> %.5f), rates within budget: %s",
                 dn.back(), d_star + 0.02, dn[0], dn[1], dn[2], rate_ok ? "yes" : "NO"));
    return ok;
}

// ---------------------------------------------------------------------------
// Criterion 5: equivocation. The exact per-letter equivocation must dominate
// the induced conditional entropy of the private sequence given the public
// one, and its gap to the single-letter target must shrink as n doubles.

bool criterion5() {
    bool ok = true;
    for (const auto& f : model_fixtures()) {
        const std::vector<int> ns = (f.q == 3) ? std::vector<int>{2, 4} : std::vector<int>{2, 4, 8};
        const OperatingPoint tp = target_point(f.src, f.ch, DistortionMetric::hamming(f.src.nx, f.q));
        double prev_gap = std::numeric_limits<double>::infinity();
        std::string gaps;
        for (int n : ns) {
            const PolarSpec spec = fx::exact_spec(f.src, f.ch, n, rank_params((n - 1.0) / n, 0.0));
            const OracleReport r = exact_sweep(f.src, f.ch, spec);
            if (r.equivocation < r.h_y_given_xhat_e - 1e-12) ok = false;
            const double gap = std::fabs(tp.Delta_star - r.equivocation);
            if (!(gap < prev_gap)) ok = false;
            prev_gap = gap;
            gaps += strf(" n=%d:%.6f", n, gap);
        }
        detail(strf("%s Delta*=%.6f, |Delta* - Delta_n| gaps:%s", f.name, tp.Delta_star,
                    gaps.c_str()));
    }
    verdict(5, ok,
            "per-letter equivocation dominates the induced conditional entropy and its gap to "
            "the single-letter target shrinks as n doubles on every model");
    return ok;
}

// ---------------------------------------------------------------------------
// Criterion 6: decode-error probability. Exactly, on an eight-letter
// asymmetric run with a nonempty decoded set, the error probability must obey
// its additive bound; empirically at n = 4096 the estimated error rate must
// not exceed the constructed bound by more than three standard errors.

bool criterion6() {
    const JointSource src = fx::zsrc();
    const TestChannel ch = fx::zsrc_ch();
    const DistortionMetric dist = DistortionMetric::hamming(2, 2);
    const OperatingPoint tp = target_point(src, ch, dist);

    const PolarSpec spec8 = fx::exact_spec(src, ch, 8, rank_params(tp.R_star, 0.45));
    const OracleReport r = exact_sweep(src, ch, spec8);
    const bool exact_ok = !spec8.D.empty() && r.pe <= r.pe_bound + 1e-12;
    detail(strf("exact n=8: |I|=%lld |F|=%lld |D|=%lld Pe=%.15f bound=%.15f",
                (long long)spec8.I.size(), (long long)spec8.F.size(), (long long)spec8.D.size(),
                r.pe, r.pe_bound));

    SelectParams th;  // threshold mode, beta 0.3
    const PolarSpec big = construct_sets(src, ch, 4096, th, 10000, 616001, 0);
    double zsum = 0;
    for (int i : big.D) zsum += big.Z_marg[std::size_t(i)];
    const ExperimentReport rep = run_trials(big, src, ch, dist, FrozenPolicy::uniform, {}, 2000,
                                            616002, 0);
    const double sigma = rep.pe_half_width / 1.96;
    const bool mc_ok = rep.pe_hat <= zsum + 3.0 * sigma + 1e-12;
    detail(strf("n=4096: |I|=%lld |F|=%lld |D|=%lld pe_hat=%.6f bound(sum Z_marg)=%.6f sigma=%.6f",
                (long long)big.I.size(), (long long)big.F.size(), (long long)big.D.size(),
                rep.pe_hat, zsum, sigma));

    const bool ok = exact_ok && mc_ok;
    verdict(6, ok,
            strf("decode error within the additive bound (exact %.6f <= %.6f; "
                 "empirical %.6f <= %.6f + 3 sigma)",
                 r.pe, r.pe_bound, rep.pe_hat, zsum));
    return ok;
}

// ---------------------------------------------------------------------------
// Criterion 7: variational distance between the target law and the
// encoder-induced law. The additive bound must hold on every exact run, the
// distance must fall strictly with n when a single worst index is frozen, and
// it must fall across the range when the frozen set grows proportionally.

struct TvPoint {
    int n = 0;
    double tv = 0, bound = 0;
};

TvPoint tv_at(const ModelFixture& f, int n, double rate_target) {
    const PolarSpec spec = fx::exact_spec(f.src, f.ch, n, rank_params(rate_target, 0.0));
    const OracleReport r = exact_sweep(f.src, f.ch, spec);
    return {n, r.tv, r.tv_bound};
}

bool criterion7() {
    bool ok = true;
    for (const auto& f : model_fixtures()) {
        const std::vector<int> ns = (f.q == 3) ? std::vector<int>{2, 4} : std::vector<int>{2, 4, 8};

        // one frozen index per block
        std::vector<TvPoint> one;
        for (int n : ns) one.push_back(tv_at(f, n, (n - 1.0) / n));
        std::string ln = strf("%s single-frozen tv:", f.name);
        for (const auto& t : one) {
            if (t.tv > t.bound + 1e-12) ok = false;
            ln += strf(" n=%d:%.6f(<=%.6f)", t.n, t.tv, t.bound);
        }
        detail(ln);
        for (std::size_t i = 0; i + 1 < one.size(); ++i)
            if (!(one[i + 1].tv < one[i].tv)) ok = false;

        // frozen set growing with n (|F| = max(n/4, 1))
        std::vector<TvPoint> prop;
        for (int n : ns) {
            const int nf = std::max(n / 4, 1);
            prop.push_back(tv_at(f, n, double(n - nf) / n));
        }
        ln = strf("%s proportional-frozen tv:", f.name);
        for (const auto& t : prop) {
            if (t.tv > t.bound + 1e-12) ok = false;
            ln += strf(" n=%d:%.6f(<=%.6f)", t.n, t.tv, t.bound);
        }
        detail(ln);
        if (!(prop[1].tv < prop[0].tv)) ok = false;
        if (!(prop.back().tv < prop.front().tv)) ok = false;
    }
    verdict(7, ok,
            "induced law approaches the target law: the additive variational-distance bound "
            "holds on every run and the distance falls with n in both freezing schedules");
    return ok;
}

// ---------------------------------------------------------------------------
// Criterion 8: the decoded-distortion decomposition. On every exact run the
// decoded distortion must not exceed the target distortion plus the worst
// per-letter cost of a decode error or law mismatch.

bool criterion8() {
    bool ok = true;
    double worst_margin = std::numeric_limits<double>::infinity();
    for (const auto& pr : pins::runs()) {
        const ModelFixture f = fixture_by_name(pr.fixture);
        const PolarSpec spec =
            fx::exact_spec(f.src, f.ch, pr.n, rank_params(pr.rate_target, pr.marg_threshold));
        const OracleReport r = exact_sweep(f.src, f.ch, spec);
        const DistortionMetric dist = DistortionMetric::hamming(f.src.nx, f.q);
        const double rhs = r.distortion_target + dist.d_max * (r.pe + r.tv) / pr.n;
        const double margin = rhs - r.distortion_decoded;
        worst_margin = std::min(worst_margin, margin);
        if (r.distortion_decoded > rhs + 1e-12) ok = false;
        detail(strf("%s n=%d: decoded %.9f <= target %.9f + (pe+tv)/n %.9f (margin %.3e)",
                    pr.fixture, pr.n, r.distortion_decoded, r.distortion_target,
                    dist.d_max * (r.pe + r.tv) / pr.n, margin));
    }
    verdict(8, ok,
            strf("decoded distortion obeys the decomposition bound on all %lld exact runs "
                 "(worst margin %.3e)",
                 (long long)pins::runs().size(), worst_margin));
    return ok;
}

// ---------------------------------------------------------------------------
// Criterion 9: time-sharing over frozen values. The plan selected from a full
// frozen-value ensemble must satisfy both relaxed targets when re-evaluated
// from scratch, and on a symmetric model the ensemble must be constant with a
// single-vector plan.

bool criterion9() {
    bool ok = true;

    {  // asymmetric model, |F| = 3, epsilon = 0.01
        const JointSource src = fx::zsrc();
        const TestChannel ch = fx::zsrc_ch();
        const OperatingPoint tp = target_point(src, ch, DistortionMetric::hamming(2, 2));
        const double d_t = tp.D_star + 0.01, del_t = tp.Delta_star - 0.01;
        PolarSpec spec = fx::exact_spec(src, ch, 8, rank_params(5.0 / 8, 0.0));
        const auto ens = evaluate_frozen_ensemble(src, ch, spec);
        if (ens.size() != 8) ok = false;
        const TimeSharePlan plan = select_plan(ens, d_t, del_t);
        if (plan.is_pair) ok = false;
        // the winner must sit at the ensemble's minimum distortion (which of
        // several ulp-identical copies wins is implementation-defined)
        double ens_min_d = 1e30;
        for (const auto& pt : ens) ens_min_d = std::min(ens_min_d, pt.D_n);
        if (std::fabs(plan.d_combined - ens_min_d) > 1e-12) ok = false;
        // re-evaluate the chosen frozen vector from scratch
        spec.u_F = plan.u_F1;
        SweepOptions fixed;
        fixed.mode = FrozenMode::fixed;
        const OracleReport r = exact_sweep(src, ch, spec, fixed);
        if (std::fabs(r.distortion_decoded - plan.d_combined) > 1e-12) ok = false;
        if (std::fabs(r.equivocation - plan.delta_combined) > 1e-12) ok = false;
        if (!(r.distortion_decoded <= d_t + 1e-9 && r.equivocation >= del_t - 1e-9)) ok = false;
        detail(strf("zsrc |F|=3: plan u_F=(%d,%d,%d) D=%.9f (<=%.9f) Delta=%.9f (>=%.9f)",
                    plan.u_F1[0], plan.u_F1[1], plan.u_F1[2], r.distortion_decoded, d_t,
                    r.equivocation, del_t));
    }

    {  // symmetric model: every frozen choice is equivalent
        const JointSource src = fx::dsbs();
        const TestChannel ch = fx::dsbs_ch();
        const OperatingPoint tp = target_point(src, ch, DistortionMetric::hamming(2, 2));
        const double d_t = tp.D_star + 0.05, del_t = tp.Delta_star - 0.05;
        PolarSpec spec = fx::exact_spec(src, ch, 8, rank_params(6.0 / 8, 0.0));
        const auto ens = evaluate_frozen_ensemble(src, ch, spec);
        if (ens.size() != 4) ok = false;
        double dmin = 1e30, dmax = -1e30, emin = 1e30, emax = -1e30;
        for (const auto& pt : ens) {
            dmin = std::min(dmin, pt.D_n);
            dmax = std::max(dmax, pt.D_n);
            emin = std::min(emin, pt.Delta_n);
            emax = std::max(emax, pt.Delta_n);
        }
        const double spread = std::max(dmax - dmin, emax - emin);
        if (spread > 1e-10) ok = false;
        const TimeSharePlan plan = select_plan(ens, d_t, del_t);
        if (plan.is_pair) ok = false;
        if (plan.u_F1.size() != 2) ok = false;
        spec.u_F = plan.u_F1;
        SweepOptions fixed;
        fixed.mode = FrozenMode::fixed;
        const OracleReport r = exact_sweep(src, ch, spec, fixed);
        if (std::fabs(r.distortion_decoded - plan.d_combined) > 1e-12) ok = false;
        if (!(r.distortion_decoded <= d_t + 1e-9 && r.equivocation >= del_t - 1e-9)) ok = false;
        detail(strf("dsbs |F|=2: ensemble spread %.3e, plan u_F=(%d,%d) D=%.9f Delta=%.9f",
                    spread, plan.u_F1[0], plan.u_F1[1], r.distortion_decoded, r.equivocation));
    }

    verdict(9, ok,
            "time-sharing plans meet both relaxed targets after independent re-evaluation; the "
            "symmetric ensemble is constant and yields a single-vector plan");
    return ok;
}

// ---------------------------------------------------------------------------
// Criterion 10: construction rate. Under threshold selection the rate |I|/n
// must stay within 0.15 of the analytic rate for every n in {2^8..2^12} and
// its gap must shrink as n grows.

bool criterion10() {
    const JointSource src = fx::dsbs();
    const TestChannel ch = fx::dsbs_ch();
    const double r_star = 1.0 - h2_bits(0.11);
    SelectParams th;  // threshold mode
    // beta 0.25 keeps the freezing threshold loose enough that the finite-n
    // rate sits inside the band at n=256 while still tightening with n
    th.beta = 0.25;
    std::vector<double> gaps;
    bool within = true;
    std::string ln;
    for (int n : {256, 512, 1024, 2048, 4096}) {
        const PolarSpec spec = construct_sets(src, ch, n, th, 10000, 31000ull + n, 0);
        const double gap = std::fabs(spec.rate() - r_star);
        gaps.push_back(gap);
        if (gap > 0.15) within = false;
        ln += strf(" n=%d:R=%.4f(gap %.4f)", n, spec.rate(), gap);
    }
    detail(strf("analytic rate %.6f;%s", r_star, ln.c_str()));
    bool shrink = gaps.back() < gaps.front();
    for (std::size_t i = 0; i + 1 < gaps.size(); ++i)
        if (gaps[i + 1] > gaps[i] + 1e-12) shrink = false;
    const bool ok = within && shrink;
    verdict(10, ok,
            strf("construction rate within 0.15 of the analytic rate at every n and the gap "
                 "shrinks with n (%.4f -> %.4f)",
                 gaps.front(), gaps.back()));
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    int which = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            which = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
            return 2;
        }
    }
    if (which < 0 || which > 10) {
        std::fprintf(stderr, "criterion number must be 1..10\n");
        return 2;
    }
    using Fn = bool (*)();
    const Fn fns[10] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                        criterion6, criterion7, criterion8, criterion9, criterion10};
    bool all = true;
    for (int k = 1; k <= 10; ++k) {
        if (which != 0 && which != k) continue;
        bool ok = false;
        try {
            ok = fns[k - 1]();
        } catch (const std::exception& e) {
            std::printf("[FAIL] criterion %d: unexpected exception: %s\n", k, e.what());
        }
        all = all && ok;
    }
    return all ? 0 : 1;
}
