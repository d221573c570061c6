#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fixtures.hpp"
#include "rde/codec.hpp"
#include "rde/oracle.hpp"
#include "rde/transform.hpp"

using namespace rde;
using Catch::Approx;

namespace {

PolarSpec all_information_spec(int n, int q) {
    PolarSpec spec;
    spec.n = n;
    spec.k = log2_exact(std::size_t(n));
    spec.q = q;
    spec.Z_cond.assign(std::size_t(n), 0.5);
    spec.Z_marg.assign(std::size_t(n), 0.5);
    for (int i = 0; i < n; ++i) spec.I.push_back(i);
    return spec;
}

}  // namespace

TEST_CASE("message round-trips exactly when nothing is decoder-filled") {
    const JointSource src = fx::dsbs();
    const TestChannel ch = fx::dsbs_ch();
    const PolarSpec spec = all_information_spec(8, 2);
    Rng rng(4);
    const auto [xs, ys] = sample_source(src, 8, rng);
    const EncodeResult enc = encode(spec, src, ch, xs, ys, {}, 99);
    REQUIRE(enc.msg.u_I == enc.u);
    const DecodeResult dec = decode(spec, src, ch, enc.msg, {});
    REQUIRE(dec.u_hat == enc.u);
    REQUIRE(dec.x_hat == polar_transform(enc.u, PrimeModulus(2)));
}

TEST_CASE("deterministic channel forces the inverse-transform input") {
    const JointSource src = fx::dsbs();
    const TestChannel ident(2, 2, 2, {1, 0, 1, 0, 0, 1, 0, 1});  // x̂ = x surely
    const PolarSpec spec = all_information_spec(16, 2);
    Rng rng(21);
    const auto [xs, ys] = sample_source(src, 16, rng);
    const EncodeResult enc = encode(spec, src, ident, xs, ys, {}, 5);
    const PrimeModulus mod(2);
    REQUIRE(enc.u == polar_inverse(xs, mod));
    const DecodeResult dec = decode(spec, src, ident, enc.msg, {});
    REQUIRE(dec.x_hat == xs);  // zero distortion
}

TEST_CASE("deterministic-channel batch reports zero distortion and zero error") {
    const JointSource src = fx::dsbs();
    const TestChannel ident(2, 2, 2, {1, 0, 1, 0, 0, 1, 0, 1});
    const PolarSpec spec = all_information_spec(8, 2);
    const DistortionMetric h2 = DistortionMetric::hamming(2, 2);
    const ExperimentReport rep =
        run_trials(spec, src, ident, h2, FrozenPolicy::fixed, {}, 400, 31);
    REQUIRE(rep.distortion_mean == 0.0);
    REQUIRE(rep.pe_hat == 0.0);
}

TEST_CASE("decoder breaks marginal ties toward the smallest symbol") {
    // dsbs reconstruction prior is exactly (1/2, 1/2): a pure tie.
    const JointSource src = fx::dsbs();
    const TestChannel ch = fx::dsbs_ch();
    PolarSpec spec;
    spec.n = 1;
    spec.k = 0;
    spec.q = 2;
    spec.D = {0};
    spec.Z_cond = {0.5};
    spec.Z_marg = {0.5};
    const DecodeResult dec = decode(spec, src, ch, Message{}, {});
    REQUIRE(dec.u_hat == SymbolVector{0});
    REQUIRE(dec.x_hat == SymbolVector{0});
}

TEST_CASE("encode and decode validate their inputs") {
    const JointSource src = fx::dsbs();
    const TestChannel ch = fx::dsbs_ch();
    const PolarSpec spec = all_information_spec(4, 2);
    REQUIRE_THROWS_AS(encode(spec, src, ch, {0, 1}, {0, 1}, {}, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(encode(spec, src, ch, {0, 1, 0, 1}, {0, 1, 0, 1}, {0}, 1),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(decode(spec, src, ch, Message{{0, 1}}, {}), std::invalid_argument);
    REQUIRE_THROWS_AS(decode(spec, src, ch, Message{{0, 1, 0, 1}}, {0}), std::invalid_argument);
}

TEST_CASE("trial batches are reproducible and thread-count independent") {
    const JointSource src = fx::zsrc();
    const TestChannel ch = fx::zsrc_ch();
    const DistortionMetric h2 = DistortionMetric::hamming(2, 2);
    SelectParams p;
    p.mode = "rank";
    p.rate_target = 0.5;
    p.marg_threshold = 0.45;
    const PolarSpec spec = fx::exact_spec(src, ch, 8, p);
    const SymbolVector uf(spec.F.size(), 0);

    const ExperimentReport a =
        run_trials(spec, src, ch, h2, FrozenPolicy::uniform, uf, 600, 11, 1, true);
    const ExperimentReport b =
        run_trials(spec, src, ch, h2, FrozenPolicy::uniform, uf, 600, 11, 3, true);
    REQUIRE(a.distortion_mean == b.distortion_mean);  // bitwise, not approximate
    REQUIRE(a.pe_hat == b.pe_hat);
    REQUIRE(a.equivocation_proxy == b.equivocation_proxy);
    REQUIRE(a.records.size() == 600);
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        REQUIRE(a.records[i].index == (long long)i);
        REQUIRE(a.records[i].seed == b.records[i].seed);
        REQUIRE(a.records[i].distortion == b.records[i].distortion);
        REQUIRE(a.records[i].mismatch == b.records[i].mismatch);
    }

    const ExperimentReport c =
        run_trials(spec, src, ch, h2, FrozenPolicy::uniform, uf, 600, 12, 1, true);
    REQUIRE(a.distortion_mean != c.distortion_mean);
}

TEST_CASE("any single trial can be replayed from its recorded seed") {
    const JointSource src = fx::dsbs();
    const TestChannel ch = fx::dsbs_ch();
    const DistortionMetric h2 = DistortionMetric::hamming(2, 2);
    SelectParams p;
    p.mode = "rank";
    p.rate_target = 0.5;
    p.marg_threshold = 0.25;
    const PolarSpec spec = fx::exact_spec(src, ch, 8, p);
    const SymbolVector uf(spec.F.size(), 1);
    const ExperimentReport rep =
        run_trials(spec, src, ch, h2, FrozenPolicy::fixed, uf, 50, 1234, 0, true);
    for (const TrialRecord& r : {rep.records[7], rep.records[31], rep.records[49]}) {
        Rng rng(r.seed);
        const auto [xs, ys] = sample_source(src, spec.n, rng);
        const EncodeResult enc = encode_with_rng(spec, src, ch, xs, ys, uf, rng);
        const DecodeResult dec = decode(spec, src, ch, enc.msg, uf);
        double dsum = 0;
        for (int j = 0; j < spec.n; ++j) dsum += h2(xs[std::size_t(j)], dec.x_hat[std::size_t(j)]);
        REQUIRE(dsum / spec.n == r.distortion);
        REQUIRE((dec.u_hat != enc.u) == r.mismatch);
    }
}

TEST_CASE("empirical means match the exact sweep within confidence bands") {
    const JointSource src = fx::dsbs();
    const TestChannel ch = fx::dsbs_ch();
    const DistortionMetric h2 = DistortionMetric::hamming(2, 2);
    SelectParams p;
    p.mode = "rank";
    p.rate_target = 0.5;
    p.marg_threshold = 0.25;
    PolarSpec spec = fx::exact_spec(src, ch, 4, p);
    spec.u_F.assign(spec.F.size(), 0);

    SweepOptions fixed_opt;
    fixed_opt.mode = FrozenMode::fixed;
    const OracleReport exact_fixed = exact_sweep(src, ch, spec, fixed_opt);
    const ExperimentReport emp_fixed =
        run_trials(spec, src, ch, h2, FrozenPolicy::fixed, spec.u_F, 20000, 2024);
    REQUIRE(std::abs(emp_fixed.distortion_mean - exact_fixed.distortion_decoded) <
            3.0 * std::max(emp_fixed.distortion_half_width, 1e-4));
    REQUIRE(std::abs(emp_fixed.pe_hat - exact_fixed.pe) <
            3.0 * std::max(emp_fixed.pe_half_width, 1e-4));

    SweepOptions avg_opt;  // frozen symbols averaged uniformly
    const OracleReport exact_avg = exact_sweep(src, ch, spec, avg_opt);
    const ExperimentReport emp_avg =
        run_trials(spec, src, ch, h2, FrozenPolicy::uniform, {}, 20000, 77);
    REQUIRE(std::abs(emp_avg.distortion_mean - exact_avg.distortion_decoded) <
            3.0 * std::max(emp_avg.distortion_half_width, 1e-4));
    REQUIRE(std::abs(emp_avg.pe_hat - exact_avg.pe) <
            3.0 * std::max(emp_avg.pe_half_width, 1e-4));
}

TEST_CASE("frozen policy parsing") {
    REQUIRE(frozen_policy_from_string("fixed") == FrozenPolicy::fixed);
    REQUIRE(frozen_policy_from_string("uniform") == FrozenPolicy::uniform);
    REQUIRE(frozen_policy_from_string("zero") == FrozenPolicy::zero);
    REQUIRE_THROWS_AS(frozen_policy_from_string("coinflip"), std::invalid_argument);
}

TEST_CASE("report carries the run description") {
    const JointSource src = fx::dsbs();
    const TestChannel ch = fx::dsbs_ch();
    const DistortionMetric h2 = DistortionMetric::hamming(2, 2);
    const PolarSpec spec = all_information_spec(4, 2);
    const ExperimentReport rep =
        run_trials(spec, src, ch, h2, FrozenPolicy::zero, {}, 64, 5);
    REQUIRE(rep.n == 4);
    REQUIRE(rep.q == 2);
    REQUIRE(rep.rate == Approx(1.0));
    REQUIRE(rep.trials == 64);
    REQUIRE(rep.seed == 5);
    REQUIRE(rep.frozen_policy == "zero");
    REQUIRE(rep.records.empty());
    REQUIRE(rep.equivocation_proxy >= 0.0);
    REQUIRE(rep.equivocation_proxy <= 1.0 + 1e-12);
    REQUIRE_THROWS_AS(run_trials(spec, src, ch, h2, FrozenPolicy::fixed, {}, 0, 5),
                      std::invalid_argument);
}
