#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "rde/construction.hpp"
#include "rde/parallel.hpp"
#include "rde/prime_field.hpp"
#include "rde/random.hpp"
#include "rde/sc_process.hpp"
#include "rde/source_model.hpp"
#include "rde/transform.hpp"

namespace rde {

// Transmitted payload: the u symbols at information positions, ascending index.
struct Message {
    SymbolVector u_I;
};

struct EncodeResult {
    SymbolVector u;  // full input vector u^n
    Message msg;
};

namespace detail {

inline std::vector<int> index_kinds(const PolarSpec& spec) {
    // 0 = information, 1 = frozen, 2 = decoder-filled
    std::vector<int> kind(std::size_t(spec.n), 0);
    for (int i : spec.F) kind[std::size_t(i)] = 1;
    for (int i : spec.D) kind[std::size_t(i)] = 2;
    return kind;
}

}  // namespace detail

// Randomized successive encoder: information symbols are drawn from the
// conditioned chain, decoder-filled symbols from the marginal chain, frozen
// symbols copied from u_F. Consumes `rng` for the random draws.
inline EncodeResult encode_with_rng(const PolarSpec& spec, const JointSource& src,
                                    const TestChannel& ch, const SymbolVector& xs,
                                    const SymbolVector& ys, const SymbolVector& u_F, Rng& rng) {
    spec.validate();
    if (int(xs.size()) != spec.n || int(ys.size()) != spec.n)
        throw std::invalid_argument("encode: source sequence length mismatch");
    if (u_F.size() != spec.F.size())
        throw std::invalid_argument("encode: frozen vector length mismatch");
    const std::vector<int> kind = detail::index_kinds(spec);
    ScProcess cond(conditioned_leaves(ch, xs, ys));
    ScProcess marg(marginal_leaves(src, ch, spec.n));
    EncodeResult out;
    out.u.resize(std::size_t(spec.n));
    out.msg.u_I.reserve(spec.I.size());
    std::size_t f_at = 0;
    for (int i = 0; i < spec.n; ++i) {
        Symbol u;
        if (kind[std::size_t(i)] == 0) {
            u = rng.sample(cond.conditional());
            out.msg.u_I.push_back(u);
        } else if (kind[std::size_t(i)] == 1) {
            u = u_F[f_at++];
        } else {
            u = rng.sample(marg.conditional());
        }
        cond.advance(u);
        marg.advance(u);
        out.u[std::size_t(i)] = u;
    }
    return out;
}

inline EncodeResult encode(const PolarSpec& spec, const JointSource& src, const TestChannel& ch,
                           const SymbolVector& xs, const SymbolVector& ys,
                           const SymbolVector& u_F, unsigned long long seed) {
    Rng rng(seed);
    return encode_with_rng(spec, src, ch, xs, ys, u_F, rng);
}

struct DecodeResult {
    SymbolVector u_hat;
    SymbolVector x_hat;
};

// Deterministic successive decoder: copies message/frozen symbols and fills
// each remaining position with the argmax of the marginal conditional given
// the decoded prefix (ties -> smallest symbol), then maps to x̂^n.
inline DecodeResult decode(const PolarSpec& spec, const JointSource& src, const TestChannel& ch,
                           const Message& msg, const SymbolVector& u_F) {
    spec.validate();
    if (msg.u_I.size() != spec.I.size())
        throw std::invalid_argument("decode: message length mismatch");
    if (u_F.size() != spec.F.size())
        throw std::invalid_argument("decode: frozen vector length mismatch");
    const std::vector<int> kind = detail::index_kinds(spec);
    ScProcess marg(marginal_leaves(src, ch, spec.n));
    DecodeResult out;
    out.u_hat.resize(std::size_t(spec.n));
    std::size_t i_at = 0, f_at = 0;
    for (int i = 0; i < spec.n; ++i) {
        Symbol u;
        if (kind[std::size_t(i)] == 0) {
            u = msg.u_I[i_at++];
        } else if (kind[std::size_t(i)] == 1) {
            u = u_F[f_at++];
        } else {
            const WeightVector w = marg.conditional();
            int pick = 0;
            for (int a = 1; a < spec.q; ++a)
                if (w.w[std::size_t(a)] > w.w[std::size_t(pick)]) pick = a;
            u = pick;
        }
        if (u < 0 || u >= spec.q) throw std::invalid_argument("decode: symbol out of range");
        marg.advance(u);
        out.u_hat[std::size_t(i)] = u;
    }
    out.x_hat = polar_transform(out.u_hat, PrimeModulus(spec.q));
    return out;
}

enum class FrozenPolicy { fixed, uniform, zero };

inline FrozenPolicy frozen_policy_from_string(const std::string& s) {
    if (s == "fixed") return FrozenPolicy::fixed;
    if (s == "uniform") return FrozenPolicy::uniform;
    if (s == "zero") return FrozenPolicy::zero;
    throw std::invalid_argument("unknown frozen policy: " + s);
}

struct TrialRecord {
    long long index = 0;
    unsigned long long seed = 0;  // derived per-trial stream seed
    double distortion = 0;        // d(x^n, x̂^n)/n
    bool mismatch = false;        // û^n != u^n
};

struct ExperimentReport {
    int n = 0, q = 0;
    double rate = 0;  // |I|/n
    long long trials = 0;
    unsigned long long seed = 0;
    std::string frozen_policy;
    double distortion_mean = 0, distortion_half_width = 0;
    double pe_hat = 0, pe_half_width = 0;
    double equivocation_proxy = 0;  // pooled per-letter empirical H(Y|X̂), base q
    std::vector<TrialRecord> records;  // filled only when requested
};

// Batch runner. Per trial: draw frozen values by policy, sample a source block,
// encode, decode, score. Trial t uses the generator stream derived from
// (seed, t) whatever the thread count, so reports are bit-reproducible and any
// single trial can be replayed in isolation.
inline ExperimentReport run_trials(const PolarSpec& spec, const JointSource& src,
                                   const TestChannel& ch, const DistortionMetric& metric,
                                   FrozenPolicy policy, const SymbolVector& u_F_fixed,
                                   long long trials, unsigned long long seed, int threads = 0,
                                   bool keep_records = false) {
    spec.validate();
    if (trials < 1) throw std::invalid_argument("run_trials: trials must be >= 1");
    if (metric.nx != src.nx || metric.nq != spec.q)
        throw std::invalid_argument("run_trials: distortion metric dimension mismatch");
    if (policy == FrozenPolicy::fixed && u_F_fixed.size() != spec.F.size())
        throw std::invalid_argument("run_trials: fixed frozen vector length mismatch");

    constexpr int kUnits = 256;
    struct UnitAcc {
        KahanSum d_sum, d_sq, err;
        std::vector<double> yx_counts;  // (y, x̂) letter-pair counts
        std::vector<TrialRecord> records;
    };
    std::vector<UnitAcc> units(kUnits);
    const int ny = src.ny, q = spec.q;
    run_units(kUnits, threads, [&](int unit) {
        UnitAcc& acc = units[std::size_t(unit)];
        acc.yx_counts.assign(std::size_t(ny) * q, 0.0);
        for (long long t = unit; t < trials; t += kUnits) {
            const unsigned long long tseed = derive_seed(seed, (unsigned long long)t);
            Rng rng(tseed);
            SymbolVector u_F;
            if (policy == FrozenPolicy::fixed) u_F = u_F_fixed;
            else if (policy == FrozenPolicy::zero) u_F.assign(spec.F.size(), 0);
            else {
                u_F.resize(spec.F.size());
                for (auto& s : u_F) s = rng.uniform_int(q);
            }
            auto [xs, ys] = sample_source(src, spec.n, rng);
            const EncodeResult enc = encode_with_rng(spec, src, ch, xs, ys, u_F, rng);
            const DecodeResult dec = decode(spec, src, ch, enc.msg, u_F);
            double dsum = 0;
            for (int j = 0; j < spec.n; ++j) {
                dsum += metric(xs[std::size_t(j)], dec.x_hat[std::size_t(j)]);
                acc.yx_counts[std::size_t(ys[std::size_t(j)]) * q +
                              dec.x_hat[std::size_t(j)]] += 1.0;
            }
            const double dn = dsum / spec.n;
            const bool mismatch = dec.u_hat != enc.u;
            acc.d_sum.add(dn);
            acc.d_sq.add(dn * dn);
            acc.err.add(mismatch ? 1.0 : 0.0);
            if (keep_records) acc.records.push_back({t, tseed, dn, mismatch});
        }
    });

    ExperimentReport rep;
    rep.n = spec.n;
    rep.q = q;
    rep.rate = spec.rate();
    rep.trials = trials;
    rep.seed = seed;
    rep.frozen_policy = policy == FrozenPolicy::fixed    ? "fixed"
                        : policy == FrozenPolicy::uniform ? "uniform"
                                                          : "zero";
    KahanSum d_sum, d_sq, err;
    std::vector<double> yx(std::size_t(ny) * q, 0.0);
    for (int u = 0; u < kUnits; ++u) {
        d_sum.add(units[std::size_t(u)].d_sum.get());
        d_sq.add(units[std::size_t(u)].d_sq.get());
        err.add(units[std::size_t(u)].err.get());
        for (std::size_t j = 0; j < yx.size(); ++j) yx[j] += units[std::size_t(u)].yx_counts[j];
    }
    const double tn = double(trials);
    rep.distortion_mean = d_sum.get() / tn;
    rep.pe_hat = err.get() / tn;
    if (trials > 1) {
        const double var =
            std::max(0.0, (d_sq.get() - d_sum.get() * d_sum.get() / tn) / (tn - 1.0));
        rep.distortion_half_width = 1.96 * std::sqrt(var / tn);
        rep.pe_half_width = 1.96 * std::sqrt(rep.pe_hat * (1.0 - rep.pe_hat) / tn);
    }
    // pooled empirical H(Y|X̂) = H(Y,X̂) - H(X̂), base q
    std::vector<double> xm(std::size_t(q), 0.0);
    for (int y = 0; y < ny; ++y)
        for (int a = 0; a < q; ++a) xm[std::size_t(a)] += yx[std::size_t(y) * q + a];
    rep.equivocation_proxy = nats_to_base(
        entropy_nats(yx.data(), yx.size()) - entropy_nats(xm.data(), xm.size()), q);
    if (keep_records) {
        // records in trial order regardless of the unit partition
        std::vector<TrialRecord> all;
        all.reserve(std::size_t(trials));
        for (int u = 0; u < kUnits; ++u)
            for (const auto& r : units[std::size_t(u)].records) all.push_back(r);
        std::sort(all.begin(), all.end(),
                  [](const TrialRecord& a, const TrialRecord& b) { return a.index < b.index; });
        rep.records = std::move(all);
    }
    return rep;
}

}  // namespace rde
