#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "rde/io.hpp"
#include "rde/parallel.hpp"
#include "rde/prime_field.hpp"
#include "rde/random.hpp"
#include "rde/sc_process.hpp"
#include "rde/source_model.hpp"
#include "rde/weight_vector.hpp"

namespace rde {

// A constructed code: blocklength, alphabet, index partition and the Z profile
// that produced it. Indices are 0-based and each set is stored sorted.
struct PolarSpec {
    int n = 0, k = 0, q = 0;
    std::vector<int> I, F, D;
    std::vector<double> Z_cond, Z_marg;
    double beta = 0.3;
    SymbolVector u_F;  // frozen values, aligned with F in ascending index order
    std::string mode = "threshold";  // threshold | rank
    long long num_samples = 0;
    unsigned long long seed = 0;

    double rate() const { return n > 0 ? double(I.size()) / n : 0.0; }

    void validate() const {
        (void)PrimeModulus(q);  // throws unless q is prime
        if (n < 1 || !is_power_of_two(n) || (1 << k) != n)
            throw std::invalid_argument("PolarSpec: n must equal 2^k");
        std::vector<char> seen(std::size_t(n), 0);
        auto mark = [&](const std::vector<int>& s, const char* name) {
            if (!std::is_sorted(s.begin(), s.end()))
                throw std::invalid_argument(std::string("PolarSpec: ") + name + " not sorted");
            for (int i : s) {
                if (i < 0 || i >= n) throw std::invalid_argument("PolarSpec: index out of range");
                if (seen[std::size_t(i)]++)
                    throw std::invalid_argument("PolarSpec: index sets overlap");
            }
        };
        mark(I, "I");
        mark(F, "F");
        mark(D, "D");
        if (I.size() + F.size() + D.size() != std::size_t(n))
            throw std::invalid_argument("PolarSpec: I, F, D must cover all indices");
        if (Z_cond.size() != std::size_t(n) || Z_marg.size() != std::size_t(n))
            throw std::invalid_argument("PolarSpec: Z profile length mismatch");
        for (int i = 0; i < n; ++i)
            if (Z_cond[std::size_t(i)] < 0 || Z_cond[std::size_t(i)] > 1 ||
                Z_marg[std::size_t(i)] < 0 || Z_marg[std::size_t(i)] > 1)
                throw std::invalid_argument("PolarSpec: Z estimate outside [0,1]");
        if (u_F.size() != F.size())
            throw std::invalid_argument("PolarSpec: u_F length must equal |F|");
        for (Symbol s : u_F)
            if (s < 0 || s >= q) throw std::invalid_argument("PolarSpec: u_F symbol out of range");
        if (!(beta > 0.0 && beta < 1.0))
            throw std::invalid_argument("PolarSpec: beta must lie in (0,1)");
    }
};

inline double delta_threshold(int n, double beta) {
    return std::exp2(-std::pow(double(n), beta));
}

// Set-selection policy; shared between Monte-Carlo construction and exact
// small-n evaluation so both paths pick identical partitions from a Z profile.
struct SelectParams {
    std::string mode = "threshold";  // threshold | rank
    double beta = 0.3;
    double rate_target = 0.5;        // rank: |I| = round(n * rate_target)
    double marg_threshold = -1.0;    // rank: D eligibility cutoff; < 0 → 2^{-n^beta}
};

// Fills I/F/D (and zeroed u_F) from the Z profile already present in spec.
inline void select_sets_from_z(PolarSpec& spec, const SelectParams& p) {
    const int n = spec.n;
    const double delta = delta_threshold(n, p.beta);
    spec.beta = p.beta;
    spec.mode = p.mode;
    spec.I.clear();
    spec.F.clear();
    spec.D.clear();
    if (p.mode == "threshold") {
        for (int i = 0; i < n; ++i) {
            if (spec.Z_cond[std::size_t(i)] >= 1.0 - delta) spec.F.push_back(i);
            else if (spec.Z_marg[std::size_t(i)] <= delta) spec.D.push_back(i);
            else spec.I.push_back(i);
        }
    } else if (p.mode == "rank") {
        if (p.rate_target < 0.0 || p.rate_target > 1.0)
            throw std::invalid_argument("rank mode: rate_target must lie in [0,1]");
        const int nI = int(std::lround(n * p.rate_target));
        const double mt = p.marg_threshold < 0 ? delta : p.marg_threshold;
        std::vector<int> cand;
        for (int i = 0; i < n; ++i)
            if (spec.Z_marg[std::size_t(i)] <= mt) cand.push_back(i);
        std::stable_sort(cand.begin(), cand.end(), [&](int a, int b) {
            return spec.Z_marg[std::size_t(a)] < spec.Z_marg[std::size_t(b)];
        });
        const int nD = std::min<int>(int(cand.size()), n - nI);
        spec.D.assign(cand.begin(), cand.begin() + nD);
        std::sort(spec.D.begin(), spec.D.end());
        std::vector<int> rest;
        for (int i = 0; i < n; ++i)
            if (!std::binary_search(spec.D.begin(), spec.D.end(), i)) rest.push_back(i);
        std::stable_sort(rest.begin(), rest.end(), [&](int a, int b) {
            return spec.Z_cond[std::size_t(a)] > spec.Z_cond[std::size_t(b)];
        });
        const int nF = n - nI - nD;
        spec.F.assign(rest.begin(), rest.begin() + nF);
        std::sort(spec.F.begin(), spec.F.end());
        for (int i = 0; i < n; ++i)
            if (!std::binary_search(spec.D.begin(), spec.D.end(), i) &&
                !std::binary_search(spec.F.begin(), spec.F.end(), i))
                spec.I.push_back(i);
    } else {
        throw std::invalid_argument("unknown construction mode: " + p.mode);
    }
    spec.u_F.assign(spec.F.size(), 0);
    spec.validate();
}

// Monte-Carlo Z profile: sample (x^n, y^n), run the conditioned and marginal
// chains in lockstep along a path drawn from the conditioned law, and average
// the per-index Bhattacharyya values of both conditionals. Work is split into
// fixed chunks with per-sample generator streams, so results are identical for
// any thread count.
inline PolarSpec construct_sets(const JointSource& src, const TestChannel& ch, int n,
                                const SelectParams& params, long long num_samples,
                                unsigned long long seed, int threads = 0) {
    if (num_samples < 1) throw std::invalid_argument("construct_sets: num_samples must be >= 1");
    if (n < 1 || !is_power_of_two(n))
        throw std::invalid_argument("construct_sets: n must be a power of two");
    PolarSpec spec;
    spec.n = n;
    spec.k = log2_exact(n);
    spec.q = ch.q;
    spec.num_samples = num_samples;
    spec.seed = seed;

    constexpr int kUnits = 256;
    const std::vector<WeightVector> marg = marginal_leaves(src, ch, n);
    std::vector<std::vector<KahanSum>> zc_unit(kUnits), zm_unit(kUnits);
    run_units(kUnits, threads, [&](int unit) {
        auto& zc = zc_unit[std::size_t(unit)];
        auto& zm = zm_unit[std::size_t(unit)];
        zc.assign(std::size_t(n), KahanSum{});
        zm.assign(std::size_t(n), KahanSum{});
        ScProcess cond_proc, marg_proc;
        for (long long s = unit; s < num_samples; s += kUnits) {
            Rng rng(derive_seed(seed, (unsigned long long)s));
            auto [xs, ys] = sample_source(src, n, rng);
            cond_proc.reset(conditioned_leaves(ch, xs, ys));
            marg_proc.reset(marg);
            for (int i = 0; i < n; ++i) {
                const WeightVector wc = cond_proc.conditional();
                const WeightVector wm = marg_proc.conditional();
                zc[std::size_t(i)].add(bhattacharyya_conditional(wc));
                zm[std::size_t(i)].add(bhattacharyya_conditional(wm));
                const Symbol u = rng.sample(wc);
                cond_proc.advance(u);
                marg_proc.advance(u);
            }
        }
    });
    spec.Z_cond.assign(std::size_t(n), 0.0);
    spec.Z_marg.assign(std::size_t(n), 0.0);
    for (int i = 0; i < n; ++i) {
        KahanSum tc, tm;
        for (int u = 0; u < kUnits; ++u) {
            tc.add(zc_unit[std::size_t(u)][std::size_t(i)].get());
            tm.add(zm_unit[std::size_t(u)][std::size_t(i)].get());
        }
        spec.Z_cond[std::size_t(i)] = std::clamp(tc.get() / double(num_samples), 0.0, 1.0);
        spec.Z_marg[std::size_t(i)] = std::clamp(tm.get() / double(num_samples), 0.0, 1.0);
    }
    select_sets_from_z(spec, params);
    return spec;
}

struct SpectrumRow {
    int index;
    double z_cond;
    double z_marg;
};

inline std::vector<SpectrumRow> polarization_spectrum(const PolarSpec& spec) {
    std::vector<SpectrumRow> rows;
    rows.reserve(std::size_t(spec.n));
    for (int i = 0; i < spec.n; ++i)
        rows.push_back({i, spec.Z_cond[std::size_t(i)], spec.Z_marg[std::size_t(i)]});
    return rows;
}

// ---- versioned plain-text serialization ---------------------------------

inline std::string serialize_polar_spec(const PolarSpec& spec) {
    spec.validate();
    std::ostringstream out;
    auto ints = [](const std::vector<int>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ' ';
            s += std::to_string(v[i]);
        }
        return s;
    };
    auto reals = [](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ' ';
            s += fmt17g(v[i]);
        }
        return s;
    };
    out << "polarspec v1\n";
    out << "n = " << spec.n << "\n";
    out << "q = " << spec.q << "\n";
    out << "beta = " << fmt17g(spec.beta) << "\n";
    out << "mode = " << spec.mode << "\n";
    out << "num_samples = " << spec.num_samples << "\n";
    out << "seed = " << spec.seed << "\n";
    out << "I = " << ints(spec.I) << "\n";
    out << "F = " << ints(spec.F) << "\n";
    out << "D = " << ints(spec.D) << "\n";
    out << "u_F = " << ints(std::vector<int>(spec.u_F.begin(), spec.u_F.end())) << "\n";
    out << "Z_cond = " << reals(spec.Z_cond) << "\n";
    out << "Z_marg = " << reals(spec.Z_marg) << "\n";
    return out.str();
}

inline PolarSpec parse_polar_spec(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || trim(line) != "polarspec v1")
        throw std::invalid_argument("polarspec: missing or unsupported version header");
    std::map<std::string, std::string> kv;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("polarspec: malformed line: " + line);
        const std::string key = trim(line.substr(0, eq));
        if (kv.count(key)) throw std::invalid_argument("polarspec: duplicate key: " + key);
        kv[key] = trim(line.substr(eq + 1));
    }
    const std::set<std::string> known = {"n", "q", "beta", "mode", "num_samples", "seed",
                                        "I", "F", "D", "u_F", "Z_cond", "Z_marg"};
    for (const auto& [key, _] : kv)
        if (!known.count(key)) throw std::invalid_argument("polarspec: unknown key: " + key);
    for (const auto& key : known)
        if (!kv.count(key)) throw std::invalid_argument("polarspec: missing key: " + key);

    PolarSpec spec;
    spec.n = int(parse_int_strict(kv["n"]));
    spec.q = int(parse_int_strict(kv["q"]));
    spec.k = log2_exact(spec.n);
    spec.beta = parse_double_strict(kv["beta"]);
    spec.mode = kv["mode"];
    spec.num_samples = parse_int_strict(kv["num_samples"]);
    spec.seed = parse_uint_strict(kv["seed"]);
    auto ints = [](const std::string& s) {
        std::vector<int> v;
        for (const auto& tok : split_ws(s)) v.push_back(int(parse_int_strict(tok)));
        return v;
    };
    auto reals = [](const std::string& s) {
        std::vector<double> v;
        for (const auto& tok : split_ws(s)) v.push_back(parse_double_strict(tok));
        return v;
    };
    spec.I = ints(kv["I"]);
    spec.F = ints(kv["F"]);
    spec.D = ints(kv["D"]);
    const std::vector<int> uf = ints(kv["u_F"]);
    spec.u_F.assign(uf.begin(), uf.end());
    spec.Z_cond = reals(kv["Z_cond"]);
    spec.Z_marg = reals(kv["Z_marg"]);
    spec.validate();
    return spec;
}

}  // namespace rde
