// Shared model instances used across the test suites. The exact reference
// values asserted against these fixtures were frozen from an independent
// brute-force enumeration (direct summation over all source/reconstruction
// blocks) and are quoted where they are used.
#pragma once

#include "rde/construction.hpp"
#include "rde/oracle.hpp"
#include "rde/source_model.hpp"

namespace fx {

// Code description built from exact (enumerated) Z profiles, so partitions in
// small-n tests are deterministic and independent of Monte-Carlo noise.
inline rde::PolarSpec exact_spec(const rde::JointSource& src, const rde::TestChannel& ch, int n,
                                 const rde::SelectParams& params) {
    const rde::OracleReport prof = rde::exact_z_profiles(src, ch, n);
    rde::PolarSpec spec;
    spec.n = n;
    spec.k = rde::log2_exact(std::size_t(n));
    spec.q = ch.q;
    spec.Z_cond = prof.Z_cond;
    spec.Z_marg = prof.Z_marg;
    rde::select_sets_from_z(spec, params);
    return spec;
}

// Doubly symmetric binary source, crossover 0.1, with a binary symmetric
// test channel at distortion 0.11.
inline rde::JointSource dsbs() { return rde::dsbs_source(0.1); }
inline rde::TestChannel dsbs_ch() { return rde::bsc_test_channel(dsbs(), 0.11); }

// Z-shaped binary source (an impossible letter pair) with a hand-picked
// asymmetric test channel; exercises zero-probability supports.
inline rde::JointSource zsrc() { return rde::zchannel_source(0.3); }
inline rde::TestChannel zsrc_ch() {
    return rde::TestChannel(2, 2, 2,
                            {0.95, 0.05, 0.50, 0.50, 0.60, 0.40, 0.55, 0.45});
}

// Ternary correlated source with an additive-noise ternary test channel.
inline rde::JointSource tern() {
    return rde::JointSource(3, 3,
                            {0.40, 0.05, 0.05, 0.03, 0.24, 0.03, 0.02, 0.02, 0.16});
}
inline rde::TestChannel tern_ch() {
    return rde::additive_noise_test_channel(tern(), 3, {0.7, 0.2, 0.1});
}

}  // namespace fx
