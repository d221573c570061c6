#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rde/weight_vector.hpp"

using namespace rde;
using Catch::Approx;

TEST_CASE("uniform weight vector") {
    for (int q : {2, 3, 5, 7}) {
        const WeightVector v = WeightVector::uniform(q);
        REQUIRE(v.sum() == Approx(1.0));
        REQUIRE(v.is_uniform());
        for (int a = 0; a < q; ++a) REQUIRE(v[a] == Approx(1.0 / q));
    }
}

TEST_CASE("normalize scales mass to one and records the log factor") {
    WeightVector v(3);
    v.w = {0.5, 1.0, 2.5};
    v.normalize();
    REQUIRE(v.sum() == Approx(1.0));
    REQUIRE(v[2] == Approx(2.5 / 4.0));
    REQUIRE(v.log_scale == Approx(std::log(4.0)));
}

TEST_CASE("normalizing zero mass reports an impossible path") {
    WeightVector v(2);
    v.w = {0.0, 0.0};
    REQUIRE_THROWS_AS(v.normalize(), impossible_path);
}

TEST_CASE("minus combine is the cyclic correlation of the pair") {
    WeightVector a(2), b(2);
    a.w = {0.7, 0.3};
    b.w = {0.6, 0.4};
    const WeightVector out = sc_combine_minus(a, b);
    // out(u1) ~ sum_{u2} a(u1+u2) b(u2)
    REQUIRE(out[0] == Approx(0.7 * 0.6 + 0.3 * 0.4));
    REQUIRE(out[1] == Approx(0.3 * 0.6 + 0.7 * 0.4));

    WeightVector a3(3), b3(3);
    a3.w = {0.5, 0.2, 0.3};
    b3.w = {0.1, 0.6, 0.3};
    const WeightVector o3 = sc_combine_minus(a3, b3);
    for (int u1 = 0; u1 < 3; ++u1) {
        double want = 0;
        for (int u2 = 0; u2 < 3; ++u2) want += a3[(u1 + u2) % 3] * b3[u2];
        REQUIRE(o3[u1] == Approx(want));
    }
}

TEST_CASE("plus combine conditions on the already-decided first symbol") {
    WeightVector a(3), b(3);
    a.w = {0.5, 0.2, 0.3};
    b.w = {0.1, 0.6, 0.3};
    for (Symbol u1 = 0; u1 < 3; ++u1) {
        const WeightVector out = sc_combine_plus(a, b, u1);
        double norm = 0;
        for (int u2 = 0; u2 < 3; ++u2) norm += a[(u1 + u2) % 3] * b[u2];
        for (int u2 = 0; u2 < 3; ++u2)
            REQUIRE(out[u2] == Approx(a[(u1 + u2) % 3] * b[u2] / norm));
        REQUIRE(out.log_scale == Approx(std::log(norm)));
    }
}

TEST_CASE("combines preserve total probability through log_scale") {
    WeightVector a(2), b(2);
    a.w = {0.9, 0.1};
    b.w = {0.25, 0.75};
    const WeightVector m = sc_combine_minus(a, b);
    // Unnormalized masses of the two branches must add back to 1.
    double total = 0;
    for (int u1 = 0; u1 < 2; ++u1) total += m[u1] * std::exp(m.log_scale);
    REQUIRE(total == Approx(1.0));
}

TEST_CASE("conditional Bhattacharyya hits both extremes") {
    for (int q : {2, 3, 5}) {
        REQUIRE(bhattacharyya_conditional(WeightVector::uniform(q)) == Approx(1.0));
        WeightVector v(q);
        v.w[1] = 1.0;
        REQUIRE(bhattacharyya_conditional(v) == Approx(0.0));
    }
    WeightVector v(2);
    v.w = {0.9, 0.1};
    REQUIRE(bhattacharyya_conditional(v) == Approx(2 * std::sqrt(0.09)));
}

TEST_CASE("joint Bhattacharyya averages the per-observation values") {
    // Independent pair: Z equals the marginal conditional value.
    std::vector<std::vector<double>> joint = {{0.45, 0.05}, {0.05, 0.45}};
    // Z = 2 * sum_b sqrt(P(0,b)P(1,b)) = 2 * 2 * sqrt(0.45*0.05)
    REQUIRE(bhattacharyya(joint) == Approx(4 * std::sqrt(0.45 * 0.05)));

    // Deterministic A from B: zero. Uniform independent: one.
    REQUIRE(bhattacharyya({{0.5, 0.0}, {0.0, 0.5}}) == Approx(0.0).margin(1e-12));
    REQUIRE(bhattacharyya({{0.25, 0.25}, {0.25, 0.25}}) == Approx(1.0));
    REQUIRE_THROWS_AS(bhattacharyya({{1.0}}), std::invalid_argument);
}

TEST_CASE("entropy helper") {
    const double u4[] = {0.25, 0.25, 0.25, 0.25};
    REQUIRE(entropy_nats(u4, 4) == Approx(std::log(4.0)));
    const double d[] = {1.0, 0.0};
    REQUIRE(entropy_nats(d, 2) == Approx(0.0));
    const double unnorm[] = {2.0, 2.0};  // normalization is internal
    REQUIRE(entropy_nats(unnorm, 2) == Approx(std::log(2.0)));
    REQUIRE(nats_to_base(std::log(8.0), 2) == Approx(3.0));
    const double p[] = {0.3, 0.7};
    REQUIRE(nats_to_base(entropy_nats(p, 2), 2) ==
            Approx(-0.3 * std::log2(0.3) - 0.7 * std::log2(0.7)));
}
