#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "sac/fields.hpp"
#include "sac/noise.hpp"
#include "support.hpp"

using namespace sac;
using sac::testing::mean_var;

TEST_CASE("philox known-answer vectors") {
    // Reference vectors published with the Random123 suite (philox4x32, 10 rounds).
    auto out = Philox4x32::block({0u, 0u, 0u, 0u}, {0u, 0u});
    CHECK(out == std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});

    out = Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                            {0xffffffffu, 0xffffffffu});
    CHECK(out == std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});

    out = Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                            {0xa4093822u, 0x299f31d0u});
    CHECK(out == std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("white noise is a pure function of (spec, seed)") {
    const GridSpec spec{2, 0.5, 16, 16};
    const auto a = sample_white_noise(spec, 12345);
    const auto b = sample_white_noise(spec, 12345);
    CHECK(std::memcmp(a.values.data(), b.values.data(), sizeof(double) * a.values.size()) == 0);
    const auto c = sample_white_noise(spec, 12346);
    CHECK(std::memcmp(a.values.data(), c.values.data(), sizeof(double) * a.values.size()) != 0);
}

TEST_CASE("node statistics: mean within the CLT bound, variance correct") {
    const GridSpec spec{3, 1.0, 1, 64};  // 64^3 nodes
    const auto xi = sample_white_noise(spec, 777);
    const double node_std = 1.0 / std::sqrt(spec.node_weight());
    const double n = static_cast<double>(xi.values.size());
    double mean = 0.0;
    for (std::size_t i = 0; i < xi.values.size(); ++i) mean += xi.values.data()[i];
    mean /= n;
    CHECK(std::fabs(mean) < 4.0 * node_std / std::sqrt(n));

    double var = 0.0;
    for (std::size_t i = 0; i < xi.values.size(); ++i)
        var += xi.values.data()[i] * xi.values.data()[i];
    var /= n;
    CHECK(var == doctest::Approx(node_std * node_std).epsilon(0.02));
}

TEST_CASE("pairing variance realises the L2 isometry") {
    const GridSpec spec{2, 0.25, 16, 16};
    TestFunction tf;
    tf.t0 = 0.125;
    tf.x0 = {0.5, 0.5, 0.0};
    tf.lambda = 0.22;
    const GridField phi = sample_test_function(spec, tf);
    const double want = phi.l2_sq();

    const int n_seeds = 1000;
    std::vector<double> pairings(n_seeds);
    for (int s = 0; s < n_seeds; ++s) {
        const auto xi = sample_white_noise(spec, derive_trial_seed(99, static_cast<std::uint64_t>(s)));
        pairings[static_cast<std::size_t>(s)] = inner(xi.values, phi);
    }
    const auto mv = mean_var(pairings);
    CHECK(std::fabs(mv.var - want) / want < 0.10);
    CHECK(std::fabs(mv.mean) < 4.0 * mv.stderr_mean);
}

TEST_CASE("derived trial streams are uncorrelated") {
    const GridSpec spec{1, 1.0, 32, 32};
    const auto a = sample_white_noise(spec, derive_trial_seed(5150, 0));
    const auto b = sample_white_noise(spec, derive_trial_seed(5150, 1));
    const double n = static_cast<double>(a.values.size());
    double corr = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        corr += a.values.data()[i] * b.values.data()[i];
        va += a.values.data()[i] * a.values.data()[i];
        vb += b.values.data()[i] * b.values.data()[i];
    }
    CHECK(std::fabs(corr / std::sqrt(va * vb)) < 4.0 / std::sqrt(n));
}

TEST_CASE("mollifier resolvability preconditions") {
    const GridSpec spec{2, 0.125, 64, 32};
    CHECK(mollifier_resolvable(spec, 1.0 / 8.0));
    CHECK_FALSE(mollifier_resolvable(spec, 1.0 / 32.0));
    CHECK_THROWS_AS(mollify(GridField(spec), 1.0 / 32.0), ResolutionError);
    try {
        mollify(GridField(spec), 1.0 / 32.0);
    } catch (const ResolutionError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("n_x") != std::string::npos);
        CHECK(msg.find("n_t") != std::string::npos);
    }
}

TEST_CASE("mollifier kernel integrates to one and fixes constants") {
    const GridSpec spec{2, 0.125, 64, 32};
    const Mollifier rho;
    const GridField k = rho.kernel_field(spec, 1.0 / 8.0);
    double mass = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) mass += k.data()[i];
    mass *= spec.node_weight();
    CHECK(std::fabs(mass - 1.0) < 1e-12);

    GridField c(spec);
    for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] = 3.25;
    const GridField mc = mollify(c, 1.0 / 8.0, rho);
    for (std::size_t i = 0; i < mc.size(); ++i)
        CHECK(mc.data()[i] == doctest::Approx(3.25).epsilon(1e-12));
}

TEST_CASE("mollify is linear and additive under shifts") {
    const GridSpec spec{2, 0.125, 64, 32};
    const auto xi = sample_white_noise(spec, 31337);
    const GridField h = sac::testing::random_smooth_field(spec, 4, 0.5);
    GridField sum(spec);
    for (std::size_t i = 0; i < sum.size(); ++i)
        sum.data()[i] = xi.values.data()[i] + h.data()[i];
    const GridField a = mollify(sum, 1.0 / 8.0);
    GridField b = mollify(xi, 1.0 / 8.0);
    const GridField bh = mollify(h, 1.0 / 8.0);
    for (std::size_t i = 0; i < b.size(); ++i) b.data()[i] += bh.data()[i];
    CHECK(sac::testing::max_abs_diff(a, b) < 1e-10 * std::max(1.0, a.sup_abs()));
}

TEST_CASE("mollified white noise has the Ito-isometry variance") {
    // Var xi_delta(z) ~ ||rho_delta||_L2^2, and halving delta scales it by
    // 2^(d+2) in the continuum limit.
    const GridSpec spec{2, 0.125, 128, 64};
    const Mollifier rho;
    const double d1 = 1.0 / 8.0, d2 = 1.0 / 16.0;
    const double want1 = rho.kernel_field(spec, d1).l2_sq();
    const double want2 = rho.kernel_field(spec, d2).l2_sq();

    const int n_seeds = 400;
    const std::int64_t probe = GridField(spec).space_index(7, 12);
    const int probe_t = spec.n_t / 2;
    std::vector<double> v1(n_seeds), v2(n_seeds);
    for (int s = 0; s < n_seeds; ++s) {
        const auto xi = sample_white_noise(spec, derive_trial_seed(2024, static_cast<std::uint64_t>(s)));
        v1[static_cast<std::size_t>(s)] = mollify(xi, d1, rho).at(probe_t, probe);
        v2[static_cast<std::size_t>(s)] = mollify(xi, d2, rho).at(probe_t, probe);
    }
    const auto mv1 = mean_var(v1);
    const auto mv2 = mean_var(v2);
    CHECK(std::fabs(mv1.var - want1) / want1 < 0.15);
    CHECK(std::fabs(mv2.var - want2) / want2 < 0.15);
    // scale ratio approaches 2^(d+2) = 16 (lattice corrections allowed)
    CHECK(std::fabs(want2 / want1 - 16.0) / 16.0 < 0.20);
    CHECK(std::fabs(mv2.var / mv1.var - want2 / want1) / (want2 / want1) < 0.20);
}
