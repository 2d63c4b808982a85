#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstring>

#include "sac/fft.hpp"
#include "sac/fields.hpp"
#include "sac/kernels.hpp"
#include "support.hpp"

using namespace sac;
using sac::testing::max_abs_diff;
using sac::testing::random_field;
using sac::testing::rel_err;

namespace {

GridField constant_field(const GridSpec& spec, double c) {
    GridField f(spec);
    for (std::size_t i = 0; i < f.size(); ++i) f.data()[i] = c;
    return f;
}

}  // namespace

TEST_CASE("heat convolution integrates constants to c*t") {
    const GridSpec spec{2, 0.5, 32, 16};
    const double c = 1.7;
    const GridField u = heat_convolve(constant_field(spec, c));
    for (int i = 0; i < spec.n_t; ++i) {
        const double want = c * i * spec.dt();
        for (std::int64_t j = 0; j < spec.n_space(); ++j)
            CHECK(u.at(i, j) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("heat convolution of a time-constant plane wave matches the mode ODE") {
    const GridSpec spec{1, 0.25, 64, 32};
    GridField f(spec);
    const int k = 3;
    for (int i = 0; i < spec.n_t; ++i)
        for (int j = 0; j < spec.n_x; ++j)
            f.at(i, j) = std::cos(2.0 * M_PI * k * j * spec.dx());
    const GridField u = heat_convolve(f);
    const double mu = 4.0 * M_PI * M_PI * k * k;
    for (int i = 0; i < spec.n_t; i += 7) {
        const double t = i * spec.dt();
        const double amp = (1.0 - std::exp(-mu * t)) / mu;
        for (int j = 0; j < spec.n_x; j += 5) {
            const double want = amp * std::cos(2.0 * M_PI * k * j * spec.dx());
            CHECK(u.at(i, j) == doctest::Approx(want).epsilon(1e-10));
        }
    }
}

TEST_CASE("heat convolution of zero is zero, is linear, preserves positivity") {
    const GridSpec spec{2, 0.25, 16, 8};
    CHECK(heat_convolve(GridField(spec)).l2_sq() == 0.0);

    const GridField a = random_field(spec, 11);
    const GridField b = random_field(spec, 12);
    GridField apb(spec);
    for (std::size_t i = 0; i < apb.size(); ++i) apb.data()[i] = a.data()[i] + 2.0 * b.data()[i];
    const GridField ua = heat_convolve(a);
    const GridField ub = heat_convolve(b);
    const GridField uab = heat_convolve(apb);
    double worst = 0.0;
    for (std::size_t i = 0; i < uab.size(); ++i)
        worst = std::max(worst, std::fabs(uab.data()[i] - ua.data()[i] - 2.0 * ub.data()[i]));
    CHECK(worst < 1e-12);

    GridField pos = random_field(spec, 13);
    for (std::size_t i = 0; i < pos.size(); ++i) pos.data()[i] = std::fabs(pos.data()[i]);
    const GridField up = heat_convolve(pos);
    for (std::size_t i = 0; i < up.size(); ++i) CHECK(up.data()[i] >= -1e-13);
}

TEST_CASE("heat adjoint satisfies the duality identity") {
    const GridSpec spec{2, 0.5, 24, 8};
    for (unsigned s = 0; s < 5; ++s) {
        const GridField f = random_field(spec, 100 + s);
        const GridField g = random_field(spec, 200 + s);
        const double lhs = inner(heat_convolve(f), g);
        const double rhs = inner(f, heat_convolve_adjoint(g));
        CHECK(rel_err(lhs, rhs) < 1e-12);
    }
}

TEST_CASE("periodic convolution identities") {
    const GridSpec spec{2, 1.0, 8, 8};

    SUBCASE("discrete delta is the identity") {
        GridField delta(spec);
        delta.at(0, 0) = 1.0 / spec.node_weight();
        const GridField g = random_field(spec, 3);
        const GridField conv = periodic_convolve(delta, g);
        CHECK(max_abs_diff(conv, g) < 1e-12 * std::max(1.0, g.sup_abs()));
    }

    SUBCASE("constants convolve to c1*c2*T") {
        const GridField f = constant_field(spec, 2.0);
        const GridField g = constant_field(spec, -1.5);
        const GridField conv = periodic_convolve(f, g);
        const double want = 2.0 * (-1.5) * spec.T;  // spatial volume is 1
        for (std::size_t i = 0; i < conv.size(); ++i)
            CHECK(conv.data()[i] == doctest::Approx(want).epsilon(1e-12));
    }

    SUBCASE("matches the O(N^2) oracle on random bump-like fields") {
        const GridField f = sac::testing::random_smooth_field(spec, 21, 0.7);
        const GridField g = sac::testing::random_smooth_field(spec, 22, 0.9);
        const GridField fast = periodic_convolve(f, g);
        const GridField slow = sac::testing::brute_force_convolve(f, g);
        CHECK(max_abs_diff(fast, slow) < 1e-10);
    }

    SUBCASE("commutative and linear") {
        const GridField f = random_field(spec, 31);
        const GridField g = random_field(spec, 32);
        CHECK(max_abs_diff(periodic_convolve(f, g), periodic_convolve(g, f)) < 1e-11);
    }

    SUBCASE("spec mismatch is rejected") {
        const GridSpec other{2, 1.0, 8, 16};
        CHECK_THROWS_AS(periodic_convolve(GridField(spec), GridField(other)), StructuralError);
    }
}

TEST_CASE("Parseval identity for the lattice L2 norm") {
    const GridSpec spec{2, 0.7, 12, 16};
    const GridField f = random_field(spec, 5);
    SpaceTimeFft fft(spec);
    std::memcpy(fft.real_buf(), f.data(), sizeof(double) * f.size());
    fft.forward();
    // r2c keeps half the modes: count the missing conjugates once more
    const int nh = spec.n_x / 2 + 1;
    double sumsq = 0.0;
    std::int64_t m = 0;
    for (int it = 0; it < spec.n_t; ++it)
        for (int jy = 0; jy < spec.n_x; ++jy)
            for (int jx = 0; jx < nh; ++jx, ++m) {
                const double a = std::norm(fft.cplx_buf()[m]);
                const bool self = (jx == 0 || jx == spec.n_x / 2);
                sumsq += self ? a : 2.0 * a;
            }
    const double phys = static_cast<double>(f.spec().n_total()) *
                        sac::kernels::active().sumsq(f.data(), f.size());
    CHECK(rel_err(sumsq, phys) < 1e-10);
}

TEST_CASE("heat kernel field: unit mass and the semigroup property") {
    const GridSpec spec{2, 0.5, 32, 16};
    const GridField P = heat_kernel_field(spec);
    for (int i = 0; i < spec.n_t; ++i) {
        double mass = 0.0;
        for (std::int64_t j = 0; j < spec.n_space(); ++j) mass += P.at(i, j);
        CHECK(mass * spec.cell_volume() == doctest::Approx(1.0).epsilon(1e-12));
    }

    // P(t) *_x P(s) = P(t+s), checked through the spatial convolution theorem
    const GridSpec slice{2, 1.0, 1, 16};
    auto slice_of = [&](int i) {
        GridField s(slice);
        std::memcpy(s.data(), P.slice(i), sizeof(double) * static_cast<std::size_t>(spec.n_space()));
        return s;
    };
    const int it = 5, is = 9;
    GridField conv = periodic_convolve(slice_of(it), slice_of(is));
    // node weight on the 1-slice grid integrates over time too; undo it
    sac::kernels::active().scal(conv.data(), 1.0 / slice.dt(), conv.size());
    const GridField want = slice_of(it + is);
    double worst = 0.0;
    for (std::size_t j = 0; j < conv.size(); ++j)
        worst = std::max(worst, std::fabs(conv.data()[j] - want.data()[j]));
    CHECK(worst / want.sup_abs() < 1e-10);
}

TEST_CASE("spectral laplacian of a plane wave") {
    const GridSpec spec{2, 1.0, 4, 16};
    GridField f(spec);
    const int kx = 2;
    for (int i = 0; i < spec.n_t; ++i)
        for (int jy = 0; jy < spec.n_x; ++jy)
            for (int jx = 0; jx < spec.n_x; ++jx)
                f.at(i, f.space_index(jx, jy)) =
                    std::sin(2.0 * M_PI * (kx * jx + 3 * jy) * spec.dx());
    const GridField lf = laplacian(f);
    const double want = -4.0 * M_PI * M_PI * (kx * kx + 9);
    for (std::size_t i = 0; i < lf.size(); ++i)
        CHECK(lf.data()[i] == doctest::Approx(want * f.data()[i]).epsilon(1e-9).scale(1.0));
}

TEST_CASE("test-function pairing") {
    const GridSpec spec{2, 1.0, 64, 64};

    SUBCASE("unit integral against the constant field") {
        TestFunction tf;
        tf.t0 = 0.5;
        tf.x0 = {0.3, 0.6, 0.0};
        tf.lambda = 0.25;  // = 16 dx
        const double got = test_pair(constant_field(spec, 1.0), tf);
        CHECK(std::fabs(got - 1.0) < 0.01);
    }

    SUBCASE("odd field about the centre pairs to zero") {
        TestFunction tf;
        tf.t0 = 0.5;
        tf.x0 = {0.5, 0.5, 0.0};
        tf.lambda = 0.2;
        GridField f(spec);
        for (int i = 0; i < spec.n_t; ++i)
            for (int jy = 0; jy < spec.n_x; ++jy)
                for (int jx = 0; jx < spec.n_x; ++jx)
                    f.at(i, f.space_index(jx, jy)) = std::sin(2.0 * M_PI * (jx * spec.dx() - 0.5));
        CHECK(std::fabs(test_pair(f, tf)) < 1e-12);
    }

    SUBCASE("plane-wave pairing matches a refined-grid quadrature") {
        TestFunction tf;
        tf.t0 = 0.5;
        tf.x0 = {0.25, 0.75, 0.0};
        tf.lambda = 0.2;
        auto plane = [](const GridSpec& s) {
            GridField f(s);
            for (int i = 0; i < s.n_t; ++i)
                for (int jy = 0; jy < s.n_x; ++jy)
                    for (int jx = 0; jx < s.n_x; ++jx)
                        f.at(i, f.space_index(jx, jy)) =
                            std::cos(2.0 * M_PI * (2 * jx + jy) * s.dx() +
                                     2.0 * M_PI * i * s.dt());
            return f;
        };
        const double coarse = test_pair(plane(spec), tf);
        const GridSpec fine{2, 1.0, 256, 256};
        const double refined = test_pair(plane(fine), tf);
        CHECK(std::fabs(coarse - refined) < 1e-6);
    }

    SUBCASE("scale domain errors") {
        TestFunction tf;
        tf.lambda = 0.0;
        CHECK_THROWS_AS(test_pair(constant_field(spec, 1.0), tf), DomainError);
        tf.lambda = 1.5;
        CHECK_THROWS_AS(test_pair(constant_field(spec, 1.0), tf), DomainError);
        tf.lambda = 0.3;
        tf.t0 = 0.05;  // support sticks out below t=0
        CHECK_THROWS_AS(test_pair(constant_field(spec, 1.0), tf), DomainError);
    }
}
