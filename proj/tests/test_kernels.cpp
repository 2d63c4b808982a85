#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "sac/kernels.hpp"

using sac::kernels::Table;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
    std::normal_distribution<double> dist(0.0, scale);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool bits_equal(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

}  // namespace

TEST_CASE("scalar reference sanity") {
    const Table& t = sac::kernels::scalar_table();
    std::vector<double> y = {1.0, 2.0, 3.0};
    const std::vector<double> x = {1.0, 1.0, 1.0};
    t.axpy(y.data(), 2.0, x.data(), 3);
    CHECK(y == std::vector<double>{3.0, 4.0, 5.0});
    CHECK(t.dot(y.data(), x.data(), 3) == doctest::Approx(12.0));
    CHECK(t.sum(y.data(), 3) == doctest::Approx(12.0));
    CHECK(t.sumsq(x.data(), 3) == doctest::Approx(3.0));
    CHECK(t.absmax(y.data(), 3) == doctest::Approx(5.0));

    std::vector<double> out(3);
    const std::vector<double> f = {2.0, -1.0, 0.5};
    t.wick2(out.data(), f.data(), 3.0, 3);
    CHECK(out == std::vector<double>{1.0, -2.0, -2.75});
    t.wick3(out.data(), f.data(), 1.0, 3);
    // f^3 - 3f
    CHECK(out[0] == doctest::Approx(2.0));
    CHECK(out[1] == doctest::Approx(2.0));
    CHECK(out[2] == doctest::Approx(-1.375));

    // Wick telescoping: w3(f) = f*w2(f) - 2 C f
    const double C = 0.7;
    std::vector<double> w2(3), w3(3);
    t.wick2(w2.data(), f.data(), C, 3);
    t.wick3(w3.data(), f.data(), C, 3);
    for (int i = 0; i < 3; ++i)
        CHECK(w3[static_cast<std::size_t>(i)] ==
              doctest::Approx(f[static_cast<std::size_t>(i)] * w2[static_cast<std::size_t>(i)] -
                              2.0 * C * f[static_cast<std::size_t>(i)]));
}

TEST_CASE("AVX2 variant agrees bitwise with the scalar reference") {
    const Table* avx = sac::kernels::avx2_table();
    if (!avx) {
        MESSAGE("AVX2 unavailable on this host; equivalence suite skipped");
        return;
    }
    const Table& ref = sac::kernels::scalar_table();
    std::mt19937_64 rng(42);

    for (std::size_t n : {std::size_t(0), std::size_t(1), std::size_t(3), std::size_t(4),
                          std::size_t(7), std::size_t(64), std::size_t(1021), std::size_t(4096)}) {
        const auto x = random_vec(rng, n, 2.0);
        const auto y0 = random_vec(rng, n, 3.0);
        const double a = -1.7, c = 0.31;

        auto y1 = y0, y2 = y0;
        ref.axpy(y1.data(), a, x.data(), n);
        avx->axpy(y2.data(), a, x.data(), n);
        CHECK(bits_equal(y1, y2));

        y1 = y0; y2 = y0;
        ref.scal(y1.data(), a, n);
        avx->scal(y2.data(), a, n);
        CHECK(bits_equal(y1, y2));

        y1 = y0; y2 = y0;
        ref.mul_assign(y1.data(), x.data(), n);
        avx->mul_assign(y2.data(), x.data(), n);
        CHECK(bits_equal(y1, y2));

        std::vector<double> o1(n), o2(n);
        ref.wick2(o1.data(), x.data(), c, n);
        avx->wick2(o2.data(), x.data(), c, n);
        CHECK(bits_equal(o1, o2));

        ref.wick3(o1.data(), x.data(), c, n);
        avx->wick3(o2.data(), x.data(), c, n);
        CHECK(bits_equal(o1, o2));

        ref.poly_step(o1.data(), x.data(), y0.data(), 1.1, -0.2, 0.05, n);
        avx->poly_step(o2.data(), x.data(), y0.data(), 1.1, -0.2, 0.05, n);
        CHECK(bits_equal(o1, o2));

        CHECK(bits_equal(ref.dot(x.data(), y0.data(), n), avx->dot(x.data(), y0.data(), n)));
        CHECK(bits_equal(ref.sumsq(x.data(), n), avx->sumsq(x.data(), n)));
        CHECK(bits_equal(ref.sum(x.data(), n), avx->sum(x.data(), n)));
        CHECK(bits_equal(ref.absmax(x.data(), n), avx->absmax(x.data(), n)));

        if (n % 2 == 0) {
            auto z1 = random_vec(rng, n, 1.0);
            auto z2 = z1;
            const auto m = random_vec(rng, n / 2, 1.0);
            ref.cmul_real(z1.data(), m.data(), n / 2);
            avx->cmul_real(z2.data(), m.data(), n / 2);
            CHECK(bits_equal(z1, z2));
        }
    }
}

TEST_CASE("active table resolves and reductions are deterministic") {
    const Table& t = sac::kernels::active();
    CHECK((sac::kernels::backend_name() == "scalar" || sac::kernels::backend_name() == "avx2"));
    std::mt19937_64 rng(1);
    const auto x = random_vec(rng, 1000);
    const double d1 = t.sumsq(x.data(), x.size());
    const double d2 = t.sumsq(x.data(), x.size());
    CHECK(bits_equal(d1, d2));
}
