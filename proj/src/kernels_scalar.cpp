#include <cmath>
#include <cstddef>

#include "sac/kernels.hpp"

// Reference kernels. The lane-blocked reduction order below is the contract
// the SIMD variants must reproduce exactly; see kernels.hpp.

namespace sac::kernels {
namespace {

void axpy_scalar(double* y, double a, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void scal_scalar(double* x, double a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void mul_assign_scalar(double* y, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] *= x[i];
}

void wick2_scalar(double* out, const double* f, double c, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::fma(f[i], f[i], -c);
}

void wick3_scalar(double* out, const double* f, double c, std::size_t n) {
    const double c3 = 3.0 * c;
    for (std::size_t i = 0; i < n; ++i) out[i] = f[i] * std::fma(f[i], f[i], -c3);
}

void poly_step_scalar(double* out, const double* u, const double* f, double a, double b,
                      double c, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double u2 = u[i] * u[i];
        const double u3 = u2 * u[i];
        out[i] = std::fma(a, u[i], std::fma(b, u3, c * f[i]));
    }
}

void cmul_real_scalar(double* z, const double* m, std::size_t npairs) {
    for (std::size_t i = 0; i < npairs; ++i) {
        z[2 * i] *= m[i];
        z[2 * i + 1] *= m[i];
    }
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
    const std::size_t nb = n & ~std::size_t(3);
    for (std::size_t i = 0; i < nb; i += 4) {
        acc0 = std::fma(x[i], y[i], acc0);
        acc1 = std::fma(x[i + 1], y[i + 1], acc1);
        acc2 = std::fma(x[i + 2], y[i + 2], acc2);
        acc3 = std::fma(x[i + 3], y[i + 3], acc3);
    }
    double r = (acc0 + acc1) + (acc2 + acc3);
    for (std::size_t i = nb; i < n; ++i) r = std::fma(x[i], y[i], r);
    return r;
}

double sumsq_scalar(const double* x, std::size_t n) { return dot_scalar(x, x, n); }

double sum_scalar(const double* x, std::size_t n) {
    double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
    const std::size_t nb = n & ~std::size_t(3);
    for (std::size_t i = 0; i < nb; i += 4) {
        acc0 += x[i];
        acc1 += x[i + 1];
        acc2 += x[i + 2];
        acc3 += x[i + 3];
    }
    double r = (acc0 + acc1) + (acc2 + acc3);
    for (std::size_t i = nb; i < n; ++i) r += x[i];
    return r;
}

double absmax_scalar(const double* x, std::size_t n) {
    double m0 = 0.0, m1 = 0.0, m2 = 0.0, m3 = 0.0;
    const std::size_t nb = n & ~std::size_t(3);
    for (std::size_t i = 0; i < nb; i += 4) {
        m0 = std::max(m0, std::fabs(x[i]));
        m1 = std::max(m1, std::fabs(x[i + 1]));
        m2 = std::max(m2, std::fabs(x[i + 2]));
        m3 = std::max(m3, std::fabs(x[i + 3]));
    }
    double r = std::max(std::max(m0, m1), std::max(m2, m3));
    for (std::size_t i = nb; i < n; ++i) r = std::max(r, std::fabs(x[i]));
    return r;
}

}  // namespace

const Table& scalar_table() {
    static const Table t = {axpy_scalar,     scal_scalar, mul_assign_scalar, wick2_scalar,
                            wick3_scalar,    poly_step_scalar, cmul_real_scalar,
                            dot_scalar,      sumsq_scalar, sum_scalar,       absmax_scalar,
                            "scalar"};
    return t;
}

}  // namespace sac::kernels
