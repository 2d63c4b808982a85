// AVX2+FMA kernel variants. This file is compiled with -mavx2 -mfma and only
// on x86-64; callers must check CPU support before using the table.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "sac/kernels.hpp"

#ifndef __AVX2__
#error kernels_avx2.cpp must be compiled with -mavx2 -mfma
#endif

namespace sac::kernels {
namespace {

void axpy_avx2(double* y, double a, const double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    const std::size_t nb = n & ~std::size_t(3);
    for (std::size_t i = 0; i < nb; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        __m256d vx = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, vx, vy));
    }
    for (std::size_t i = nb; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void scal_avx2(double* x, double a, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    const std::size_t nb = n & ~std::size_t(3);
    for (std::size_t i = 0; i < nb; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), va));
    for (std::size_t i = nb; i < n; ++i) x[i] *= a;
}

void mul_assign_avx2(double* y, const double* x, std::size_t n) {
    const std::size_t nb = n & ~std::size_t(3);
    for (std::size_t i = 0; i < nb; i += 4)
        _mm256_storeu_pd(y + i, _mm256_mul_pd(_mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
    for (std::size_t i = nb; i < n; ++i) y[i] *= x[i];
}

void wick2_avx2(double* out, const double* f, double c, std::size_t n) {
    const __m256d vc = _mm256_set1_pd(-c);
    const std::size_t nb = n & ~std::size_t(3);
    for (std::size_t i = 0; i < nb; i += 4) {
        __m256d vf = _mm256_loadu_pd(f + i);
        _mm256_storeu_pd(out + i, _mm256_fmadd_pd(vf, vf, vc));
    }
    for (std::size_t i = nb; i < n; ++i) out[i] = std::fma(f[i], f[i], -c);
}

void wick3_avx2(double* out, const double* f, double c, std::size_t n) {
    const double c3 = 3.0 * c;
    const __m256d vc3 = _mm256_set1_pd(-c3);
    const std::size_t nb = n & ~std::size_t(3);
    for (std::size_t i = 0; i < nb; i += 4) {
        __m256d vf = _mm256_loadu_pd(f + i);
        _mm256_storeu_pd(out + i, _mm256_mul_pd(vf, _mm256_fmadd_pd(vf, vf, vc3)));
    }
    for (std::size_t i = nb; i < n; ++i) out[i] = f[i] * std::fma(f[i], f[i], -c3);
}

void poly_step_avx2(double* out, const double* u, const double* f, double a, double b,
                    double c, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    const __m256d vb = _mm256_set1_pd(b);
    const __m256d vc = _mm256_set1_pd(c);
    const std::size_t nb = n & ~std::size_t(3);
    for (std::size_t i = 0; i < nb; i += 4) {
        __m256d vu = _mm256_loadu_pd(u + i);
        __m256d vf = _mm256_loadu_pd(f + i);
        __m256d u2 = _mm256_mul_pd(vu, vu);
        __m256d u3 = _mm256_mul_pd(u2, vu);
        __m256d t = _mm256_fmadd_pd(vb, u3, _mm256_mul_pd(vc, vf));
        _mm256_storeu_pd(out + i, _mm256_fmadd_pd(va, vu, t));
    }
    for (std::size_t i = nb; i < n; ++i) {
        const double u2 = u[i] * u[i];
        const double u3 = u2 * u[i];
        out[i] = std::fma(a, u[i], std::fma(b, u3, c * f[i]));
    }
}

void cmul_real_avx2(double* z, const double* m, std::size_t npairs) {
    const std::size_t nb = npairs & ~std::size_t(1);
    for (std::size_t i = 0; i < nb; i += 2) {
        __m128d mm = _mm_loadu_pd(m + i);
        __m256d md = _mm256_permute4x64_pd(
            _mm256_insertf128_pd(_mm256_castpd128_pd256(mm), mm, 1), _MM_SHUFFLE(1, 1, 0, 0));
        __m256d vz = _mm256_loadu_pd(z + 2 * i);
        _mm256_storeu_pd(z + 2 * i, _mm256_mul_pd(vz, md));
    }
    for (std::size_t i = nb; i < npairs; ++i) {
        z[2 * i] *= m[i];
        z[2 * i + 1] *= m[i];
    }
}

double reduce_lanes(__m256d acc) {
    // (acc0+acc1)+(acc2+acc3), matching the scalar reference exactly
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    const std::size_t nb = n & ~std::size_t(3);
    for (std::size_t i = 0; i < nb; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
    double r = reduce_lanes(acc);
    for (std::size_t i = nb; i < n; ++i) r = std::fma(x[i], y[i], r);
    return r;
}

double sumsq_avx2(const double* x, std::size_t n) { return dot_avx2(x, x, n); }

double sum_avx2(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    const std::size_t nb = n & ~std::size_t(3);
    for (std::size_t i = 0; i < nb; i += 4)
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double r = reduce_lanes(acc);
    for (std::size_t i = nb; i < n; ++i) r += x[i];
    return r;
}

double absmax_avx2(const double* x, std::size_t n) {
    const __m256d signmask = _mm256_set1_pd(-0.0);
    __m256d acc = _mm256_setzero_pd();
    const std::size_t nb = n & ~std::size_t(3);
    for (std::size_t i = 0; i < nb; i += 4)
        acc = _mm256_max_pd(acc, _mm256_andnot_pd(signmask, _mm256_loadu_pd(x + i)));
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    double r = std::max(std::max(lane[0], lane[1]), std::max(lane[2], lane[3]));
    for (std::size_t i = nb; i < n; ++i) r = std::max(r, std::fabs(x[i]));
    return r;
}

}  // namespace

const Table* avx2_table_impl() {
    static const Table t = {axpy_avx2,  scal_avx2,  mul_assign_avx2, wick2_avx2,
                            wick3_avx2, poly_step_avx2, cmul_real_avx2,
                            dot_avx2,   sumsq_avx2, sum_avx2,        absmax_avx2,
                            "avx2"};
    return &t;
}

}  // namespace sac::kernels

#endif  // x86-64
