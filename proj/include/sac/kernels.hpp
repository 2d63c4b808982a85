#pragma once

#include <cstddef>
#include <string>

namespace sac::kernels {

/// Data-parallel inner loops of the field engine. Two implementations are
/// provided: a scalar reference and an AVX2+FMA variant, selected at runtime
/// from CPU capabilities (override with SACLAB_KERNELS=scalar|avx2).
///
/// Both variants are bit-for-bit identical by contract:
///   * pointwise ops perform the same operation ladder per element, with
///     fused multiply-adds written explicitly (std::fma / vfmadd);
///   * reductions accumulate into four independent lanes (lane j takes the
///     elements with index congruent to j mod 4), are combined as
///     (acc0+acc1)+(acc2+acc3), and fold the tail in sequentially.
/// The equivalence suite asserts bitwise agreement between the variants.
struct Table {
    // y[i] += a * x[i]
    void (*axpy)(double* y, double a, const double* x, std::size_t n);
    // x[i] *= a
    void (*scal)(double* x, double a, std::size_t n);
    // y[i] *= x[i]
    void (*mul_assign)(double* y, const double* x, std::size_t n);
    // out[i] = f[i]*f[i] - c          (Wick square)
    void (*wick2)(double* out, const double* f, double c, std::size_t n);
    // out[i] = f[i]*(f[i]*f[i] - 3c)  (Wick cube)
    void (*wick3)(double* out, const double* f, double c, std::size_t n);
    // out[i] = a*u[i] + b*u[i]^3 + c*f[i]   (semi-implicit step right side)
    void (*poly_step)(double* out, const double* u, const double* f, double a, double b,
                      double c, std::size_t n);
    // interleaved complex z[j] *= m[j] for real per-mode multipliers
    void (*cmul_real)(double* z, const double* m, std::size_t npairs);
    double (*dot)(const double* x, const double* y, std::size_t n);
    double (*sumsq)(const double* x, std::size_t n);
    double (*sum)(const double* x, std::size_t n);
    double (*absmax)(const double* x, std::size_t n);
    const char* name;
};

const Table& scalar_table();
/// Null when the build or the CPU lacks AVX2+FMA.
const Table* avx2_table();

/// Active table, chosen once at first use.
const Table& active();

/// Name of the active backend ("scalar" or "avx2").
std::string backend_name();

}  // namespace sac::kernels
