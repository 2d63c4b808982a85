#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "sac/grid.hpp"

namespace sac {

/// Batched real-to-complex FFT over the spatial directions of a grid,
/// transforming `howmany` consecutive time slices at once. Owns aligned
/// buffers; callers copy data through them. Plan creation is serialised
/// internally (FFTW's planner is not thread-safe), execution is re-entrant
/// on distinct instances.
class SpatialFft {
  public:
    SpatialFft(const GridSpec& spec, int howmany);
    ~SpatialFft();
    SpatialFft(const SpatialFft&) = delete;
    SpatialFft& operator=(const SpatialFft&) = delete;

    std::int64_t n_real() const { return n_real_; }    // per slice
    std::int64_t n_cplx() const { return n_cplx_; }    // per slice
    int howmany() const { return howmany_; }

    double* real_buf() { return real_; }
    std::complex<double>* cplx_buf() { return cplx_; }

    /// real_buf -> cplx_buf (unnormalised).
    void forward();
    /// cplx_buf -> real_buf; divides by the spatial point count.
    void backward();

  private:
    std::int64_t n_real_ = 0, n_cplx_ = 0;
    int howmany_ = 1;
    double* real_ = nullptr;
    std::complex<double>* cplx_ = nullptr;
    void* plan_fwd_ = nullptr;
    void* plan_bwd_ = nullptr;
};

/// Full space-time real-to-complex FFT (rank d+1, time axis first).
class SpaceTimeFft {
  public:
    explicit SpaceTimeFft(const GridSpec& spec);
    ~SpaceTimeFft();
    SpaceTimeFft(const SpaceTimeFft&) = delete;
    SpaceTimeFft& operator=(const SpaceTimeFft&) = delete;

    std::int64_t n_real() const { return n_real_; }
    std::int64_t n_cplx() const { return n_cplx_; }

    double* real_buf() { return real_; }
    std::complex<double>* cplx_buf() { return cplx_; }

    void forward();
    /// cplx_buf -> real_buf; divides by the total point count.
    void backward();

  private:
    std::int64_t n_real_ = 0, n_cplx_ = 0;
    double* real_ = nullptr;
    std::complex<double>* cplx_ = nullptr;
    void* plan_fwd_ = nullptr;
    void* plan_bwd_ = nullptr;
};

/// Squared integer spatial frequencies |k|^2 in the r2c layout (length =
/// per-slice complex count). The Laplacian multiplier is -4*pi^2*|k|^2.
std::vector<double> spatial_ksq(const GridSpec& spec);

/// Squared integer spatial frequencies for the full (non-reduced) complex
/// mode grid of size n_x^d, index layout matching a c2c transform.
std::vector<double> spatial_ksq_full(const GridSpec& spec);

}  // namespace sac
