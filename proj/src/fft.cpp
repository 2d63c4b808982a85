#include "sac/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace sac {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

std::vector<int> spatial_dims(const GridSpec& spec) {
    return std::vector<int>(static_cast<std::size_t>(spec.d), spec.n_x);
}

std::int64_t cplx_count(const GridSpec& spec) {
    std::int64_t n = spec.n_x / 2 + 1;
    for (int i = 1; i < spec.d; ++i) n *= spec.n_x;
    return n;
}

}  // namespace

SpatialFft::SpatialFft(const GridSpec& spec, int howmany) : howmany_(howmany) {
    spec.validate();
    n_real_ = spec.n_space();
    n_cplx_ = cplx_count(spec);
    real_ = fftw_alloc_real(static_cast<std::size_t>(n_real_) * static_cast<std::size_t>(howmany));
    cplx_ = reinterpret_cast<std::complex<double>*>(
        fftw_alloc_complex(static_cast<std::size_t>(n_cplx_) * static_cast<std::size_t>(howmany)));
    auto dims = spatial_dims(spec);
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_fwd_ = fftw_plan_many_dft_r2c(spec.d, dims.data(), howmany, real_, nullptr, 1,
                                       static_cast<int>(n_real_),
                                       reinterpret_cast<fftw_complex*>(cplx_), nullptr, 1,
                                       static_cast<int>(n_cplx_), FFTW_ESTIMATE);
    plan_bwd_ = fftw_plan_many_dft_c2r(spec.d, dims.data(), howmany,
                                       reinterpret_cast<fftw_complex*>(cplx_), nullptr, 1,
                                       static_cast<int>(n_cplx_), real_, nullptr, 1,
                                       static_cast<int>(n_real_), FFTW_ESTIMATE);
}

SpatialFft::~SpatialFft() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
    fftw_free(real_);
    fftw_free(cplx_);
}

void SpatialFft::forward() { fftw_execute(static_cast<fftw_plan>(plan_fwd_)); }

void SpatialFft::backward() {
    fftw_execute(static_cast<fftw_plan>(plan_bwd_));
    const double inv = 1.0 / static_cast<double>(n_real_);
    const std::size_t total = static_cast<std::size_t>(n_real_) * static_cast<std::size_t>(howmany_);
    for (std::size_t i = 0; i < total; ++i) real_[i] *= inv;
}

SpaceTimeFft::SpaceTimeFft(const GridSpec& spec) {
    spec.validate();
    n_real_ = spec.n_total();
    n_cplx_ = static_cast<std::int64_t>(spec.n_t) * cplx_count(spec);
    real_ = fftw_alloc_real(static_cast<std::size_t>(n_real_));
    cplx_ = reinterpret_cast<std::complex<double>*>(
        fftw_alloc_complex(static_cast<std::size_t>(n_cplx_)));
    std::vector<int> dims;
    dims.push_back(spec.n_t);
    for (int i = 0; i < spec.d; ++i) dims.push_back(spec.n_x);
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_fwd_ = fftw_plan_dft_r2c(static_cast<int>(dims.size()), dims.data(), real_,
                                  reinterpret_cast<fftw_complex*>(cplx_), FFTW_ESTIMATE);
    plan_bwd_ = fftw_plan_dft_c2r(static_cast<int>(dims.size()), dims.data(),
                                  reinterpret_cast<fftw_complex*>(cplx_), real_, FFTW_ESTIMATE);
}

SpaceTimeFft::~SpaceTimeFft() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
    fftw_free(real_);
    fftw_free(cplx_);
}

void SpaceTimeFft::forward() { fftw_execute(static_cast<fftw_plan>(plan_fwd_)); }

void SpaceTimeFft::backward() {
    fftw_execute(static_cast<fftw_plan>(plan_bwd_));
    const double inv = 1.0 / static_cast<double>(n_real_);
    for (std::int64_t i = 0; i < n_real_; ++i) real_[static_cast<std::size_t>(i)] *= inv;
}

std::vector<double> spatial_ksq(const GridSpec& spec) {
    const int n = spec.n_x;
    const int nh = n / 2 + 1;
    const auto freq = [n](int j) {
        const int f = (j <= n / 2) ? j : j - n;
        return static_cast<double>(f) * static_cast<double>(f);
    };
    std::vector<double> ksq;
    ksq.reserve(static_cast<std::size_t>(cplx_count(spec)));
    if (spec.d == 1) {
        for (int jx = 0; jx < nh; ++jx) ksq.push_back(freq(jx));
    } else if (spec.d == 2) {
        for (int jy = 0; jy < n; ++jy)
            for (int jx = 0; jx < nh; ++jx) ksq.push_back(freq(jy) + freq(jx));
    } else {
        for (int jz = 0; jz < n; ++jz)
            for (int jy = 0; jy < n; ++jy)
                for (int jx = 0; jx < nh; ++jx) ksq.push_back(freq(jz) + freq(jy) + freq(jx));
    }
    return ksq;
}

std::vector<double> spatial_ksq_full(const GridSpec& spec) {
    const int n = spec.n_x;
    const auto freq = [n](int j) {
        const int f = (j <= n / 2) ? j : j - n;
        return static_cast<double>(f) * static_cast<double>(f);
    };
    std::vector<double> ksq;
    ksq.reserve(static_cast<std::size_t>(spec.n_space()));
    if (spec.d == 1) {
        for (int jx = 0; jx < n; ++jx) ksq.push_back(freq(jx));
    } else if (spec.d == 2) {
        for (int jy = 0; jy < n; ++jy)
            for (int jx = 0; jx < n; ++jx) ksq.push_back(freq(jy) + freq(jx));
    } else {
        for (int jz = 0; jz < n; ++jz)
            for (int jy = 0; jy < n; ++jy)
                for (int jx = 0; jx < n; ++jx) ksq.push_back(freq(jz) + freq(jy) + freq(jx));
    }
    return ksq;
}

}  // namespace sac
