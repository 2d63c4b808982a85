#pragma once

// Shared helpers and brute-force oracles for the test suites. Everything in
// here is deliberately independent of the library's FFT/convolution paths.

#include <cmath>
#include <random>
#include <vector>

#include "sac/grid.hpp"

namespace sac::testing {

inline GridField random_field(const GridSpec& spec, unsigned rng_seed, double scale = 1.0) {
    GridField f(spec);
    std::mt19937_64 rng(rng_seed);
    std::normal_distribution<double> dist(0.0, scale);
    for (std::size_t i = 0; i < f.size(); ++i) f.data()[i] = dist(rng);
    return f;
}

/// Smooth random field: a few low Fourier modes with random amplitudes.
inline GridField random_smooth_field(const GridSpec& spec, unsigned rng_seed, double scale = 1.0,
                                     int max_mode = 2) {
    GridField f(spec);
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> amp(-scale, scale);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    const int n = spec.n_x;
    const int ny = spec.d >= 2 ? n : 1;
    const int nz = spec.d >= 3 ? n : 1;
    for (int kt = 0; kt <= max_mode; ++kt)
        for (int kx = -max_mode; kx <= max_mode; ++kx)
            for (int ky = (spec.d >= 2 ? -max_mode : 0); ky <= (spec.d >= 2 ? max_mode : 0); ++ky)
                for (int kz = (spec.d >= 3 ? -max_mode : 0); kz <= (spec.d >= 3 ? max_mode : 0); ++kz) {
                    const double a = amp(rng);
                    const double ph = phase(rng);
                    const double pht = phase(rng);
                    for (int i = 0; i < spec.n_t; ++i) {
                        const double t = i * spec.dt();
                        const double ct = std::cos(2.0 * M_PI * kt * t / spec.T + pht);
                        double* s = f.slice(i);
                        std::int64_t idx = 0;
                        for (int jz = 0; jz < nz; ++jz)
                            for (int jy = 0; jy < ny; ++jy)
                                for (int jx = 0; jx < n; ++jx, ++idx) {
                                    const double arg = 2.0 * M_PI *
                                        (kx * jx * spec.dx() + ky * jy * spec.dx() + kz * jz * spec.dx());
                                    s[idx] += a * ct * std::cos(arg + ph);
                                }
                    }
                }
    return f;
}

/// O(N^2) circular space-time convolution with the dt*dx^d weight.
inline GridField brute_force_convolve(const GridField& f, const GridField& g) {
    const GridSpec& spec = f.spec();
    GridField out(spec);
    const int nt = spec.n_t;
    const int n = spec.n_x;
    const int ny = spec.d >= 2 ? n : 1;
    const int nz = spec.d >= 3 ? n : 1;
    const double w = spec.node_weight();
    auto sidx = [&](int jx, int jy, int jz) {
        std::int64_t idx = jx;
        if (spec.d >= 2) idx += static_cast<std::int64_t>(jy) * n;
        if (spec.d >= 3) idx += static_cast<std::int64_t>(jz) * n * n;
        return idx;
    };
    auto mod = [](int a, int m) { return ((a % m) + m) % m; };
    for (int it = 0; it < nt; ++it)
        for (int iz = 0; iz < nz; ++iz)
            for (int iy = 0; iy < ny; ++iy)
                for (int ix = 0; ix < n; ++ix) {
                    double acc = 0.0;
                    for (int st = 0; st < nt; ++st)
                        for (int sz = 0; sz < nz; ++sz)
                            for (int sy = 0; sy < ny; ++sy)
                                for (int sx = 0; sx < n; ++sx)
                                    acc += f.at(st, sidx(sx, sy, sz)) *
                                           g.at(mod(it - st, nt),
                                                sidx(mod(ix - sx, n), mod(iy - sy, ny),
                                                     mod(iz - sz, nz)));
                    out.at(it, sidx(ix, iy, iz)) = w * acc;
                }
    return out;
}

inline double rel_err(double got, double want) {
    return std::fabs(got - want) / std::max(1e-300, std::fabs(want));
}

inline double max_abs_diff(const GridField& a, const GridField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::fabs(a.data()[i] - b.data()[i]));
    return m;
}

struct MeanVar {
    double mean = 0.0;
    double var = 0.0;
    double stderr_mean = 0.0;
};

inline MeanVar mean_var(const std::vector<double>& xs) {
    MeanVar mv;
    const double n = static_cast<double>(xs.size());
    for (double x : xs) mv.mean += x;
    mv.mean /= n;
    for (double x : xs) mv.var += (x - mv.mean) * (x - mv.mean);
    mv.var /= (n - 1.0);
    mv.stderr_mean = std::sqrt(mv.var / n);
    return mv;
}

}  // namespace sac::testing
