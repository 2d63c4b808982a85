#pragma once

#include <optional>
#include <string>

#include "sac/grid.hpp"
#include "sac/noise.hpp"

namespace sac {

/// Counterterms for the renormalised equation at mollification scale delta,
/// computed on the same lattice as the simulation that consumes them so the
/// discrete Wick cancellation is exact. Values are unscaled; the equation
/// inserts eps*c1 and eps^2*c2.
struct RenormConstants {
    int d = 2;
    double delta = 0.0;
    std::string mollifier;
    double c1 = 0.0;
    std::optional<double> c2;  // d = 3 only
    std::string provenance;    // "fourier-quadrature"
};

/// Variance of the mollified stochastic convolution (P * xi_delta)(t_ref, x)
/// under the lattice noise model, evaluated by an exact per-mode quadrature
/// (closed-form geometric sums; no sampling). Diverges like log(1/delta)/(4 pi)
/// in d=2 and like 1/delta in d=3; finite limit in d=1.
/// t_ref defaults to T/2 (snapped to the grid).
double c1_constant(const GridSpec& spec, double delta, const Mollifier& rho = Mollifier{},
                   double t_ref = -1.0);

/// Second-order counterterm 2 int P(z) Q_delta(z)^2 dz with
/// Q_delta = autocorrelation of P * rho_delta, by FFT quadrature on the grid.
/// Diverges logarithmically; only defined in d=3.
double c2_constant(const GridSpec& spec, double delta, const Mollifier& rho = Mollifier{});

/// Lattice quadrature of int (P * rho_delta)^2 over the space-time window.
/// By parabolic scaling, delta * this value approximates the unit-scale
/// integral int (P * rho)^2 entering the d=3 constants.
double kernel_l2_quadrature(const GridSpec& spec, double delta,
                            const Mollifier& rho = Mollifier{});

/// Shifted linear coefficient of the diagonal-limit rate function:
/// d=3: C - 3 lambda^2 int (P * rho)^2 (quadrature at reference scale);
/// d=2: C - 3 lambda^2 / (4 pi); d=1: C unchanged (flagged by the caller).
double c_lambda(double C, double lambda, int d, const Mollifier& rho = Mollifier{},
                const GridSpec* quad_spec = nullptr);

RenormConstants compute_constants(const GridSpec& spec, double delta,
                                  const Mollifier& rho = Mollifier{}, double t_ref = -1.0);

}  // namespace sac
