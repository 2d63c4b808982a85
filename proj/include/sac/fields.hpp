#pragma once

#include <array>

#include "sac/grid.hpp"

namespace sac {

/// Causal heat convolution (P * f)(t,x) = int_0^t e^{(t-s) Laplace} f(s,.) ds.
/// Spatial Fourier multiplier with an exact exponential integrator per step,
/// treating f as piecewise constant in time. Output node 0 is zero.
GridField heat_convolve(const GridField& f);

/// Transpose of heat_convolve in the dt*dx^d inner product:
/// <heat_convolve(f), g> = <f, heat_convolve_adjoint(g)>.
GridField heat_convolve_adjoint(const GridField& g);

/// Circular space-time convolution with the dt*dx^d weight:
/// (f * g)(z) = dt*dx^d sum_w f(w) g(z - w), computed by FFT.
GridField periodic_convolve(const GridField& f, const GridField& g);

/// Spectral periodic Laplacian.
GridField laplacian(const GridField& f);

/// Periodic heat kernel sampled on the grid; slice 0 carries the discrete
/// delta (mass 1 under the dx^d weight), slice i the kernel at time i*dt.
GridField heat_kernel_field(const GridSpec& spec);

/// Smooth compactly supported bump scaled parabolically around a centre:
/// phi_z^lambda(w) = lambda^{-(d+2)} phi((w_t - t0)/lambda^2, (w_x - x0)/lambda).
/// The base profile is a product of one-dimensional bumps exp(-a/(1-s^2))
/// normalised to unit integral.
struct TestFunction {
    enum class Profile { Bump, SharpBump };
    Profile profile = Profile::Bump;
    double t0 = 0.5;
    std::array<double, 3> x0{0.0, 0.0, 0.0};
    double lambda = 0.25;
};

/// Sample phi_z^lambda on the grid nodes (periodic minimal image in space).
GridField sample_test_function(const GridSpec& spec, const TestFunction& tf);

/// dt*dx^d sum f * phi_z^lambda. Throws DomainError when lambda is outside
/// (0,1] or the support does not fit the cell.
double test_pair(const GridField& f, const TestFunction& tf);

}  // namespace sac
