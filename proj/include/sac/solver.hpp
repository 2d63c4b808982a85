#pragma once

#include <optional>
#include <vector>

#include "sac/grid.hpp"
#include "sac/noise.hpp"
#include "sac/renorm.hpp"

namespace sac {

/// Configuration for one Allen-Cahn trajectory
///   du = Laplace u + C_eff u - u^3 + sqrt(eps) xi_delta + h,
/// with C_eff = C + 3 eps c1 - 9 eps^2 c2 when renormalised.
struct SolveConfig {
    GridSpec spec;
    double C = 0.0;
    double eps = 0.0;
    double delta = 0.0;            // required when eps > 0
    bool renormalised = false;
    std::vector<double> u0;        // initial spatial slice; empty = zero
    double blowup_threshold = 1e6;
    bool dealias_two_thirds = false;
    Mollifier mollifier;
    std::optional<RenormConstants> constants;  // computed on demand if absent

    void validate() const;
    double effective_c(const RenormConstants* rc) const;
};

struct Trajectory {
    GridField u;
    SolveConfig config;
    double c_eff = 0.0;
    std::optional<double> blowup_time;

    bool blown_up() const { return blowup_time.has_value(); }
};

/// Semi-implicit Euler spectral scheme: Laplacian implicit in Fourier space,
/// reaction and forcing explicit, noise read slice-by-slice from a space-time
/// realisation sampled once (piecewise constant in time).
Trajectory solve(const SolveConfig& cfg, const NoiseRealization* xi = nullptr,
                 const GridField* h = nullptr);

/// The deterministic control-to-state map S(h): solve with eps = 0.
Trajectory solve_deterministic(const SolveConfig& cfg, const GridField& h);

}  // namespace sac
