#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sac/fields.hpp"
#include "sac/grid.hpp"
#include "sac/noise.hpp"
#include "sac/renorm.hpp"

namespace sac {

/// Hermite polynomials normalised so that exp(l x - l^2/2) = sum l^k/sqrt(k!) H_k(x),
/// i.e. orthonormal under the standard Gaussian. Stable three-term recurrence.
double hermite(int k, double x);

/// Gauss-Hermite nodes and weights for weight exp(-x^2) (physicists'),
/// suitable for Gaussian-measure quadrature after the sqrt(2) substitution.
struct GaussHermite {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussHermite gauss_hermite(int n);

/// Pointwise Wick power: k=2 -> f^2 - C, k=3 -> f^3 - 3 C f.
GridField wick_power(const GridField& f, int k, double C);

/// The minimal model built from one noise realisation: the smoothed noise,
/// the stochastic convolution, its Wick square and cube, and (d=3) their heat
/// integrals. The input noise enters with amplitude sqrt(eps); counterterms
/// scale as eps*c1 and eps^2*c2.
struct MinimalModel {
    int d = 2;
    double delta = 0.0;
    double eps = 1.0;
    bool renormalised = true;
    RenormConstants consts;

    GridField noise_smooth;               // sqrt(eps) * xi_delta
    GridField lin;                        // P * noise_smooth
    GridField quad;                       // Wick square of lin
    GridField cubic;                      // Wick cube of lin
    std::optional<GridField> quad_int;    // d=3: P * quad
    std::optional<GridField> cubic_int;   // d=3: P * cubic
};

MinimalModel build_minimal_model(const GridField& xi_values, double delta, bool renormalised,
                                 double eps, const RenormConstants& consts,
                                 const Mollifier& rho = Mollifier{});
MinimalModel build_minimal_model(const NoiseRealization& xi, double delta, bool renormalised,
                                 double eps, const RenormConstants& consts,
                                 const Mollifier& rho = Mollifier{});

/// The three composite d=3 symbols whose products need the base-point
/// subtraction: I(quad)*quad, I(cubic)*lin, I(cubic)*quad.
enum class CompositeSymbol { QuadIntTimesQuad, CubicIntTimesLin, CubicIntTimesQuad };

/// Pairing of the (renormalised or raw) composite product field against phi,
/// with the base point z taken at phi's centre: the integrated factor is
/// evaluated as field(w) - field(z) before multiplication.
double model_pair_3d(const MinimalModel& model, CompositeSymbol tau, const TestFunction& phi);

/// Monte Carlo check of the Cameron-Martin shift identity: the mean of the
/// renormalised Wick square under xi + h equals the canonical square of the
/// smoothed deterministic shift.
struct CmShiftReport {
    double mc_mean = 0.0;
    double mc_stderr = 0.0;
    double canonical = 0.0;
    double z_score = 0.0;
    int n_samples = 0;
};
CmShiftReport cameron_martin_shift_check(const GridField& h, double delta, const TestFunction& phi,
                                         int n_samples, std::uint64_t master_seed,
                                         const Mollifier& rho = Mollifier{});

/// Sample accumulator for pairings of one model component over seeds, with
/// the tail diagnostics suggested by hypercontractivity: |X| has stretched
/// exponential tails with exponent 2/K for chaos order K.
struct ChaosSampleStats {
    std::vector<double> samples;

    void add(double x) { samples.push_back(x); }
    double mean() const;
    double stderr_mean() const;
    double variance() const;
    /// Least-squares R^2 of fitting log-survival on the top decile as
    /// linear in t versus linear in t^2.
    struct TailFit {
        double r2_linear = 0.0;
        double r2_quadratic = 0.0;
    };
    TailFit tail_fit() const;
};

}  // namespace sac
