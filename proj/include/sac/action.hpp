#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sac/solver.hpp"

namespace sac {

/// Freidlin-Wentzell residual w = D_t u - Laplace u - C u + u^3 with forward
/// time differences (one fewer time level) and the spectral Laplacian.
/// Throws NumericalFailure on a blown-up trajectory (infinite action).
GridField residual(const Trajectory& traj, double C);

struct ActionResult {
    double value = 0.0;   // 1/2 ||w||_L2^2
    GridField residual;
};

ActionResult action_value(const Trajectory& traj, double C);

/// Exact discrete adjoint of the residual map applied to w, so that
/// <grad, v> = d/ds I(u + s v)|_0 for the discrete functional.
GridField action_gradient(const Trajectory& traj, double C);

/// Terminal condition for the instanton problem: either a full endpoint
/// field, exit from an L2 ball, or a spatial-mean threshold.
struct TerminalCondition {
    enum class Kind { MatchField, ExitBall, MeanAbove, MeanBelow };
    Kind kind = Kind::MatchField;
    std::vector<double> field;   // target (MatchField) or centre (ExitBall); empty = zero
    double radius = 0.0;         // ExitBall
    double threshold = 0.0;      // MeanAbove / MeanBelow

    /// Penalty value at a terminal slice (L2(space) geometry).
    double value(const double* u_T, const GridSpec& spec) const;
    /// L2(space) gradient of the penalty, written into g.
    void gradient(const double* u_T, const GridSpec& spec, double* g) const;
};

struct MinimizeOptions {
    std::vector<double> mu_schedule = {10.0, 100.0, 1000.0};
    int max_iters = 200;        // per continuation stage
    double grad_tol = 1e-9;     // on the L2 norm of grad J
    int lbfgs_memory = 8;
    bool record_log = true;
};

struct IterRecord {
    int stage = 0;
    int iter = 0;
    double objective = 0.0;
    double grad_norm = 0.0;
};

struct InstantonResult {
    GridField control;        // minimising h
    Trajectory trajectory;    // S(h)
    double action = 0.0;      // 1/2 ||h||^2
    double misfit = 0.0;      // terminal penalty value at the solution
    bool converged = false;
    std::string note;
    std::vector<IterRecord> log;
};

/// Minimise J(h) = 1/2 ||h||^2 + mu * Phi(S(h)(T)) over grid controls by
/// L-BFGS with adjoint gradients and continuation in mu. When lambda is
/// given, the linear coefficient is replaced by c_lambda(C, lambda, d).
InstantonResult minimize_action(const SolveConfig& base, const TerminalCondition& target,
                                const MinimizeOptions& opts = {},
                                std::optional<double> lambda = std::nullopt);

}  // namespace sac
