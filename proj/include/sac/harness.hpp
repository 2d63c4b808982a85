#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sac/action.hpp"
#include "sac/solver.hpp"

namespace sac {

/// Diagonal schedule delta(eps) classified by lambda:
///   d=3: eps/lambda^2 (lambda > 0), sqrt(eps) for lambda = 0;
///   d=2: exp(-lambda^2/eps) (lambda > 0), exp(-1/sqrt(eps)) for lambda = 0;
///   d=1: sqrt(eps), lambda must be 0 (sanity tier, no renormalisation).
struct Schedule {
    int d = 2;
    double lambda = 0.0;
    /// When set, the schedule is the constant map eps -> fixed_delta
    /// (used for fixed-correlation scans).
    std::optional<double> fixed_delta;

    double delta(double eps) const;
    /// Throws ResolutionError naming the minimal feasible eps when delta(eps)
    /// is below the grid's mollifier floor.
    void require_resolvable(double eps, const GridSpec& spec) const;
    /// Smallest mollifier scale the grid supports.
    static double delta_floor(const GridSpec& spec);
};

struct EventSpec {
    enum class Kind { TerminalL2Exit, RunningSupExceed, SignChange };
    Kind kind = Kind::TerminalL2Exit;
    std::vector<double> center;  // TerminalL2Exit; empty = zero field
    double radius = 1.0;         // TerminalL2Exit
    double level = 1.0;          // RunningSupExceed / SignChange (mean <= -level)

    std::string name() const;
};

/// Event evaluation; a trajectory in the cemetery state counts as a hit
/// (exit and exceedance events are trivially realised by blowup).
bool event_occurred(const EventSpec& event, const Trajectory& traj);

/// Terminal condition whose minimiser tilts the noise toward the event.
TerminalCondition event_terminal_condition(const EventSpec& event, const GridSpec& spec);

enum class Estimator { Plain, Tilted };

struct LdpRow {
    double eps = 0.0;
    double delta_schedule = 0.0;
    double delta_used = 0.0;
    long trials = 0;
    double hits = 0.0;      // plain: count; tilted: weighted sum
    double p_hat = 0.0;
    double stderr_p = 0.0;
    double rate_estimate = 0.0;  // -eps log p_hat
    bool flagged = false;
    std::string flag;
};

struct LdpTable {
    std::string event;
    std::string estimator;
    std::vector<LdpRow> rows;
};

struct RareEventOptions {
    long trials = 1000;
    Estimator estimator = Estimator::Plain;
    std::uint64_t master_seed = 1;
    int workers = 1;
    /// Cap schedule deltas at the grid floor instead of erroring (rows are
    /// flagged). Default off: unresolvable scales are an error.
    bool allow_delta_floor = false;
};

/// Monte Carlo estimate of P(event) for each eps along the schedule. The
/// tilted estimator shifts the noise by h*/sqrt(eps) (h* = supplied instanton
/// control) and reweights by the exact finite-dimensional Gaussian density
/// ratio exp(-<h*, xi>/sqrt(eps) - ||h*||^2/(2 eps)).
LdpTable estimate_rare_event(const SolveConfig& base, const Schedule& schedule,
                             const std::vector<double>& eps_list, const EventSpec& event,
                             const RareEventOptions& opts,
                             const GridField* tilt_control = nullptr);

struct RateComparisonRow {
    double eps = 0.0;
    double rate_estimate = 0.0;
    double rate_stderr = 0.0;
    double gap = 0.0;  // |rate_estimate - instanton action|
};

struct RateComparison {
    double instanton_action = 0.0;
    std::vector<RateComparisonRow> rows;  // sorted by decreasing eps
    std::string verdict;                  // "consistent" / "inconsistent" / "insufficient-data"
    std::string rendering;                // human-readable block
};

/// Compare -eps log P against the instanton action; the gap must shrink as
/// eps decreases (within combined standard errors) for an LDP-consistent
/// verdict.
RateComparison compare_with_rate(const LdpTable& table, double instanton_action);

struct CLambdaTrendRow {
    double eps = 0.0;
    double delta_schedule = 0.0;
    double delta_used = 0.0;
    double c1_schedule = 0.0;   // (log divergence at the schedule scale) + fitted intercept
    double c_eff_renorm = 0.0;
    double median_l2_dist = 0.0;
    int seeds = 0;
};

/// Desk-scale check of the diagonal-limit coefficient shift in d=2: running
/// the unrenormalised equation with coefficient C against the renormalised
/// equation based at C_lambda (both driven by the same noise realisations),
/// the terminal L2 distance must shrink as eps halves along the schedule.
/// Noise scales below the grid floor are capped (and recorded); the
/// counterterm uses the schedule's own divergence with a lattice-fitted
/// intercept, so the two effective coefficients converge like O(eps).
std::vector<CLambdaTrendRow> c_lambda_trend(const SolveConfig& base, double lambda,
                                            const std::vector<double>& eps_list, int n_seeds,
                                            std::uint64_t master_seed, int workers = 1);

}  // namespace sac
