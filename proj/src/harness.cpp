#include "sac/harness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "sac/errors.hpp"
#include "sac/kernels.hpp"
#include "sac/renorm.hpp"

namespace sac {

double Schedule::delta_floor(const GridSpec& spec) {
    return std::max(2.0 * spec.dx(), std::sqrt(2.0 * spec.dt()));
}

double Schedule::delta(double eps) const {
    if (!(eps > 0.0) || eps >= 1.0) throw DomainError("schedule expects eps in (0,1)");
    if (lambda < 0.0) throw DomainError("lambda must be nonnegative");
    if (fixed_delta) return *fixed_delta;
    switch (d) {
        case 3:
            return lambda > 0.0 ? eps / (lambda * lambda) : std::sqrt(eps);
        case 2:
            return lambda > 0.0 ? std::exp(-lambda * lambda / eps)
                                : std::exp(-1.0 / std::sqrt(eps));
        case 1:
            if (lambda > 0.0)
                throw UnsupportedError("d=1 has no diagonal-limit regime; lambda must be 0");
            return std::sqrt(eps);
        default:
            throw DomainError("schedule dimension must be in {1,2,3}");
    }
}

void Schedule::require_resolvable(double eps, const GridSpec& spec) const {
    const double dl = delta(eps);
    const double floor = delta_floor(spec);
    if (dl >= floor) return;
    // invert delta(eps) >= floor for the minimal feasible eps
    double eps_min = 0.0;
    if (d == 3)
        eps_min = lambda > 0.0 ? floor * lambda * lambda : floor * floor;
    else if (d == 2)
        eps_min = lambda > 0.0 ? lambda * lambda / std::log(1.0 / floor)
                               : 1.0 / std::pow(std::log(1.0 / floor), 2);
    else
        eps_min = floor * floor;
    throw ResolutionError("schedule delta(" + std::to_string(eps) + ") = " + std::to_string(dl) +
                          " is below the grid floor " + std::to_string(floor) +
                          "; minimal feasible eps is about " + std::to_string(eps_min));
}

std::string EventSpec::name() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::TerminalL2Exit: os << "terminal-l2-exit(r=" << radius << ")"; break;
        case Kind::RunningSupExceed: os << "running-sup-exceed(s=" << level << ")"; break;
        case Kind::SignChange: os << "sign-change(level=" << level << ")"; break;
    }
    return os.str();
}

bool event_occurred(const EventSpec& event, const Trajectory& traj) {
    if (traj.blown_up()) return true;
    const GridSpec& spec = traj.u.spec();
    const std::size_t nsp = static_cast<std::size_t>(spec.n_space());
    switch (event.kind) {
        case EventSpec::Kind::TerminalL2Exit: {
            const double* uT = traj.u.slice(spec.n_t - 1);
            double acc = 0.0;
            for (std::size_t j = 0; j < nsp; ++j) {
                const double dv = uT[j] - (event.center.empty() ? 0.0 : event.center[j]);
                acc += dv * dv;
            }
            return std::sqrt(spec.cell_volume() * acc) >= event.radius;
        }
        case EventSpec::Kind::RunningSupExceed:
            return traj.u.sup_abs() >= event.level;
        case EventSpec::Kind::SignChange: {
            for (int i = 0; i < spec.n_t; ++i) {
                const double mean = spec.cell_volume() *
                                    kernels::active().sum(traj.u.slice(i), nsp);
                if (mean <= -event.level) return true;
            }
            return false;
        }
    }
    return false;
}

TerminalCondition event_terminal_condition(const EventSpec& event, const GridSpec& spec) {
    TerminalCondition tc;
    switch (event.kind) {
        case EventSpec::Kind::TerminalL2Exit:
            tc.kind = TerminalCondition::Kind::ExitBall;
            tc.field = event.center;
            tc.radius = event.radius;
            return tc;
        case EventSpec::Kind::SignChange:
            tc.kind = TerminalCondition::Kind::MeanBelow;
            tc.threshold = -event.level;
            return tc;
        case EventSpec::Kind::RunningSupExceed:
            throw UnsupportedError(
                "running-sup events have no terminal tilting target; use the plain estimator");
    }
    return tc;
}

namespace {

/// Deterministic trial partition: results land in per-trial slots, so the
/// aggregate is independent of the worker count and execution order.
template <typename Fn>
void parallel_trials(long trials, int workers, Fn&& per_trial) {
    workers = std::max(1, workers);
    if (workers == 1) {
        for (long t = 0; t < trials; ++t) per_trial(t);
        return;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (long t = w; t < trials; t += workers) per_trial(t);
        });
    for (auto& th : pool) th.join();
}

}  // namespace

LdpTable estimate_rare_event(const SolveConfig& base, const Schedule& schedule,
                             const std::vector<double>& eps_list, const EventSpec& event,
                             const RareEventOptions& opts, const GridField* tilt_control) {
    if (opts.trials < 1) throw ConfigError("trials must be >= 1");
    if (opts.estimator == Estimator::Tilted && tilt_control == nullptr)
        throw ConfigError("tilted estimator requires an instanton control");

    LdpTable table;
    table.event = event.name();
    table.estimator = opts.estimator == Estimator::Plain ? "plain" : "tilted";

    const double floor = Schedule::delta_floor(base.spec);
    std::size_t row_index = 0;
    for (double eps : eps_list) {
        LdpRow row;
        row.eps = eps;
        row.delta_schedule = schedule.delta(eps);
        row.delta_used = row.delta_schedule;
        row.trials = opts.trials;
        if (row.delta_schedule < floor) {
            if (!opts.allow_delta_floor) schedule.require_resolvable(eps, base.spec);
            row.delta_used = floor;
            row.flagged = true;
            row.flag = "delta capped at the grid floor";
        }

        SolveConfig cfg = base;
        cfg.eps = eps;
        cfg.delta = row.delta_used;
        if (cfg.renormalised && !cfg.constants.has_value())
            cfg.constants = compute_constants(cfg.spec, cfg.delta, cfg.mollifier);
        cfg.validate();

        GridField shift_forcing;
        double control_sq = 0.0;
        if (opts.estimator == Estimator::Tilted) {
            shift_forcing = mollify(*tilt_control, row.delta_used, cfg.mollifier);
            control_sq = tilt_control->l2_sq();
        }

        const std::uint64_t row_seed = derive_trial_seed(opts.master_seed, 1000003ull * row_index);
        std::vector<double> contrib(static_cast<std::size_t>(opts.trials), 0.0);

        parallel_trials(opts.trials, opts.workers, [&](long t) {
            const auto xi = sample_white_noise(cfg.spec,
                                               derive_trial_seed(row_seed, static_cast<std::uint64_t>(t)));
            if (opts.estimator == Estimator::Plain) {
                const Trajectory traj = solve(cfg, &xi);
                contrib[static_cast<std::size_t>(t)] = event_occurred(event, traj) ? 1.0 : 0.0;
            } else {
                const Trajectory traj = solve(cfg, &xi, &shift_forcing);
                if (event_occurred(event, traj)) {
                    const double ip = inner(xi.values, *tilt_control);
                    const double logw = -ip / std::sqrt(eps) - control_sq / (2.0 * eps);
                    contrib[static_cast<std::size_t>(t)] = std::exp(logw);
                }
            }
        });

        double sum = 0.0;
        for (double c : contrib) sum += c;
        row.hits = sum;
        row.p_hat = sum / static_cast<double>(opts.trials);
        if (opts.estimator == Estimator::Plain) {
            row.stderr_p = std::sqrt(std::max(0.0, row.p_hat * (1.0 - row.p_hat)) /
                                     static_cast<double>(opts.trials));
        } else {
            double var = 0.0;
            for (double c : contrib) var += (c - row.p_hat) * (c - row.p_hat);
            var /= std::max(1.0, static_cast<double>(opts.trials - 1));
            row.stderr_p = std::sqrt(var / static_cast<double>(opts.trials));
        }
        if (row.p_hat > 0.0) {
            row.rate_estimate = -eps * std::log(row.p_hat);
        } else {
            // one-sided 95% binomial bound instead of -eps log 0
            row.rate_estimate = -eps * std::log(3.0 / static_cast<double>(opts.trials));
            row.flagged = true;
            row.flag += std::string(row.flag.empty() ? "" : "; ") +
                        "zero hits: rate is a one-sided bound";
        }
        table.rows.push_back(std::move(row));
        ++row_index;
    }
    return table;
}

RateComparison compare_with_rate(const LdpTable& table, double instanton_action) {
    RateComparison cmp;
    cmp.instanton_action = instanton_action;

    std::vector<LdpRow> rows = table.rows;
    std::sort(rows.begin(), rows.end(),
              [](const LdpRow& a, const LdpRow& b) { return a.eps > b.eps; });
    for (const auto& r : rows) {
        RateComparisonRow out;
        out.eps = r.eps;
        out.rate_estimate = r.rate_estimate;
        out.rate_stderr = (r.p_hat > 0.0) ? r.eps * r.stderr_p / r.p_hat : 0.0;
        out.gap = std::fabs(r.rate_estimate - instanton_action);
        cmp.rows.push_back(out);
    }

    int valid = 0;
    for (const auto& r : rows)
        if (r.p_hat > 0.0) ++valid;
    if (valid < 2) {
        cmp.verdict = "insufficient-data";
    } else {
        bool shrinking = true;
        for (std::size_t k = 0; k + 1 < cmp.rows.size(); ++k) {
            const double slack = cmp.rows[k].rate_stderr + cmp.rows[k + 1].rate_stderr;
            if (cmp.rows[k + 1].gap > cmp.rows[k].gap + slack) shrinking = false;
        }
        if (cmp.rows.back().gap > cmp.rows.front().gap +
                                      (cmp.rows.front().rate_stderr + cmp.rows.back().rate_stderr))
            shrinking = false;
        cmp.verdict = shrinking ? "consistent" : "inconsistent";
    }

    std::ostringstream os;
    os << "rate-function comparison (instanton action = " << instanton_action << ")\n";
    os << "  eps        -eps*log(P)   stderr      gap\n";
    for (const auto& r : cmp.rows) {
        os << "  " << r.eps << "  " << r.rate_estimate << "  " << r.rate_stderr << "  " << r.gap
           << "\n";
    }
    os << "verdict: " << cmp.verdict << "\n";
    cmp.rendering = os.str();
    return cmp;
}

std::vector<CLambdaTrendRow> c_lambda_trend(const SolveConfig& base, double lambda,
                                            const std::vector<double>& eps_list, int n_seeds,
                                            std::uint64_t master_seed, int workers) {
    if (base.spec.d != 2)
        throw UnsupportedError("the diagonal-coefficient trend check runs in d=2");
    const Schedule schedule{2, lambda};
    const double floor = Schedule::delta_floor(base.spec);

    // Lattice intercept: c1(delta) - log(1/delta)/(4 pi) at a resolvable scale.
    const double delta_ref = floor;
    const double intercept = c1_constant(base.spec, delta_ref, base.mollifier) -
                             std::log(1.0 / delta_ref) / (4.0 * M_PI);
    const double c_lam = c_lambda(base.C, lambda, 2, base.mollifier);

    std::vector<CLambdaTrendRow> rows;
    std::size_t row_index = 0;
    for (double eps : eps_list) {
        CLambdaTrendRow row;
        row.eps = eps;
        row.delta_schedule = schedule.delta(eps);
        row.delta_used = std::max(row.delta_schedule, floor);
        row.c1_schedule = std::log(1.0 / row.delta_schedule) / (4.0 * M_PI) + intercept;
        row.c_eff_renorm = c_lam + 3.0 * eps * row.c1_schedule;
        row.seeds = n_seeds;

        SolveConfig cfg_plain = base;
        cfg_plain.eps = eps;
        cfg_plain.delta = row.delta_used;
        cfg_plain.renormalised = false;
        cfg_plain.validate();
        SolveConfig cfg_renorm = cfg_plain;
        cfg_renorm.C = row.c_eff_renorm;

        const std::uint64_t row_seed = derive_trial_seed(master_seed, 7919ull * row_index);
        std::vector<double> dists(static_cast<std::size_t>(n_seeds), 0.0);
        parallel_trials(n_seeds, workers, [&](long s) {
            const auto xi = sample_white_noise(cfg_plain.spec,
                                               derive_trial_seed(row_seed, static_cast<std::uint64_t>(s)));
            const Trajectory a = solve(cfg_plain, &xi);
            const Trajectory b = solve(cfg_renorm, &xi);
            const GridSpec& spec = cfg_plain.spec;
            const std::size_t nsp = static_cast<std::size_t>(spec.n_space());
            const double* ua = a.u.slice(spec.n_t - 1);
            const double* ub = b.u.slice(spec.n_t - 1);
            double acc = 0.0;
            for (std::size_t j = 0; j < nsp; ++j) acc += (ua[j] - ub[j]) * (ua[j] - ub[j]);
            dists[static_cast<std::size_t>(s)] = std::sqrt(spec.cell_volume() * acc);
        });

        std::sort(dists.begin(), dists.end());
        row.median_l2_dist = dists[dists.size() / 2];
        rows.push_back(row);
        ++row_index;
    }
    return rows;
}

}  // namespace sac
