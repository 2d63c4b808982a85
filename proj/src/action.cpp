#include "sac/action.hpp"

#include <cmath>
#include <cstring>
#include <deque>

#include "sac/errors.hpp"
#include "sac/fft.hpp"
#include "sac/fields.hpp"
#include "sac/kernels.hpp"
#include "sac/renorm.hpp"

namespace sac {

namespace {

constexpr double kTwoPiSq = 4.0 * M_PI * M_PI;

GridSpec residual_spec(const GridSpec& spec) {
    GridSpec rs = spec;
    rs.n_t = spec.n_t - 1;
    rs.T = spec.T * (spec.n_t - 1) / spec.n_t;  // same dt, one fewer level
    return rs;
}

}  // namespace

GridField residual(const Trajectory& traj, double C) {
    if (traj.blown_up())
        throw NumericalFailure("trajectory reached the cemetery state; action is infinite");
    const GridSpec& spec = traj.u.spec();
    if (spec.n_t < 2) throw StructuralError("residual needs at least two time levels");

    const GridField lap = laplacian(traj.u);
    GridField w(residual_spec(spec));
    const std::size_t nsp = static_cast<std::size_t>(spec.n_space());
    const double inv_dt = 1.0 / spec.dt();
    for (int i = 0; i + 1 < spec.n_t; ++i) {
        const double* u_i = traj.u.slice(i);
        const double* u_ip = traj.u.slice(i + 1);
        const double* l_i = lap.slice(i);
        double* w_i = w.slice(i);
        for (std::size_t j = 0; j < nsp; ++j) {
            const double u = u_i[j];
            w_i[j] = (u_ip[j] - u_i[j]) * inv_dt - l_i[j] - C * u + u * u * u;
        }
    }
    return w;
}

ActionResult action_value(const Trajectory& traj, double C) {
    ActionResult res;
    res.residual = residual(traj, C);
    res.value = 0.5 * res.residual.l2_sq();
    return res;
}

GridField action_gradient(const Trajectory& traj, double C) {
    const GridField w = residual(traj, C);
    const GridSpec& spec = traj.u.spec();
    const std::size_t nsp = static_cast<std::size_t>(spec.n_space());
    const double inv_dt = 1.0 / spec.dt();

    // spatial part (-Laplace - C + 3u^2) w on the levels where w lives
    const GridField lap_w = laplacian(w);
    GridField grad(spec);
    for (int j = 0; j < spec.n_t; ++j) {
        double* g = grad.slice(j);
        const double* wj = (j <= spec.n_t - 2) ? w.slice(j) : nullptr;
        const double* wjm = (j >= 1) ? w.slice(j - 1) : nullptr;
        const double* lj = (j <= spec.n_t - 2) ? lap_w.slice(j) : nullptr;
        const double* uj = traj.u.slice(j);
        for (std::size_t s = 0; s < nsp; ++s) {
            double v = 0.0;
            if (wjm) v += wjm[s] * inv_dt;
            if (wj) v -= wj[s] * inv_dt;
            if (wj) v += -lj[s] - C * wj[s] + 3.0 * uj[s] * uj[s] * wj[s];
            g[s] = v;
        }
    }
    return grad;
}

double TerminalCondition::value(const double* u_T, const GridSpec& spec) const {
    const std::size_t nsp = static_cast<std::size_t>(spec.n_space());
    const double cellw = spec.cell_volume();
    switch (kind) {
        case Kind::MatchField: {
            double acc = 0.0;
            for (std::size_t j = 0; j < nsp; ++j) {
                const double dvj = u_T[j] - (field.empty() ? 0.0 : field[j]);
                acc += dvj * dvj;
            }
            return 0.5 * cellw * acc;
        }
        case Kind::ExitBall: {
            double acc = 0.0;
            for (std::size_t j = 0; j < nsp; ++j) {
                const double dvj = u_T[j] - (field.empty() ? 0.0 : field[j]);
                acc += dvj * dvj;
            }
            const double dist = std::sqrt(cellw * acc);
            const double gap = radius - dist;
            return gap > 0.0 ? 0.5 * gap * gap : 0.0;
        }
        case Kind::MeanAbove: {
            const double mean = cellw * kernels::active().sum(u_T, nsp);
            const double gap = threshold - mean;
            return gap > 0.0 ? 0.5 * gap * gap : 0.0;
        }
        case Kind::MeanBelow: {
            const double mean = cellw * kernels::active().sum(u_T, nsp);
            const double gap = mean - threshold;
            return gap > 0.0 ? 0.5 * gap * gap : 0.0;
        }
    }
    return 0.0;
}

void TerminalCondition::gradient(const double* u_T, const GridSpec& spec, double* g) const {
    const std::size_t nsp = static_cast<std::size_t>(spec.n_space());
    const double cellw = spec.cell_volume();
    switch (kind) {
        case Kind::MatchField:
            for (std::size_t j = 0; j < nsp; ++j)
                g[j] = u_T[j] - (field.empty() ? 0.0 : field[j]);
            return;
        case Kind::ExitBall: {
            double acc = 0.0;
            for (std::size_t j = 0; j < nsp; ++j) {
                const double dvj = u_T[j] - (field.empty() ? 0.0 : field[j]);
                acc += dvj * dvj;
            }
            const double dist = std::sqrt(cellw * acc);
            const double gap = radius - dist;
            if (gap <= 0.0 || dist == 0.0) {
                std::memset(g, 0, sizeof(double) * nsp);
                return;
            }
            const double scale = -gap / dist;
            for (std::size_t j = 0; j < nsp; ++j)
                g[j] = scale * (u_T[j] - (field.empty() ? 0.0 : field[j]));
            return;
        }
        case Kind::MeanAbove: {
            const double mean = cellw * kernels::active().sum(u_T, nsp);
            const double gap = threshold - mean;
            const double v = gap > 0.0 ? -gap : 0.0;
            for (std::size_t j = 0; j < nsp; ++j) g[j] = v;
            return;
        }
        case Kind::MeanBelow: {
            const double mean = cellw * kernels::active().sum(u_T, nsp);
            const double gap = mean - threshold;
            const double v = gap > 0.0 ? gap : 0.0;
            for (std::size_t j = 0; j < nsp; ++j) g[j] = v;
            return;
        }
    }
}

namespace {

/// Forward solve and adjoint gradient for J(h) = 1/2||h||^2 + mu Phi(u_T).
/// Shares one spectral plan; returns J and fills grad when requested.
class PenalisedProblem {
  public:
    PenalisedProblem(const SolveConfig& base, const TerminalCondition& target, double c_eff)
        : cfg_(base), target_(target), c_eff_(c_eff), fft_(base.spec, 1) {
        const auto ksq = spatial_ksq(base.spec);
        implicit_.resize(ksq.size());
        for (std::size_t m = 0; m < ksq.size(); ++m)
            implicit_[m] = 1.0 / (1.0 + base.spec.dt() * kTwoPiSq * ksq[m]);
    }

    const GridSpec& spec() const { return cfg_.spec; }

    /// u = S(h); returns the trajectory.
    GridField forward(const GridField& h) {
        const GridSpec& spec = cfg_.spec;
        const std::size_t nsp = static_cast<std::size_t>(spec.n_space());
        const double dt = spec.dt();
        const double a = 1.0 + dt * c_eff_;
        GridField u(spec);
        if (!cfg_.u0.empty()) std::memcpy(u.slice(0), cfg_.u0.data(), sizeof(double) * nsp);
        for (int i = 0; i + 1 < spec.n_t; ++i) {
            kernels::active().poly_step(fft_.real_buf(), u.slice(i), h.slice(i), a, -dt, dt, nsp);
            apply_implicit();
            std::memcpy(u.slice(i + 1), fft_.real_buf(), sizeof(double) * nsp);
        }
        return u;
    }

    double objective(const GridField& h, const GridField& u, double mu) const {
        const GridSpec& spec = cfg_.spec;
        return 0.5 * h.l2_sq() + mu * target_.value(u.slice(spec.n_t - 1), spec);
    }

    /// grad J(h) in the space-time L2 geometry.
    GridField gradient(const GridField& h, const GridField& u, double mu) {
        const GridSpec& spec = cfg_.spec;
        const std::size_t nsp = static_cast<std::size_t>(spec.n_space());
        const double dt = spec.dt();
        const double a = 1.0 + dt * c_eff_;

        GridField grad = h;  // regularisation term
        std::vector<double> p(nsp);
        target_.gradient(u.slice(spec.n_t - 1), spec, p.data());
        kernels::active().scal(p.data(), mu, nsp);

        for (int n = spec.n_t - 2; n >= 0; --n) {
            // q = A p
            std::memcpy(fft_.real_buf(), p.data(), sizeof(double) * nsp);
            apply_implicit();
            const double* q = fft_.real_buf();
            double* g = grad.slice(n);
            const double* un = u.slice(n);
            for (std::size_t j = 0; j < nsp; ++j) {
                g[j] += q[j];
                p[j] = (a - 3.0 * dt * un[j] * un[j]) * q[j];
            }
        }
        return grad;
    }

  private:
    void apply_implicit() {
        fft_.forward();
        kernels::active().cmul_real(reinterpret_cast<double*>(fft_.cplx_buf()), implicit_.data(),
                                    static_cast<std::size_t>(fft_.n_cplx()));
        fft_.backward();
    }

    SolveConfig cfg_;
    TerminalCondition target_;
    double c_eff_;
    SpatialFft fft_;
    std::vector<double> implicit_;
};

struct LbfgsPair {
    GridField s, y;
    double rho = 0.0;
};

GridField lbfgs_direction(const std::deque<LbfgsPair>& mem, const GridField& grad) {
    GridField q = grad;
    std::vector<double> alpha(mem.size());
    for (std::size_t i = mem.size(); i-- > 0;) {
        alpha[i] = mem[i].rho * inner(mem[i].s, q);
        kernels::active().axpy(q.data(), -alpha[i], mem[i].y.data(), q.size());
    }
    if (!mem.empty()) {
        const auto& last = mem.back();
        const double gamma = inner(last.s, last.y) / inner(last.y, last.y);
        kernels::active().scal(q.data(), gamma, q.size());
    }
    for (std::size_t i = 0; i < mem.size(); ++i) {
        const double beta = mem[i].rho * inner(mem[i].y, q);
        kernels::active().axpy(q.data(), alpha[i] - beta, mem[i].s.data(), q.size());
    }
    kernels::active().scal(q.data(), -1.0, q.size());
    return q;
}

}  // namespace

InstantonResult minimize_action(const SolveConfig& base, const TerminalCondition& target,
                                const MinimizeOptions& opts, std::optional<double> lambda) {
    SolveConfig cfg = base;
    cfg.eps = 0.0;
    cfg.validate();

    double c_eff = cfg.C;
    InstantonResult result;
    if (lambda.has_value()) {
        c_eff = c_lambda(cfg.C, *lambda, cfg.spec.d, cfg.mollifier);
        if (cfg.spec.d == 1)
            result.note = "lambda variant is a no-op in d=1 (no renormalisation regime)";
    }

    PenalisedProblem prob(cfg, target, c_eff);
    GridField h(cfg.spec);

    bool all_converged = true;
    for (std::size_t stage = 0; stage < opts.mu_schedule.size(); ++stage) {
        const double mu = opts.mu_schedule[stage];
        GridField u = prob.forward(h);
        double J = prob.objective(h, u, mu);
        GridField grad = prob.gradient(h, u, mu);
        std::deque<LbfgsPair> mem;

        bool stage_converged = false;
        for (int iter = 0; iter < opts.max_iters; ++iter) {
            const double gnorm = std::sqrt(grad.l2_sq());
            if (opts.record_log)
                result.log.push_back({static_cast<int>(stage), iter, J, gnorm});
            if (gnorm <= opts.grad_tol * std::max(1.0, std::sqrt(h.l2_sq()))) {
                stage_converged = true;
                break;
            }

            GridField dir = lbfgs_direction(mem, grad);
            double slope = inner(grad, dir);
            if (slope >= 0.0) {  // fall back to steepest descent
                dir = grad;
                kernels::active().scal(dir.data(), -1.0, dir.size());
                slope = inner(grad, dir);
                mem.clear();
            }

            // Armijo backtracking
            double step = 1.0;
            GridField h_new = h;
            GridField u_new;
            double J_new = J;
            bool accepted = false;
            for (int ls = 0; ls < 40; ++ls) {
                h_new = h;
                kernels::active().axpy(h_new.data(), step, dir.data(), h_new.size());
                u_new = prob.forward(h_new);
                J_new = prob.objective(h_new, u_new, mu);
                if (J_new <= J + 1e-4 * step * slope) {
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) break;  // line search stalled

            GridField grad_new = prob.gradient(h_new, u_new, mu);
            LbfgsPair pair{h_new, grad_new, 0.0};
            // s = h_new - h, y = grad_new - grad (reuse allocations)
            kernels::active().axpy(pair.s.data(), -1.0, h.data(), pair.s.size());
            kernels::active().axpy(pair.y.data(), -1.0, grad.data(), pair.y.size());
            const double sy = inner(pair.s, pair.y);
            if (sy > 1e-12 * std::sqrt(pair.s.l2_sq() * pair.y.l2_sq())) {
                pair.rho = 1.0 / sy;
                mem.push_back(std::move(pair));
                if (static_cast<int>(mem.size()) > opts.lbfgs_memory) mem.pop_front();
            }
            h = std::move(h_new);
            u = std::move(u_new);
            grad = std::move(grad_new);
            J = J_new;

            if (iter + 1 == opts.max_iters) stage_converged = false;
        }
        if (!stage_converged) {
            // Continuation proceeds with the best point found; final stage
            // failure is reported through `converged`.
            if (stage + 1 == opts.mu_schedule.size()) all_converged = false;
        }
    }

    result.control = h;
    result.trajectory = solve_deterministic(cfg, h);
    result.trajectory.c_eff = c_eff;
    result.action = 0.5 * h.l2_sq();
    result.misfit = target.value(result.trajectory.u.slice(cfg.spec.n_t - 1), cfg.spec);
    result.converged = all_converged;
    return result;
}

}  // namespace sac
