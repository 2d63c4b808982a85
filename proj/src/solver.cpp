#include "sac/solver.hpp"

#include <cmath>
#include <cstring>

#include "sac/errors.hpp"
#include "sac/fft.hpp"
#include "sac/kernels.hpp"

namespace sac {

void SolveConfig::validate() const {
    spec.validate();
    if (eps < 0.0) throw ConfigError("noise intensity must be nonnegative");
    if (eps > 0.0) {
        if (delta <= 0.0) throw ConfigError("eps > 0 requires a mollification scale delta");
        if (spec.dx() > delta / 2.0)
            throw ConfigError("grid too coarse for delta: need dx <= delta/2");
        if (spec.dt() > delta * delta / 2.0)
            throw ConfigError("time step too coarse for delta: need dt <= delta^2/2");
    }
    if (!u0.empty() && static_cast<std::int64_t>(u0.size()) != spec.n_space())
        throw ConfigError("initial datum has the wrong number of spatial points");
    if (blowup_threshold <= 0.0) throw ConfigError("blowup threshold must be positive");
}

double SolveConfig::effective_c(const RenormConstants* rc) const {
    if (!renormalised || eps == 0.0) return C;
    if (!rc) throw ConfigError("renormalised run requires constants");
    double c_eff = C + 3.0 * eps * rc->c1;
    if (spec.d == 3) {
        if (!rc->c2.has_value()) throw ConfigError("d=3 renormalised run requires c2");
        c_eff -= 9.0 * eps * eps * *rc->c2;
    }
    return c_eff;
}

namespace {

constexpr double kTwoPiSq = 4.0 * M_PI * M_PI;

void check_stability(const SolveConfig& cfg, double c_eff) {
    double sup_u0 = 0.0;
    if (!cfg.u0.empty())
        sup_u0 = kernels::active().absmax(cfg.u0.data(), cfg.u0.size());
    const double bound = 0.2 / std::max({1.0, std::fabs(c_eff), sup_u0 * sup_u0});
    if (cfg.spec.dt() > bound)
        throw ConfigError("time step " + std::to_string(cfg.spec.dt()) +
                          " exceeds the stability bound " + std::to_string(bound));
}

}  // namespace

Trajectory solve(const SolveConfig& cfg, const NoiseRealization* xi, const GridField* h) {
    cfg.validate();
    if (cfg.eps > 0.0 && xi == nullptr)
        throw ConfigError("eps > 0 requires a noise realization");
    if (h && h->spec() != cfg.spec) throw ConfigError("forcing grid mismatch");
    if (xi && xi->spec() != cfg.spec) throw ConfigError("noise grid mismatch");

    RenormConstants rc_local;
    const RenormConstants* rc = nullptr;
    if (cfg.renormalised && cfg.eps > 0.0) {
        if (cfg.constants.has_value()) {
            rc = &*cfg.constants;
        } else {
            rc_local = compute_constants(cfg.spec, cfg.delta, cfg.mollifier);
            rc = &rc_local;
        }
    }
    const double c_eff = cfg.effective_c(rc);
    check_stability(cfg, c_eff);

    const GridSpec& spec = cfg.spec;
    const double dt = spec.dt();
    const std::size_t nsp = static_cast<std::size_t>(spec.n_space());

    // forcing field sqrt(eps) xi_delta (sampled once on the space-time grid)
    GridField noise_field;
    if (cfg.eps > 0.0) {
        noise_field = mollify(*xi, cfg.delta, cfg.mollifier);
        kernels::active().scal(noise_field.data(), std::sqrt(cfg.eps), noise_field.size());
    }

    Trajectory traj;
    traj.u = GridField(spec);
    traj.config = cfg;
    traj.c_eff = c_eff;

    // u slice 0 = initial datum
    if (!cfg.u0.empty()) std::memcpy(traj.u.slice(0), cfg.u0.data(), sizeof(double) * nsp);

    SpatialFft fft(spec, 1);
    const auto ksq = spatial_ksq(spec);
    std::vector<double> implicit_factor(ksq.size());
    for (std::size_t m = 0; m < ksq.size(); ++m)
        implicit_factor[m] = 1.0 / (1.0 + dt * kTwoPiSq * ksq[m]);
    std::vector<double> dealias;
    if (cfg.dealias_two_thirds) {
        dealias.assign(ksq.size(), 1.0);
        const double kmax2 = std::pow(spec.n_x / 3.0, 2);  // 2/3 of Nyquist n_x/2
        for (std::size_t m = 0; m < ksq.size(); ++m)
            if (ksq[m] > kmax2) dealias[m] = 0.0;
    }

    std::vector<double> rhs(nsp);
    std::vector<double> zero(nsp, 0.0);
    const double a = 1.0 + dt * c_eff;
    for (int i = 0; i + 1 < spec.n_t; ++i) {
        const double* u_cur = traj.u.slice(i);

        if (kernels::active().absmax(u_cur, nsp) >= cfg.blowup_threshold) {
            traj.blowup_time = i * dt;
            // freeze the remaining slices at the capped state
            for (int j = i + 1; j < spec.n_t; ++j)
                std::memcpy(traj.u.slice(j), u_cur, sizeof(double) * nsp);
            break;
        }

        // f = sqrt(eps) xi_delta + h at the current slice
        const double* fn = zero.data();
        if (cfg.eps > 0.0) {
            std::memcpy(rhs.data(), noise_field.slice(i), sizeof(double) * nsp);
            if (h) kernels::active().axpy(rhs.data(), 1.0, h->slice(i), nsp);
            fn = rhs.data();
        } else if (h) {
            fn = h->slice(i);
        }

        // (1 + dt C_eff) u - dt u^3 + dt f, then the implicit heat factor
        kernels::active().poly_step(fft.real_buf(), u_cur, fn, a, -dt, dt, nsp);
        fft.forward();
        kernels::active().cmul_real(reinterpret_cast<double*>(fft.cplx_buf()),
                                    implicit_factor.data(), static_cast<std::size_t>(fft.n_cplx()));
        if (!dealias.empty())
            kernels::active().cmul_real(reinterpret_cast<double*>(fft.cplx_buf()), dealias.data(),
                                        static_cast<std::size_t>(fft.n_cplx()));
        fft.backward();
        std::memcpy(traj.u.slice(i + 1), fft.real_buf(), sizeof(double) * nsp);
    }

    if (!traj.blowup_time.has_value()) {
        const double* last = traj.u.slice(spec.n_t - 1);
        if (kernels::active().absmax(last, nsp) >= cfg.blowup_threshold)
            traj.blowup_time = (spec.n_t - 1) * dt;
    }
    return traj;
}

Trajectory solve_deterministic(const SolveConfig& cfg, const GridField& h) {
    SolveConfig det = cfg;
    det.eps = 0.0;
    return solve(det, nullptr, &h);
}

}  // namespace sac
