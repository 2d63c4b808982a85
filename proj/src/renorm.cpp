#include "sac/renorm.hpp"

#include <cmath>
#include <complex>
#include <cstring>
#include <vector>

#include "sac/errors.hpp"
#include "sac/fft.hpp"
#include "sac/fields.hpp"

namespace sac {

namespace {

constexpr double kTwoPiSq = 4.0 * M_PI * M_PI;

int snap_time_index(const GridSpec& spec, double t_ref) {
    if (t_ref < 0.0) return spec.n_t / 2;
    int i = static_cast<int>(std::lround(t_ref / spec.dt()));
    if (i < 1) i = 1;
    if (i > spec.n_t - 1) i = spec.n_t - 1;
    return i;
}

/// Geometric pair sum over the causal integrator rows:
/// S(tau) = omega^2 sum_{s1-s2=tau; s1,s2 in [0,a)} r^{(a-1-s1)+(a-1-s2)}.
double pair_sum(double r, double omega, int a, int tau) {
    if (tau >= a) return 0.0;
    if (r == 1.0) return omega * omega * static_cast<double>(a - tau);
    const double r2 = r * r;
    return omega * omega * (std::pow(r, tau) - std::pow(r, 2 * a - tau)) / (1.0 - r2);
}

}  // namespace

double c1_constant(const GridSpec& spec, double delta, const Mollifier& rho, double t_ref) {
    spec.validate();
    require_mollifier_resolvable(spec, delta);
    const int a = snap_time_index(spec, t_ref);
    const double dt = spec.dt();

    // Circular autocorrelation of the time profile; sparse support.
    const auto pt = rho.time_profile(spec, delta);
    const int nt = spec.n_t;
    std::vector<std::pair<int, double>> autoc;
    for (int tau = 0; tau < nt; ++tau) {
        double acc = 0.0;
        for (int s = 0; s < nt; ++s) {
            const double b = pt[static_cast<std::size_t>((s + tau) % nt)];
            if (b != 0.0 && pt[static_cast<std::size_t>(s)] != 0.0)
                acc += pt[static_cast<std::size_t>(s)] * b;
        }
        if (acc != 0.0) autoc.emplace_back(tau, acc);
    }

    // Spatial transfer |dx^d DFT(rho_x)|^2 over the reduced mode grid.
    const auto px = rho.space_profile(spec, delta);
    SpatialFft fft(spec, 1);
    std::memcpy(fft.real_buf(), px.data(), sizeof(double) * px.size());
    fft.forward();
    const auto ksq = spatial_ksq(spec);
    const double cellw = spec.cell_volume();

    const int nh = spec.n_x / 2 + 1;
    double total = 0.0;
    for (std::size_t m = 0; m < ksq.size(); ++m) {
        const int jx = static_cast<int>(m) % nh;
        const double conj_weight = (jx == 0 || jx == spec.n_x / 2) ? 1.0 : 2.0;
        const double transfer = std::norm(fft.cplx_buf()[m]) * cellw * cellw;
        if (transfer == 0.0) continue;

        const double mu = kTwoPiSq * ksq[m];
        const double r = mu == 0.0 ? 1.0 : std::exp(-mu * dt);
        const double omega = mu == 0.0 ? dt : (1.0 - r) / mu;

        double mode_sum = 0.0;
        for (const auto& [tau, rval] : autoc) {
            if (tau <= a - 1) mode_sum += rval * pair_sum(r, omega, a, tau);
            if (tau > 0 && nt - tau <= a - 1) mode_sum += rval * pair_sum(r, omega, a, nt - tau);
        }
        total += conj_weight * transfer * mode_sum;
    }
    return dt * total;
}

double kernel_l2_quadrature(const GridSpec& spec, double delta, const Mollifier& rho) {
    const GridField p_delta = mollify(heat_kernel_field(spec), delta, rho);
    return p_delta.l2_sq();
}

double c2_constant(const GridSpec& spec, double delta, const Mollifier& rho) {
    if (spec.d != 3) throw UnsupportedError("the second renormalization constant exists only in d=3");
    require_mollifier_resolvable(spec, delta);

    const GridField p = heat_kernel_field(spec);
    const GridField p_delta = mollify(p, delta, rho);

    // Q = space-time autocorrelation of P_delta (circular, dt*dx^d weight).
    SpaceTimeFft fft(spec);
    std::memcpy(fft.real_buf(), p_delta.data(), sizeof(double) * p_delta.size());
    fft.forward();
    std::complex<double>* c = fft.cplx_buf();
    for (std::int64_t m = 0; m < fft.n_cplx(); ++m) c[m] = std::norm(c[m]);
    fft.backward();

    const double w = spec.node_weight();
    double acc = 0.0;
    const double* q = fft.real_buf();
    const double* pv = p.data();
    for (std::int64_t i = 0; i < spec.n_total(); ++i) {
        const double qi = q[i] * w;  // autocorrelation value at node i
        acc += pv[i] * qi * qi;
    }
    return 2.0 * acc * w;
}

double c_lambda(double C, double lambda, int d, const Mollifier& rho, const GridSpec* quad_spec) {
    if (lambda < 0.0) throw DomainError("lambda must be nonnegative");
    if (d == 1) return C;  // outside the renormalisation regime; caller flags this
    if (d == 2) return C - 3.0 * lambda * lambda / (4.0 * M_PI);
    GridSpec spec;
    if (quad_spec) {
        spec = *quad_spec;
    } else {
        spec = GridSpec{3, 0.25, 512, 32};  // reference quadrature grid
    }
    const double delta0 = std::max(2.0 * spec.dx(), std::sqrt(2.0 * spec.dt()));
    const double unit_integral = delta0 * kernel_l2_quadrature(spec, delta0, rho);
    return C - 3.0 * lambda * lambda * unit_integral;
}

RenormConstants compute_constants(const GridSpec& spec, double delta, const Mollifier& rho,
                                  double t_ref) {
    RenormConstants rc;
    rc.d = spec.d;
    rc.delta = delta;
    rc.mollifier = rho.name();
    rc.provenance = "fourier-quadrature";
    rc.c1 = c1_constant(spec, delta, rho, t_ref);
    if (spec.d == 3) rc.c2 = c2_constant(spec, delta, rho);
    return rc;
}

}  // namespace sac
