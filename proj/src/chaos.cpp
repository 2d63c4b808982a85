#include "sac/chaos.hpp"

#include <algorithm>
#include <cmath>

#include "sac/errors.hpp"
#include "sac/kernels.hpp"

namespace sac {

double hermite(int k, double x) {
    if (k < 0) throw DomainError("hermite order must be nonnegative");
    if (k == 0) return 1.0;
    double prev = 1.0;          // H_0
    double cur = x;             // H_1
    for (int j = 1; j < k; ++j) {
        // H_{j+1} = (x H_j - sqrt(j) H_{j-1}) / sqrt(j+1)
        const double next = (x * cur - std::sqrt(static_cast<double>(j)) * prev) /
                            std::sqrt(static_cast<double>(j + 1));
        prev = cur;
        cur = next;
    }
    return cur;
}

namespace {

/// Physicists' Hermite value and derivative at x (unnormalised recurrence).
std::pair<double, double> hermite_phys(int n, double x) {
    double prev = 1.0, cur = 2.0 * x;
    if (n == 0) return {1.0, 0.0};
    for (int j = 1; j < n; ++j) {
        const double next = 2.0 * x * cur - 2.0 * j * prev;
        prev = cur;
        cur = next;
    }
    return {cur, 2.0 * n * prev};  // H_n, H_n' = 2n H_{n-1}
}

}  // namespace

GaussHermite gauss_hermite(int n) {
    if (n < 1) throw DomainError("quadrature order must be positive");
    GaussHermite gh;
    gh.nodes.resize(static_cast<std::size_t>(n));
    gh.weights.resize(static_cast<std::size_t>(n));
    const double lognorm = 0.5 * std::log(M_PI);  // log of int exp(-x^2)

    // Newton iterations from standard initial guesses, largest root first.
    double x = 0.0;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        if (i == 0)
            x = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        else if (i == 1)
            x -= 1.14 * std::pow(n, 0.426) / x;
        else if (i == 2)
            x = 1.86 * x - 0.86 * gh.nodes[0];
        else if (i == 3)
            x = 1.91 * x - 0.91 * gh.nodes[1];
        else
            x = 2.0 * x - gh.nodes[static_cast<std::size_t>(i - 2)];

        for (int it = 0; it < 100; ++it) {
            const auto [h, dh] = hermite_phys(n, x);
            const double step = h / dh;
            x -= step;
            if (std::fabs(step) < 1e-15 * std::max(1.0, std::fabs(x))) break;
        }
        const auto [hm1, unused] = hermite_phys(n - 1, x);
        (void)unused;
        // w = 2^{n-1} n! sqrt(pi) / (n^2 H_{n-1}(x)^2), evaluated in logs
        double logw = (n - 1) * std::log(2.0) + std::lgamma(n + 1.0) + lognorm -
                      2.0 * std::log(static_cast<double>(n)) - 2.0 * std::log(std::fabs(hm1));
        const double w = std::exp(logw);
        gh.nodes[static_cast<std::size_t>(i)] = x;
        gh.weights[static_cast<std::size_t>(i)] = w;
        gh.nodes[static_cast<std::size_t>(n - 1 - i)] = -x;
        gh.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    std::sort(gh.nodes.begin(), gh.nodes.end());
    // weights are symmetric; re-pair after the sort
    // (nodes were filled symmetric already, the sort only orders them)
    return gh;
}

GridField wick_power(const GridField& f, int k, double C) {
    GridField out(f.spec());
    if (k == 2)
        kernels::active().wick2(out.data(), f.data(), C, f.size());
    else if (k == 3)
        kernels::active().wick3(out.data(), f.data(), C, f.size());
    else
        throw UnsupportedError("wick_power supports k in {2,3}");
    return out;
}

MinimalModel build_minimal_model(const GridField& xi_values, double delta, bool renormalised,
                                 double eps, const RenormConstants& consts, const Mollifier& rho) {
    if (eps < 0.0) throw DomainError("noise intensity must be nonnegative");
    MinimalModel m;
    m.d = xi_values.spec().d;
    m.delta = delta;
    m.eps = eps;
    m.renormalised = renormalised;
    m.consts = consts;

    m.noise_smooth = mollify(xi_values, delta, rho);
    kernels::active().scal(m.noise_smooth.data(), std::sqrt(eps), m.noise_smooth.size());
    m.lin = heat_convolve(m.noise_smooth);

    const double c1 = renormalised ? eps * consts.c1 : 0.0;
    m.quad = wick_power(m.lin, 2, c1);
    m.cubic = wick_power(m.lin, 3, c1);

    if (m.d == 3) {
        m.quad_int = heat_convolve(m.quad);
        m.cubic_int = heat_convolve(m.cubic);
    }
    return m;
}

MinimalModel build_minimal_model(const NoiseRealization& xi, double delta, bool renormalised,
                                 double eps, const RenormConstants& consts, const Mollifier& rho) {
    return build_minimal_model(xi.values, delta, renormalised, eps, consts, rho);
}

double model_pair_3d(const MinimalModel& model, CompositeSymbol tau, const TestFunction& phi) {
    if (model.d != 3) throw UnsupportedError("composite pairings are defined only in d=3");
    const GridSpec& spec = model.lin.spec();

    const GridField& integ =
        (tau == CompositeSymbol::QuadIntTimesQuad) ? *model.quad_int : *model.cubic_int;
    const GridField& other =
        (tau == CompositeSymbol::CubicIntTimesLin) ? model.lin : model.quad;

    // base point: phi's centre snapped to the lattice
    int it = static_cast<int>(std::lround(phi.t0 / spec.dt()));
    it = std::clamp(it, 0, spec.n_t - 1);
    auto snap = [&](double x) {
        int j = static_cast<int>(std::lround(x * spec.n_x)) % spec.n_x;
        if (j < 0) j += spec.n_x;
        return j;
    };
    const std::int64_t jspace = model.lin.space_index(snap(phi.x0[0]), snap(phi.x0[1]), snap(phi.x0[2]));
    const double base_value = integ.at(it, jspace);

    GridField g(spec);
    for (std::size_t i = 0; i < g.size(); ++i)
        g.data()[i] = (integ.data()[i] - base_value) * other.data()[i];

    if (model.renormalised && model.consts.c2.has_value()) {
        const double c2s = model.eps * model.eps * *model.consts.c2;
        if (tau == CompositeSymbol::QuadIntTimesQuad) {
            for (std::size_t i = 0; i < g.size(); ++i) g.data()[i] -= c2s;
        } else if (tau == CompositeSymbol::CubicIntTimesQuad) {
            kernels::active().axpy(g.data(), -3.0 * c2s, model.lin.data(), g.size());
        }
    }
    return test_pair(g, phi);
}

CmShiftReport cameron_martin_shift_check(const GridField& h, double delta, const TestFunction& phi,
                                         int n_samples, std::uint64_t master_seed,
                                         const Mollifier& rho) {
    const GridSpec& spec = h.spec();
    RenormConstants consts = compute_constants(spec, delta, rho, phi.t0);

    CmShiftReport rep;
    rep.n_samples = n_samples;
    std::vector<double> vals(static_cast<std::size_t>(n_samples));
    for (int s = 0; s < n_samples; ++s) {
        const auto xi = sample_white_noise(spec, derive_trial_seed(master_seed, static_cast<std::uint64_t>(s)));
        GridField shifted = xi.values;
        kernels::active().axpy(shifted.data(), 1.0, h.data(), shifted.size());
        const MinimalModel m = build_minimal_model(shifted, delta, true, 1.0, consts, rho);
        vals[static_cast<std::size_t>(s)] = test_pair(m.quad, phi);
    }
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= n_samples;
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= std::max(1, n_samples - 1);
    rep.mc_mean = mean;
    rep.mc_stderr = std::sqrt(var / n_samples);

    const GridField lin_h = heat_convolve(mollify(h, delta, rho));
    GridField canon(spec);
    for (std::size_t i = 0; i < canon.size(); ++i)
        canon.data()[i] = lin_h.data()[i] * lin_h.data()[i];
    rep.canonical = test_pair(canon, phi);
    rep.z_score = rep.mc_stderr > 0.0 ? (rep.mc_mean - rep.canonical) / rep.mc_stderr : 0.0;
    return rep;
}

double ChaosSampleStats::mean() const {
    double m = 0.0;
    for (double v : samples) m += v;
    return samples.empty() ? 0.0 : m / static_cast<double>(samples.size());
}

double ChaosSampleStats::variance() const {
    if (samples.size() < 2) return 0.0;
    const double m = mean();
    double var = 0.0;
    for (double v : samples) var += (v - m) * (v - m);
    return var / static_cast<double>(samples.size() - 1);
}

double ChaosSampleStats::stderr_mean() const {
    return std::sqrt(variance() / std::max<std::size_t>(1, samples.size()));
}

ChaosSampleStats::TailFit ChaosSampleStats::tail_fit() const {
    TailFit fit;
    std::vector<double> abs_sorted;
    abs_sorted.reserve(samples.size());
    for (double v : samples) abs_sorted.push_back(std::fabs(v));
    std::sort(abs_sorted.begin(), abs_sorted.end());
    const std::size_t n = abs_sorted.size();
    if (n < 30) return fit;

    // survival points on the top decile
    std::vector<double> ts, ys;
    for (std::size_t i = n - n / 10; i < n - 1; ++i) {
        const double t = abs_sorted[i];
        const double surv = static_cast<double>(n - i) / static_cast<double>(n);
        ts.push_back(t);
        ys.push_back(std::log(surv));
    }
    auto r2_of = [&](bool quadratic) {
        // least squares y = alpha + beta * g(t)
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double m = static_cast<double>(ts.size());
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const double g = quadratic ? ts[i] * ts[i] : ts[i];
            sx += g;
            sy += ys[i];
            sxx += g * g;
            sxy += g * ys[i];
        }
        const double beta = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        const double alpha = (sy - beta * sx) / m;
        double ss_res = 0, ss_tot = 0;
        const double ybar = sy / m;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const double g = quadratic ? ts[i] * ts[i] : ts[i];
            ss_res += (ys[i] - alpha - beta * g) * (ys[i] - alpha - beta * g);
            ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
        }
        return ss_tot > 0 ? 1.0 - ss_res / ss_tot : 0.0;
    };
    fit.r2_linear = r2_of(false);
    fit.r2_quadratic = r2_of(true);
    return fit;
}

}  // namespace sac
