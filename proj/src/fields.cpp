#include "sac/fields.hpp"

#include <cmath>
#include <cstring>
#include <map>

#include "sac/fft.hpp"
#include "sac/kernels.hpp"

namespace sac {

double GridField::l2_sq() const {
    return spec_.node_weight() * kernels::active().sumsq(v_.data(), v_.size());
}

double GridField::sup_abs() const { return kernels::active().absmax(v_.data(), v_.size()); }

double inner(const GridField& a, const GridField& b) {
    if (a.spec() != b.spec()) throw StructuralError("inner: grid spec mismatch");
    return a.spec().node_weight() * kernels::active().dot(a.data(), b.data(), a.size());
}

namespace {

constexpr double kTwoPiSq = 4.0 * M_PI * M_PI;

struct ModeCoeffs {
    std::vector<double> decay;   // r = exp(-4 pi^2 |k|^2 dt)
    std::vector<double> weight;  // (1 - r) / (4 pi^2 |k|^2), or dt for k = 0
};

ModeCoeffs step_coeffs(const GridSpec& spec) {
    const auto ksq = spatial_ksq(spec);
    ModeCoeffs mc;
    mc.decay.resize(ksq.size());
    mc.weight.resize(ksq.size());
    const double dt = spec.dt();
    for (std::size_t m = 0; m < ksq.size(); ++m) {
        const double mu = kTwoPiSq * ksq[m];
        if (mu == 0.0) {
            mc.decay[m] = 1.0;
            mc.weight[m] = dt;
        } else {
            const double r = std::exp(-mu * dt);
            mc.decay[m] = r;
            mc.weight[m] = (1.0 - r) / mu;
        }
    }
    return mc;
}

}  // namespace

GridField heat_convolve(const GridField& f) {
    const GridSpec& spec = f.spec();
    const int nt = spec.n_t;
    SpatialFft fft(spec, nt);
    std::memcpy(fft.real_buf(), f.data(), sizeof(double) * f.size());
    fft.forward();

    const ModeCoeffs mc = step_coeffs(spec);
    const std::size_t cn = static_cast<std::size_t>(fft.n_cplx());
    std::complex<double>* c = fft.cplx_buf();
    std::vector<std::complex<double>> saved(c, c + cn);  // forcing of the previous step
    for (std::size_t m = 0; m < cn; ++m) c[m] = 0.0;
    for (int i = 1; i < nt; ++i) {
        std::complex<double>* cur = c + static_cast<std::size_t>(i) * cn;
        const std::complex<double>* prev = cur - cn;
        for (std::size_t m = 0; m < cn; ++m) {
            const std::complex<double> next_input = cur[m];
            cur[m] = mc.decay[m] * prev[m] + mc.weight[m] * saved[m];
            saved[m] = next_input;
        }
    }

    fft.backward();
    GridField out(spec);
    std::memcpy(out.data(), fft.real_buf(), sizeof(double) * out.size());
    return out;
}

GridField heat_convolve_adjoint(const GridField& g) {
    const GridSpec& spec = g.spec();
    const int nt = spec.n_t;
    SpatialFft fft(spec, nt);
    std::memcpy(fft.real_buf(), g.data(), sizeof(double) * g.size());
    fft.forward();

    const ModeCoeffs mc = step_coeffs(spec);
    const std::size_t cn = static_cast<std::size_t>(fft.n_cplx());
    std::complex<double>* c = fft.cplx_buf();
    std::vector<std::complex<double>> b(cn, 0.0);
    std::vector<std::complex<double>> orig_next(cn);
    {
        std::complex<double>* last = c + static_cast<std::size_t>(nt - 1) * cn;
        for (std::size_t m = 0; m < cn; ++m) {
            orig_next[m] = last[m];
            last[m] = 0.0;
        }
    }
    for (int s = nt - 2; s >= 0; --s) {
        std::complex<double>* cur = c + static_cast<std::size_t>(s) * cn;
        for (std::size_t m = 0; m < cn; ++m) {
            b[m] = orig_next[m] + mc.decay[m] * b[m];
            orig_next[m] = cur[m];
            cur[m] = mc.weight[m] * b[m];
        }
    }

    fft.backward();
    GridField out(spec);
    std::memcpy(out.data(), fft.real_buf(), sizeof(double) * out.size());
    return out;
}

GridField periodic_convolve(const GridField& f, const GridField& g) {
    if (f.spec() != g.spec()) throw StructuralError("periodic_convolve: grid spec mismatch");
    const GridSpec& spec = f.spec();
    SpaceTimeFft fft(spec);

    std::memcpy(fft.real_buf(), f.data(), sizeof(double) * f.size());
    fft.forward();
    std::vector<std::complex<double>> fhat(fft.cplx_buf(), fft.cplx_buf() + fft.n_cplx());

    std::memcpy(fft.real_buf(), g.data(), sizeof(double) * g.size());
    fft.forward();
    std::complex<double>* c = fft.cplx_buf();
    for (std::int64_t m = 0; m < fft.n_cplx(); ++m) c[m] *= fhat[static_cast<std::size_t>(m)];
    fft.backward();

    GridField out(spec);
    std::memcpy(out.data(), fft.real_buf(), sizeof(double) * out.size());
    kernels::active().scal(out.data(), spec.node_weight(), out.size());
    return out;
}

GridField laplacian(const GridField& f) {
    const GridSpec& spec = f.spec();
    SpatialFft fft(spec, spec.n_t);
    std::memcpy(fft.real_buf(), f.data(), sizeof(double) * f.size());
    fft.forward();
    const auto ksq = spatial_ksq(spec);
    const std::int64_t cn = fft.n_cplx();
    std::complex<double>* c = fft.cplx_buf();
    for (int i = 0; i < spec.n_t; ++i)
        for (std::int64_t m = 0; m < cn; ++m)
            c[static_cast<std::size_t>(i) * static_cast<std::size_t>(cn) + static_cast<std::size_t>(m)] *= -kTwoPiSq * ksq[static_cast<std::size_t>(m)];
    fft.backward();
    GridField out(spec);
    std::memcpy(out.data(), fft.real_buf(), sizeof(double) * out.size());
    return out;
}

GridField heat_kernel_field(const GridSpec& spec) {
    spec.validate();
    SpatialFft fft(spec, spec.n_t);
    const auto ksq = spatial_ksq(spec);
    const std::int64_t cn = fft.n_cplx();
    const double nsp = static_cast<double>(spec.n_space());
    std::complex<double>* c = fft.cplx_buf();
    for (int i = 0; i < spec.n_t; ++i) {
        const double t = i * spec.dt();
        for (std::int64_t m = 0; m < cn; ++m)
            c[static_cast<std::size_t>(i) * static_cast<std::size_t>(cn) + static_cast<std::size_t>(m)] =
                nsp * std::exp(-kTwoPiSq * ksq[static_cast<std::size_t>(m)] * t);
    }
    fft.backward();
    GridField out(spec);
    std::memcpy(out.data(), fft.real_buf(), sizeof(double) * out.size());
    return out;
}

namespace {

double bump_sharpness(TestFunction::Profile p) {
    return p == TestFunction::Profile::Bump ? 1.0 : 3.0;
}

double bump_raw(double s, double a) {
    const double q = 1.0 - s * s;
    if (q <= 0.0) return 0.0;
    return std::exp(-a / q);
}

/// Integral of exp(-a/(1-s^2)) over [-1,1], cached per sharpness.
double bump_norm_1d(double a) {
    static std::map<double, double> cache;
    auto it = cache.find(a);
    if (it != cache.end()) return it->second;
    const int n = 1 << 14;
    const double h = 2.0 / n;
    double acc = 0.0;  // Simpson; integrand vanishes at both ends
    for (int i = 0; i <= n; ++i) {
        const double s = -1.0 + i * h;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * bump_raw(s, a);
    }
    acc *= h / 3.0;
    cache[a] = acc;
    return acc;
}

double wrap_unit(double x) {  // minimal image on the unit torus
    x -= std::floor(x);
    if (x >= 0.5) x -= 1.0;
    return x;
}

void check_test_function(const GridSpec& spec, const TestFunction& tf) {
    if (!(tf.lambda > 0.0) || tf.lambda > 1.0)
        throw DomainError("test-function scale must lie in (0,1]");
    const double l2 = tf.lambda * tf.lambda;
    if (tf.t0 - l2 < 0.0 || tf.t0 + l2 > spec.T)
        throw DomainError("test-function time support [t0-l^2, t0+l^2] leaves [0,T]");
    if (2.0 * tf.lambda > 1.0)
        throw DomainError("test-function spatial support exceeds the periodic cell");
}

}  // namespace

GridField sample_test_function(const GridSpec& spec, const TestFunction& tf) {
    check_test_function(spec, tf);
    const double a = bump_sharpness(tf.profile);
    const double norm1d = bump_norm_1d(a);
    const double amp = std::pow(tf.lambda, -(spec.d + 2)) / std::pow(norm1d, spec.d + 1);
    const double inv_l = 1.0 / tf.lambda;
    const double inv_l2 = inv_l * inv_l;

    GridField out(spec);
    // per-coordinate spatial factors at all lattice offsets
    std::array<std::vector<double>, 3> fx;
    for (int c = 0; c < spec.d; ++c) {
        fx[static_cast<std::size_t>(c)].resize(static_cast<std::size_t>(spec.n_x));
        for (int j = 0; j < spec.n_x; ++j) {
            const double dxj = wrap_unit(j * spec.dx() - tf.x0[static_cast<std::size_t>(c)]);
            fx[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)] = bump_raw(dxj * inv_l, a);
        }
    }
    for (int i = 0; i < spec.n_t; ++i) {
        const double ft = bump_raw((i * spec.dt() - tf.t0) * inv_l2, a);
        if (ft == 0.0) continue;
        double* s = out.slice(i);
        if (spec.d == 1) {
            for (int jx = 0; jx < spec.n_x; ++jx) s[jx] = amp * ft * fx[0][static_cast<std::size_t>(jx)];
        } else if (spec.d == 2) {
            std::int64_t idx = 0;
            for (int jy = 0; jy < spec.n_x; ++jy)
                for (int jx = 0; jx < spec.n_x; ++jx, ++idx)
                    s[idx] = amp * ft * fx[1][static_cast<std::size_t>(jy)] * fx[0][static_cast<std::size_t>(jx)];
        } else {
            std::int64_t idx = 0;
            for (int jz = 0; jz < spec.n_x; ++jz)
                for (int jy = 0; jy < spec.n_x; ++jy)
                    for (int jx = 0; jx < spec.n_x; ++jx, ++idx)
                        s[idx] = amp * ft * fx[2][static_cast<std::size_t>(jz)] *
                                 fx[1][static_cast<std::size_t>(jy)] * fx[0][static_cast<std::size_t>(jx)];
        }
    }
    return out;
}

double test_pair(const GridField& f, const TestFunction& tf) {
    const GridField phi = sample_test_function(f.spec(), tf);
    return inner(f, phi);
}

}  // namespace sac
