#include "sac/noise.hpp"

#include <cmath>

#include "sac/fields.hpp"

namespace sac {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& x, const std::array<std::uint32_t, 2>& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * x[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * x[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> Philox4x32::block(const std::array<std::uint32_t, 4>& counter,
                                               const std::array<std::uint32_t, 2>& key) {
    std::array<std::uint32_t, 4> x = counter;
    std::array<std::uint32_t, 2> k = key;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k[0] += kWeyl0;
            k[1] += kWeyl1;
        }
        philox_round(x, k);
    }
    return x;
}

std::uint64_t derive_trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
    std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ull * (trial_index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

namespace {

constexpr double kTwoPow64Inv = 1.0 / 18446744073709551616.0;  // 2^-64

inline std::uint64_t join64(std::uint32_t hi, std::uint32_t lo) {
    return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

/// Two standard normals from one Philox block (64-bit Box-Muller).
inline void gaussian_pair(std::uint64_t seed, std::uint64_t block_index, double& g0, double& g1) {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(block_index), static_cast<std::uint32_t>(block_index >> 32),
        0x5ac1abu, 0u};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                              static_cast<std::uint32_t>(seed >> 32)};
    const auto r = Philox4x32::block(ctr, key);
    const double u1 = (static_cast<double>(join64(r[0], r[1])) + 1.0) * kTwoPow64Inv;  // (0,1]
    const double u2 = (static_cast<double>(join64(r[2], r[3])) + 0.5) * kTwoPow64Inv;  // (0,1)
    const double rad = std::sqrt(-2.0 * std::log(u1));
    g0 = rad * std::cos(2.0 * M_PI * u2);
    g1 = rad * std::sin(2.0 * M_PI * u2);
}

}  // namespace

double gaussian_at(std::uint64_t seed, std::uint64_t index) {
    double g0, g1;
    gaussian_pair(seed, index / 2, g0, g1);
    return (index % 2 == 0) ? g0 : g1;
}

NoiseRealization sample_white_noise(const GridSpec& spec, std::uint64_t seed) {
    spec.validate();
    NoiseRealization xi;
    xi.seed = seed;
    xi.values = GridField(spec);
    const double node_std = 1.0 / std::sqrt(spec.node_weight());
    double* v = xi.values.data();
    const std::size_t n = xi.values.size();
    std::size_t i = 0;
    for (std::uint64_t blk = 0; i + 1 < n; ++blk, i += 2) {
        double g0, g1;
        gaussian_pair(seed, blk, g0, g1);
        v[i] = node_std * g0;
        v[i + 1] = node_std * g1;
    }
    if (i < n) {
        double g0, g1;
        gaussian_pair(seed, n / 2, g0, g1);
        v[i] = node_std * g0;
    }
    return xi;
}

bool mollifier_resolvable(const GridSpec& spec, double delta) {
    return delta >= 2.0 * spec.dx() && delta * delta >= 2.0 * spec.dt();
}

void require_mollifier_resolvable(const GridSpec& spec, double delta) {
    if (mollifier_resolvable(spec, delta)) return;
    const int need_nx = static_cast<int>(std::ceil(2.0 / delta));
    const int need_nt = static_cast<int>(std::ceil(2.0 * spec.T / (delta * delta)));
    throw ResolutionError("mollifier scale delta=" + std::to_string(delta) +
                          " unresolvable on grid (n_x=" + std::to_string(spec.n_x) +
                          ", n_t=" + std::to_string(spec.n_t) + "); need n_x >= " +
                          std::to_string(need_nx) + " and n_t >= " + std::to_string(need_nt));
}

namespace {

double profile_sharpness(Mollifier::Kind k) { return k == Mollifier::Kind::Bump ? 1.0 : 3.0; }

double bump(double s, double a) {
    const double q = 1.0 - s * s;
    if (q <= 0.0) return 0.0;
    return std::exp(-a / q);
}

double wrap_unit(double x) {
    x -= std::floor(x);
    if (x >= 0.5) x -= 1.0;
    return x;
}

double wrap_time(int i, const GridSpec& spec) {
    double t = i * spec.dt();
    if (t >= 0.5 * spec.T) t -= spec.T;
    return t;
}

}  // namespace

std::vector<double> Mollifier::time_profile(const GridSpec& spec, double delta) const {
    const double a = profile_sharpness(kind);
    const double scale = delta * delta;
    std::vector<double> p(static_cast<std::size_t>(spec.n_t), 0.0);
    double sum = 0.0;
    for (int i = 0; i < spec.n_t; ++i) {
        const double t = wrap_time(i, spec);
        const double v = bump(t / scale, a);
        p[static_cast<std::size_t>(i)] = v;
        sum += v;
    }
    const double norm = 1.0 / (sum * spec.dt());
    for (auto& v : p) v *= norm;
    return p;
}

std::vector<double> Mollifier::space_profile(const GridSpec& spec, double delta) const {
    const double a = profile_sharpness(kind);
    std::vector<double> p(static_cast<std::size_t>(spec.n_space()), 0.0);
    double sum = 0.0;
    const int n = spec.n_x;
    std::int64_t idx = 0;
    const int ny = spec.d >= 2 ? n : 1;
    const int nz = spec.d >= 3 ? n : 1;
    for (int jz = 0; jz < nz; ++jz)
        for (int jy = 0; jy < ny; ++jy)
            for (int jx = 0; jx < n; ++jx, ++idx) {
                double r2 = 0.0;
                const double x = wrap_unit(jx * spec.dx());
                r2 += x * x;
                if (spec.d >= 2) {
                    const double y = wrap_unit(jy * spec.dx());
                    r2 += y * y;
                }
                if (spec.d >= 3) {
                    const double z = wrap_unit(jz * spec.dx());
                    r2 += z * z;
                }
                const double v = bump(std::sqrt(r2) / delta, a);
                p[static_cast<std::size_t>(idx)] = v;
                sum += v;
            }
    const double norm = 1.0 / (sum * spec.cell_volume());
    for (auto& v : p) v *= norm;
    return p;
}

GridField Mollifier::kernel_field(const GridSpec& spec, double delta) const {
    require_mollifier_resolvable(spec, delta);
    const auto pt = time_profile(spec, delta);
    const auto px = space_profile(spec, delta);
    GridField k(spec);
    for (int i = 0; i < spec.n_t; ++i) {
        double* s = k.slice(i);
        const double w = pt[static_cast<std::size_t>(i)];
        for (std::int64_t j = 0; j < spec.n_space(); ++j) s[j] = w * px[static_cast<std::size_t>(j)];
    }
    return k;
}

GridField mollify(const GridField& f, double delta, const Mollifier& rho) {
    const GridField kernel = rho.kernel_field(f.spec(), delta);
    return periodic_convolve(f, kernel);
}

GridField mollify(const NoiseRealization& xi, double delta, const Mollifier& rho) {
    return mollify(xi.values, delta, rho);
}

}  // namespace sac
