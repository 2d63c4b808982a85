#pragma once

#include <array>
#include <cstdint>

#include "sac/grid.hpp"

namespace sac {

/// Philox-4x32-10 counter-based generator. Pure function of (key, counter),
/// so parallel trials can draw from disjoint counter ranges without shared
/// state and reproduce bit-identically in any execution order.
struct Philox4x32 {
    static std::array<std::uint32_t, 4> block(const std::array<std::uint32_t, 4>& counter,
                                              const std::array<std::uint32_t, 2>& key);
};

/// Derive the seed of trial i from a master seed (splitmix-style mixing).
std::uint64_t derive_trial_seed(std::uint64_t master_seed, std::uint64_t trial_index);

/// Standard normal at (seed, index), two per Philox block via Box-Muller.
/// Deterministic and order-independent.
double gaussian_at(std::uint64_t seed, std::uint64_t index);

/// Discrete space-time white noise: i.i.d. centred Gaussians with node
/// variance 1/(dt*dx^d), fully determined by (spec, seed).
struct NoiseRealization {
    GridField values;
    std::uint64_t seed = 0;

    const GridSpec& spec() const { return values.spec(); }
};

NoiseRealization sample_white_noise(const GridSpec& spec, std::uint64_t seed);

/// Smooth compactly supported mollifier with unit integral, rescaled
/// parabolically: rho_delta(t,x) = delta^-(d+2) rho(t/delta^2, x/delta).
/// Product of a one-dimensional time bump and a radial space bump.
struct Mollifier {
    enum class Kind { Bump, SharpBump };
    Kind kind = Kind::Bump;

    /// Sampled kernel rho_delta on the grid, wrapped periodically and
    /// normalised so that dt*dx^d * sum = 1 exactly.
    GridField kernel_field(const GridSpec& spec, double delta) const;

    /// Time profile (length n_t, circularly centred at 0, dt-normalised) and
    /// space profile (length n_x^d, dx^d-normalised). kernel_field is their
    /// outer product.
    std::vector<double> time_profile(const GridSpec& spec, double delta) const;
    std::vector<double> space_profile(const GridSpec& spec, double delta) const;

    std::string name() const { return kind == Kind::Bump ? "bump" : "sharp-bump"; }
};

/// Check that the mollifier at scale delta is representable: delta >= 2 dx
/// and delta^2 >= 2 dt. Throws ResolutionError naming the required n_x, n_t.
void require_mollifier_resolvable(const GridSpec& spec, double delta);
bool mollifier_resolvable(const GridSpec& spec, double delta);

/// rho_delta * f by periodic convolution (linear; maps constants to
/// themselves).
GridField mollify(const GridField& f, double delta, const Mollifier& rho = Mollifier{});
GridField mollify(const NoiseRealization& xi, double delta, const Mollifier& rho = Mollifier{});

}  // namespace sac
