#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sac/errors.hpp"

namespace sac {

/// Periodic space-time lattice over [0,T) x T^d with torus side length 1.
/// Node (i, j) carries the value at (i*dt, j*dx).
struct GridSpec {
    int d = 1;
    double T = 1.0;
    int n_t = 1;
    int n_x = 2;

    double dt() const { return T / n_t; }
    double dx() const { return 1.0 / n_x; }
    std::int64_t n_space() const {
        std::int64_t n = 1;
        for (int i = 0; i < d; ++i) n *= n_x;
        return n;
    }
    std::int64_t n_total() const { return static_cast<std::int64_t>(n_t) * n_space(); }
    /// Space-time quadrature weight dt * dx^d of one node.
    double node_weight() const {
        double w = dt();
        for (int i = 0; i < d; ++i) w *= dx();
        return w;
    }
    double cell_volume() const {  // dx^d
        double w = 1.0;
        for (int i = 0; i < d; ++i) w *= dx();
        return w;
    }

    void validate() const {
        if (d < 1 || d > 3) throw StructuralError("grid dimension must be in {1,2,3}");
        if (!(T > 0.0)) throw StructuralError("time horizon must be positive");
        if (n_t < 1) throw StructuralError("n_t must be >= 1");
        if (n_x < 2 || (n_x & (n_x - 1)) != 0)
            throw StructuralError("n_x must be a power of two >= 2");
    }

    friend bool operator==(const GridSpec& a, const GridSpec& b) {
        return a.d == b.d && a.T == b.T && a.n_t == b.n_t && a.n_x == b.n_x;
    }
    friend bool operator!=(const GridSpec& a, const GridSpec& b) { return !(a == b); }
};

/// Real scalar field on a GridSpec, stored time-major.
class GridField {
  public:
    GridField() = default;
    explicit GridField(const GridSpec& spec) : spec_(spec) {
        spec_.validate();
        v_.assign(static_cast<std::size_t>(spec_.n_total()), 0.0);
    }

    const GridSpec& spec() const { return spec_; }
    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    std::size_t size() const { return v_.size(); }

    double* slice(int it) { return v_.data() + static_cast<std::size_t>(it) * static_cast<std::size_t>(spec_.n_space()); }
    const double* slice(int it) const {
        return v_.data() + static_cast<std::size_t>(it) * static_cast<std::size_t>(spec_.n_space());
    }

    double& at(int it, std::int64_t jspace) {
        return v_[static_cast<std::size_t>(it) * static_cast<std::size_t>(spec_.n_space()) + static_cast<std::size_t>(jspace)];
    }
    double at(int it, std::int64_t jspace) const {
        return v_[static_cast<std::size_t>(it) * static_cast<std::size_t>(spec_.n_space()) + static_cast<std::size_t>(jspace)];
    }

    /// Linear space index of (jx, jy, jz); unused coordinates must be 0.
    std::int64_t space_index(int jx, int jy = 0, int jz = 0) const {
        std::int64_t idx = jx;
        if (spec_.d >= 2) idx += static_cast<std::int64_t>(jy) * spec_.n_x;
        if (spec_.d >= 3) idx += static_cast<std::int64_t>(jz) * spec_.n_x * spec_.n_x;
        return idx;
    }

    /// Squared L^2 norm with the lattice quadrature dt*dx^d.
    double l2_sq() const;
    double sup_abs() const;

    friend double inner(const GridField& a, const GridField& b);

  private:
    GridSpec spec_;
    std::vector<double> v_;
};

/// dt*dx^d weighted inner product; throws on spec mismatch.
double inner(const GridField& a, const GridField& b);

}  // namespace sac
