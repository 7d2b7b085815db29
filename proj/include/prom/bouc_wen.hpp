#pragma once

// Bouc-Wen hysteretic link:
//   dz/dt = A xdot - beta |xdot| z |z|^(w-1) - gamma xdot |z|^w
// with link force k_link * A * z. The envelope z_max = (A / (beta + gamma))^(1/w).

#include "prom/types.hpp"

#include <cmath>

namespace prom {

inline constexpr Index kGround = -1;

template <typename Scalar = double>
struct BoucWenLink {
  Index dof_i = kGround;  ///< lower node; kGround for the foundation
  Index dof_j = 0;
  Scalar k_link{};
  Scalar A{};
  Scalar beta{};
  Scalar gamma{};
  Scalar w = 1;
  Scalar z_max{};

  /// Parameterization by amplitude and envelope; beta and gamma split evenly.
  static BoucWenLink from_envelope(Index dof_i, Index dof_j, Scalar k_link, Scalar A, Scalar z_max,
                                   Scalar w = 1) {
    require(k_link > 0 && A > 0 && z_max > 0, "Bouc-Wen link parameters must be positive");
    require(w >= 1, "Bouc-Wen exponent must be >= 1");
    BoucWenLink l;
    l.dof_i = dof_i;
    l.dof_j = dof_j;
    l.k_link = k_link;
    l.A = A;
    l.w = w;
    l.z_max = z_max;
    const Scalar sum = A / std::pow(z_max, w);
    l.beta = sum / 2;
    l.gamma = sum / 2;
    return l;
  }

  Scalar envelope() const { return std::pow(A / (beta + gamma), 1 / w); }

  Scalar force(Scalar z) const { return k_link * A * z; }

  /// Relative displacement (or velocity) of the link from a nodal vector.
  template <typename Derived>
  Scalar relative(const Eigen::MatrixBase<Derived>& u) const {
    return u(dof_j) - (dof_i == kGround ? Scalar(0) : u(dof_i));
  }

  Scalar rate(Scalar z, Scalar xdot) const {
    const Scalar az = std::abs(z);
    const Scalar azw1 = std::pow(az, w - 1);
    return A * xdot - beta * std::abs(xdot) * z * azw1 - gamma * xdot * az * azw1;
  }

  Scalar rate_dz(Scalar z, Scalar xdot) const {
    const Scalar az = std::abs(z);
    const Scalar sgn = z > 0 ? Scalar(1) : (z < 0 ? Scalar(-1) : Scalar(0));
    // d(z|z|^(w-1))/dz = w|z|^(w-1); d|z|^w/dz = w|z|^(w-1) sgn(z)
    const Scalar wzw1 = w * std::pow(az, w - 1);
    return -beta * std::abs(xdot) * wzw1 - gamma * xdot * wzw1 * sgn;
  }

  Scalar rate_dxdot(Scalar z, Scalar xdot) const {
    const Scalar az = std::abs(z);
    const Scalar sgn = xdot > 0 ? Scalar(1) : (xdot < 0 ? Scalar(-1) : Scalar(0));
    return A - beta * sgn * z * std::pow(az, w - 1) - gamma * std::pow(az, w);
  }
};

template <typename Scalar>
struct LinkUpdate {
  Scalar z{};
  Scalar dz_dxdot{};  ///< sensitivity of the new state to the (constant) step rate
};

/// Advance z over dt with xdot held constant. The result is clamped to
/// [-z_max, z_max] and carries the sensitivity dz/dxdot.
/// With beta = gamma the rate on the unloading branch (z xdot < 0) is the
/// constant A xdot, so that branch is integrated exactly up to z = 0; the
/// remaining interval uses classical RK4 with the sensitivity carried in
/// forward mode. Fast rates make the ODE stiff, so the substep count is raised
/// until the largest |d(rate)/dz| times the substep is at most 0.05.
template <typename Scalar>
LinkUpdate<Scalar> advance_link(const BoucWenLink<Scalar>& link, Scalar z0, Scalar xdot, Scalar dt,
                                int substeps = 1) {
  if (xdot == 0) return {z0, link.rate_dxdot(z0, xdot) * dt};
  Scalar z = z0;
  Scalar s = 0;
  Scalar t = dt;
  Scalar t_cross = 0;
  if (link.beta == link.gamma && z0 * xdot < 0) {
    t_cross = -z0 / (link.A * xdot);
    if (t_cross >= dt) return {z0 + link.A * xdot * dt, link.A * dt};
    z = 0;
    t = dt - t_cross;
  }
  const Scalar stiff = std::abs(xdot) * (link.beta + link.gamma) * link.w * std::pow(link.z_max, link.w - 1);
  const Scalar needed = std::ceil(std::min(stiff * t / Scalar(0.05), Scalar(1e6)));
  if (needed > Scalar(substeps)) substeps = static_cast<int>(needed);
  const Scalar h = t / Scalar(substeps);
  auto stage = [&](Scalar zz, Scalar ss, Scalar& k, Scalar& dk) {
    k = link.rate(zz, xdot);
    dk = link.rate_dxdot(zz, xdot) + link.rate_dz(zz, xdot) * ss;
  };
  for (int i = 0; i < substeps; ++i) {
    Scalar k1, k2, k3, k4, d1, d2, d3, d4;
    stage(z, s, k1, d1);
    stage(z + h / 2 * k1, s + h / 2 * d1, k2, d2);
    stage(z + h / 2 * k2, s + h / 2 * d2, k3, d3);
    stage(z + h * k3, s + h * d3, k4, d4);
    z += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    s += h / 6 * (d1 + 2 * d2 + 2 * d3 + d4);
  }
  // The crossing time moves with xdot: d t_cross / d xdot = -t_cross / xdot.
  if (t_cross > 0) s += link.rate(z, xdot) * t_cross / xdot;
  if (z > link.z_max) return {link.z_max, Scalar(0)};
  if (z < -link.z_max) return {-link.z_max, Scalar(0)};
  return {z, s};
}

}  // namespace prom
