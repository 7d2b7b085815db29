#pragma once

// Implicit Newmark integration with full Newton iterations.
//
// The integrator is generic over a `System` that exposes
//   Index size() const;
//   Vec   load(const LoadHistory&, Index step) const;  // generalized load
//   Vec   mass_times(const Vec&) const;
//   Vec   damping_times(const Vec&) const;
//   Vec   mass_solve(const Vec&) const;
//   Vec   internal_force(const Vec& u_trial, Scalar dt);  // trial, from committed state
//   void  factor(Scalar c_mass, Scalar c_damp);           // c_m M + c_d C + K_t(trial)
//   Vec   solve(const Vec& rhs) const;
//   void  commit(const Vec& u);                           // accept the trial state
// Full-order and reduced-order systems both satisfy it.

#include "prom/excitation.hpp"
#include "prom/types.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>
#include <vector>

namespace prom {

template <typename Scalar = double>
struct IntegratorConfig {
  Scalar dt = Scalar(0.01);
  Scalar beta = Scalar(0.25);
  Scalar gamma = Scalar(0.5);
  Scalar newton_tol = Scalar(1e-8);
  int max_newton_iters = 30;

  void validate() const {
    require(dt > 0, "integrator dt must be positive");
    require(beta > 0 && gamma >= Scalar(0.5) && 2 * beta >= gamma,
            "Newmark parameters must satisfy 2 beta >= gamma >= 1/2");
    require(newton_tol > 0 && max_newton_iters >= 1, "Newton settings must be positive");
  }
};

template <typename Scalar = double>
struct ResponseHistory {
  Scalar dt{};
  Mat<Scalar> displacements;  ///< steps x m
  Mat<Scalar> velocities;
  Mat<Scalar> accelerations;
  double wall_time_s = 0;
  std::vector<int> newton_iterations;     ///< per step (entry 0 unused)
  std::vector<Scalar> final_residual_ratio;  ///< last / previous residual, steps with >= 2 updates

  Index steps() const { return displacements.rows(); }
};

template <typename System>
auto integrate(System& sys, const LoadHistory<typename System::Scalar>& loads,
               const IntegratorConfig<typename System::Scalar>& cfg)
    -> ResponseHistory<typename System::Scalar> {
  using Scalar = typename System::Scalar;
  using V = Vec<Scalar>;
  cfg.validate();
  require(std::abs(loads.dt - cfg.dt) <= Scalar(1e-12) * cfg.dt, "load history dt differs from integrator dt");
  const Index m = sys.size();
  const Index T = loads.steps();
  const Scalar dt = cfg.dt, beta = cfg.beta, gamma = cfg.gamma;

  ResponseHistory<Scalar> out;
  out.dt = dt;
  out.displacements = Mat<Scalar>::Zero(T, m);
  out.velocities = Mat<Scalar>::Zero(T, m);
  out.accelerations = Mat<Scalar>::Zero(T, m);
  out.newton_iterations.assign(static_cast<std::size_t>(T), 0);

  const auto t0 = std::chrono::steady_clock::now();
  V u = V::Zero(m), v = V::Zero(m);
  V a = sys.mass_solve(sys.load(loads, 0) - sys.damping_times(v) - sys.internal_force(u, dt));
  out.accelerations.row(0) = a.transpose();

  const Scalar c_mass = 1 / (beta * dt * dt);
  const Scalar c_damp = gamma / (beta * dt);
  for (Index k = 1; k < T; ++k) {
    const V f = sys.load(loads, k);
    V un = u + dt * v + (dt * dt / 2) * a;
    V an, vn;
    Scalar prev_res = -1, res = 0;
    bool converged = false;
    int it = 0;
    for (;; ++it) {
      an = c_mass * (un - u - dt * v) - (1 / (2 * beta) - 1) * a;
      vn = v + dt * ((1 - gamma) * a + gamma * an);
      const V g = sys.internal_force(un, dt);
      const V ma = sys.mass_times(an);
      const V cv = sys.damping_times(vn);
      const V r = ma + cv + g - f;
      prev_res = it > 0 ? res : prev_res;
      res = r.norm();
      const Scalar ref = std::max({f.norm(), ma.norm(), g.norm(), cv.norm()});
      if (res <= cfg.newton_tol * ref || res == 0) {
        converged = true;
        break;
      }
      if (it == cfg.max_newton_iters) break;
      sys.factor(c_mass, c_damp);
      un -= sys.solve(r);
    }
    if (!converged) {
      std::ostringstream os;
      os << "Newton iteration failed to converge at step " << k << " (residual norm " << res << ")";
      throw NumericError(os.str());
    }
    if (it >= 2 && prev_res > 0) out.final_residual_ratio.push_back(res / prev_res);
    sys.commit(un);
    u = un;
    v = vn;
    a = an;
    out.displacements.row(k) = u.transpose();
    out.velocities.row(k) = v.transpose();
    out.accelerations.row(k) = a.transpose();
    out.newton_iterations[static_cast<std::size_t>(k)] = it;
  }
  out.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace prom
