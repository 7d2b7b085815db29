#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace prom;
using namespace prom::testing;

namespace {

StructuralModel<double> sdof(double m, double k, double zeta) {
  std::vector<LinkParams<double>> lp(1, {1.0, 1.0, 1.0, 1.0});
  auto s = build_shear_frame(std::vector<double>{m}, std::vector<double>{k}, zeta, lp);
  s.links.clear();
  s.link_z.resize(0);
  return s;
}

}  // namespace

TEST_CASE("zero load from rest stays at rest") {
  const auto m = toy_chain(4, 0.5, 2e4);
  LoadHistory<double> h;
  h.dt = 0.01;
  h.samples = MatrixXd::Zero(200, 4);
  const auto r = integrate_full(m, h, integrator());
  CHECK(r.displacements.norm() == 0);
  CHECK(r.velocities.norm() == 0);
}

TEST_CASE("linear SDOF steady-state amplitude matches the closed form") {
  const double mass = 2.0, k = 2.0 * std::pow(2 * std::numbers::pi * 1.5, 2), zeta = 0.1;
  const auto s = sdof(mass, k, zeta);
  const double c = MatrixXd(s.damping)(0, 0);
  const double f = 1.0, F = 10.0, dt = 0.001, T = 25.0;
  const auto loads = sinusoid(f, F, VectorXd(VectorXd::Ones(1)), dt, static_cast<Index>(T / dt) + 1);
  const auto r = integrate_full(s, loads, integrator(dt));

  // Least-squares fit of a sin + b cos over the last 5 s.
  const double w = 2 * std::numbers::pi * f;
  const Index n0 = r.steps() - static_cast<Index>(5.0 / dt);
  const Index len = r.steps() - n0;
  MatrixXd basis(len, 2);
  VectorXd y(len);
  for (Index i = 0; i < len; ++i) {
    const double t = double(n0 + i) * dt;
    basis(i, 0) = std::sin(w * t);
    basis(i, 1) = std::cos(w * t);
    y(i) = r.displacements(n0 + i, 0);
  }
  const Eigen::Vector2d ab = basis.colPivHouseholderQr().solve(y);
  const double amplitude = ab.norm();
  const double exact = F / std::sqrt(std::pow(k - mass * w * w, 2) + std::pow(c * w, 2));
  CHECK(std::abs(amplitude - exact) / exact < 1e-3);
}

TEST_CASE("undamped linear free vibration conserves energy") {
  const double mass = 1.5, k = 40.0;
  auto s = sdof(mass, k, 0.05);
  s.damping *= 0.0;
  LoadHistory<double> kick;
  kick.dt = 0.01;
  kick.samples = MatrixXd::Zero(1002, 1);
  kick.samples(1, 0) = 50.0;
  const auto r = integrate_full(s, kick, integrator());
  auto energy = [&](Index i) {
    const double u = r.displacements(i, 0), v = r.velocities(i, 0);
    return 0.5 * mass * v * v + 0.5 * k * u * u;
  };
  // Free vibration from step 2 on, 10 s.
  const double e0 = energy(2);
  double drift = 0;
  for (Index i = 2; i < r.steps(); ++i) drift = std::max(drift, std::abs(energy(i) - e0) / e0);
  CHECK(drift < 1e-6);
}

TEST_CASE("Newton failure names the step") {
  const auto m = toy_chain(3, 0.5, 2e4);
  auto cfg = integrator();
  cfg.newton_tol = 1e-300;
  cfg.max_newton_iters = 2;
  const auto loads = top_sine(3, 1e6, 1.0, 0.01, 1.0);
  try {
    integrate_full(m, loads, cfg);
    FAIL("expected a NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("step 1") != std::string::npos);
  }
}

TEST_CASE("nonlinear HFM converges quadratically") {
  const auto m = toy_chain(10, 1.0, 1e4);
  const auto r = integrate_full(m, top_sine(10, 1e8, 0.8, 0.01, 4.0), integrator());
  int worst = 0;
  for (int it : r.newton_iterations) worst = std::max(worst, it);
  CHECK(worst <= 8);
  CHECK(r.displacements.allFinite());
}

TEST_CASE("reduced system with the identity basis follows the full path") {
  const auto m = toy_chain(6, 0.7, 2e4);
  const auto loads = top_sine(6, 1e8, 0.8, 0.01, 3.0);
  const auto full = integrate_full(m, loads, integrator());
  ReductionBasis<double> id;
  id.matrix = MatrixXd::Identity(6, 6);
  ReducedSystem<double> rom(m, id);
  const auto red = integrate_reduced(rom, loads, integrator());
  CHECK((full.displacements - red.displacements).norm() <= 1e-12 * full.displacements.norm());
  CHECK(full.newton_iterations == red.newton_iterations);
}

TEST_CASE("untruncated POD basis reproduces the HFM") {
  const auto m = toy_chain(8, 0.5, 2e4);
  const auto loads = top_sine(8, 1e8, 0.8, 0.01, 4.0);
  const auto truth = run_hfm(m, loads, integrator());
  const auto snap = to_snapshot(truth, ParameterPoint<double>{0.5, 2e4});
  ReducedSystem<double> rom(m, local_basis(snap, 8));
  const auto c = compare_rom(m, loads, integrator(), truth, rom);
  CHECK(c.re_u < 1e-6);
  CHECK(c.re_rf < 1e-6);
  CHECK(c.order == 8);
}

TEST_CASE("reduced operators are Galerkin projections") {
  const auto m = toy_chain(7, 0.5, 2e4);
  Rng rng(9);
  ReductionBasis<double> b;
  b.matrix = Eigen::HouseholderQR<MatrixXd>(gaussian(rng, 7, 3)).householderQ() * MatrixXd::Identity(7, 3);
  ReducedSystem<double> rom(m, b);
  CHECK((rom.reduced_mass() - b.matrix.transpose() * MatrixXd(m.mass) * b.matrix).norm() < 1e-12);
  CHECK((rom.reduced_stiffness() - b.matrix.transpose() * MatrixXd(m.linear_stiffness) * b.matrix).norm() < 1e-9);
  const VectorXd ur = gaussian(rng, 3, 1) * 1e-3;
  const VectorXd g_full = trial_restoring_force(m, VectorXd(VectorXd::Zero(7)), VectorXd(b.matrix * ur), 0.01).force;
  const VectorXd g_red = rom.internal_force(ur, 0.01);
  CHECK((g_red - b.matrix.transpose() * g_full).norm() < 1e-9 * g_full.norm());
}
