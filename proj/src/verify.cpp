#include "prom/verify.hpp"

#include "prom/ecsw.hpp"
#include "prom/full_order_system.hpp"
#include "prom/grassmann.hpp"
#include "prom/metrics.hpp"
#include "prom/param_space.hpp"
#include "prom/pod.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace prom {

namespace {

using Rng = std::mt19937_64;

MatrixXd gaussian(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> nd;
  MatrixXd m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = nd(rng);
  return m;
}

ReductionBasis<double> as_basis(const MatrixXd& m) {
  ReductionBasis<double> b;
  b.matrix = orthonormalize(m);
  return b;
}

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

CheckResult weights_partition_of_unity(Rng& rng) {
  Box<double> d{{{"A", 0.1, 1.0}, {"z_max", 1e4, 5e4}}};
  const auto grid = partition_grid(d, {1, 1});
  std::uniform_real_distribution<double> u(0, 1);
  double worst = 0, min_w = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto q = d.denormalize(Eigen::Vector2d(u(rng), u(rng)));
    const VectorXd w = interpolation_weights(d, grid.subdomains[0], q);
    worst = std::max(worst, std::abs(w.sum() - 1));
    min_w = std::min(min_w, w.minCoeff());
  }
  return {"weights partition of unity (1000 queries)", worst < 1e-12 && min_w >= 0, "max |sum-1| = " + sci(worst)};
}

CheckResult grassmann_round_trip(Rng& rng) {
  double worst_angle = 0, worst_ortho = 0;
  for (int k = 0; k < 100; ++k) {
    const MatrixXd base = gaussian(rng, 30, 4);
    const auto v0 = as_basis(base);
    const auto vi = as_basis(base + 0.1 * gaussian(rng, 30, 4));
    const auto back = exp_map(v0, log_map(v0, vi));
    worst_angle = std::max(worst_angle, largest_principal_angle(vi.matrix, back.matrix));
    worst_ortho = std::max(worst_ortho, orthonormality_defect(back.matrix));
  }
  return {"Grassmann exp(log) round trip (100 pairs)", worst_angle < 1e-9 && worst_ortho < 1e-10,
          "max angle " + sci(worst_angle) + ", max orthonormality defect " + sci(worst_ortho)};
}

CheckResult span_invariance(Rng& rng) {
  const auto v0 = as_basis(gaussian(rng, 20, 3));
  const MatrixXd R = orthonormalize(gaussian(rng, 3, 3));
  ReductionBasis<double> vr = v0;
  vr.matrix = v0.matrix * R;
  const double g = log_map(v0, vr).matrix.norm();
  return {"log_map(V0, V0 R) = 0", g < 1e-10, "||Gamma|| = " + sci(g)};
}

CheckResult bouc_wen_saturation(Rng& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  const auto link = BoucWenLink<double>::from_envelope(kGround, 0, 1.0, 0.5, 2.0, 1.0);
  double z = 0, worst = 0;
  for (int k = 0; k < 20000; ++k) {
    z = advance_link(link, z, 50 * u(rng), 0.01, 4).z;
    worst = std::max(worst, std::abs(z));
  }
  return {"Bouc-Wen |z| <= z_max", worst <= link.z_max * (1 + 1e-9), "sup |z| / z_max = " + sci(worst / link.z_max)};
}

CheckResult bouc_wen_dissipation(Rng& rng) {
  std::uniform_real_distribution<double> amp(0.2, 5), wexp(1, 3), a(0.2, 1.5);
  double worst = 1e300;
  for (int k = 0; k < 100; ++k) {
    const auto link = BoucWenLink<double>::from_envelope(kGround, 0, 1.0, a(rng), 1.0, wexp(rng));
    const double X = amp(rng);
    const int steps = 400;
    const double dt = 1.0 / steps;
    double z = 0, x_prev = 0, work = 0;
    for (int cyc = 0; cyc < 2; ++cyc) {
      work = 0;
      for (int s = 1; s <= steps; ++s) {
        const double x = X * std::sin(2 * std::numbers::pi * s / steps);
        const double f0 = link.force(z);
        z = advance_link(link, z, (x - x_prev) / dt, dt, 4).z;
        work += 0.5 * (f0 + link.force(z)) * (x - x_prev);
        x_prev = x;
      }
    }
    worst = std::min(worst, work);
  }
  return {"Bouc-Wen cycle dissipation >= 0 (100 cycles)", worst >= 0, "min cycle work = " + sci(worst)};
}

CheckResult restoring_force_pure(Rng& rng) {
  std::vector<LinkParams<double>> lp(5, {2.0, 0.7, 1.5, 1.0});
  auto m = build_shear_frame(std::vector<double>(5, 1.0), std::vector<double>(5, 10.0), 0.05, lp);
  m.link_z = gaussian(rng, 5, 1);
  const VectorXd u = gaussian(rng, 5, 1);
  const VectorXd f1 = restoring_force(m, u), f2 = restoring_force(m, u);
  return {"restoring_force is pure", (f1.array() == f2.array()).all(), "bitwise comparison"};
}

CheckResult nnls_feasible(Rng& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  EcswTraining<double> t;
  t.G = MatrixXd::NullaryExpr(40, 60, [&] { return u(rng); });
  t.b = t.G.rowwise().sum();
  t.tau = 0.01;
  const auto mesh = solve_sparse_nnls(t);
  double res = (t.b - t.G(Eigen::all, mesh.selected) * mesh.weights).norm() / t.b.norm();
  const bool positive = mesh.weights.size() == 0 || mesh.weights.minCoeff() > 0;
  return {"sparse NNLS feasibility and positivity", res <= t.tau && positive && mesh.feasible,
          "residual " + sci(res) + " with " + std::to_string(mesh.size()) + " of 60 columns"};
}

CheckResult newmark_energy() {
  std::vector<LinkParams<double>> lp(1, {1e-12, 1.0, 1.0, 1.0});
  auto m = build_shear_frame(std::vector<double>{2.0}, std::vector<double>{50.0}, 0.05, lp);
  m.damping *= 0.0;
  m.links.clear();
  m.link_z.resize(0);
  // Free vibration after a one-step impulse.
  LoadHistory<double> kick;
  kick.dt = 0.01;
  kick.samples = MatrixXd::Zero(1001, 1);
  kick.samples(1, 0) = 100.0;
  IntegratorConfig<double> cfg;
  FullOrderSystem<double> sys(m);
  const auto r = integrate(sys, kick, cfg);
  auto energy = [&](Index k) {
    const double u = r.displacements(k, 0), v = r.velocities(k, 0);
    return 0.5 * 2.0 * v * v + 0.5 * 50.0 * u * u;
  };
  const double e0 = energy(2);
  double drift = 0;
  for (Index k = 2; k < r.steps(); ++k) drift = std::max(drift, std::abs(energy(k) - e0) / e0);
  return {"Newmark energy conservation (undamped, linear)", drift < 1e-6, "max relative drift " + sci(drift)};
}

CheckResult pod_monotone(Rng& rng) {
  const MatrixXd X = gaussian(rng, 40, 20) * gaussian(rng, 20, 100);
  double prev = 1e300;
  bool ok = true;
  for (Index r = 1; r <= 20; ++r) {
    const auto b = pod_basis(X, r, Provenance::LocalSnapshot);
    const double e = reconstruction_error(X, b.matrix);
    ok = ok && e <= prev + 1e-14 && orthonormality_defect(b.matrix) < 1e-10;
    prev = e;
  }
  return {"POD reconstruction error non-increasing in r", ok, "r = 1..20"};
}

CheckResult metric_identities(Rng& rng) {
  const MatrixXd q = gaussian(rng, 7, 9);
  const double a = relative_error(q, q);
  const double b = relative_error(q, MatrixXd::Zero(7, 9));
  const double c = relative_error(q, MatrixXd(1.001 * q));
  const bool ok = a == 0 && std::abs(b - 1) < 1e-12 && std::abs(c - 1e-3) < 1e-12;
  return {"relative error identities", ok, "RE(q,0) - 1 = " + sci(b - 1) + ", RE(q,1.001q) - 1e-3 = " + sci(c - 1e-3)};
}

}  // namespace

std::vector<CheckResult> run_invariant_suite(std::uint64_t seed) {
  Rng rng(seed);
  return {weights_partition_of_unity(rng), grassmann_round_trip(rng), span_invariance(rng),
          bouc_wen_saturation(rng),       bouc_wen_dissipation(rng), restoring_force_pure(rng),
          nnls_feasible(rng),             newmark_energy(),          pod_monotone(rng),
          metric_identities(rng)};
}

bool print_checks(const std::vector<CheckResult>& checks, std::ostream& os) {
  bool all = true;
  for (const auto& c : checks) {
    os << (c.pass ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
    all = all && c.pass;
  }
  return all;
}

}  // namespace prom
