#include "support.hpp"

#include "prom/region_model.hpp"

#include <doctest.h>

#include <map>

using namespace prom;
using namespace prom::testing;

namespace {

constexpr Index kStories = 20;
constexpr Index kOrder = 3;

struct Fixture {
  Box<double> domain{{{"A", 0.3, 0.7}, {"z_max", 1.5e4, 2.5e4}}};
  ParameterGrid<double> grid = partition_grid(domain, {1, 1});
  LoadHistory<double> loads = top_sine(kStories, 1e8, 0.8, 0.01, 4.0);
  std::vector<GroundTruth<double>> truths;
  std::vector<SnapshotSet<double>> snaps;

  Fixture() {
    for (const auto& p : grid.subdomains[0].training_points) {
      truths.push_back(run_hfm(toy_chain(kStories, p[0], p[1]), loads, integrator()));
      snaps.push_back(to_snapshot(truths.back(), p));
    }
  }

  std::vector<const SnapshotSet<double>*> ptrs() const {
    std::vector<const SnapshotSet<double>*> out;
    for (const auto& s : snaps) out.push_back(&s);
    return out;
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

}  // namespace

TEST_CASE("global basis") {
  const auto& f = fixture();
  SUBCASE("single training point equals its local basis") {
    const auto g = build_global<double>({&f.snaps[0]}, kOrder);
    CHECK(largest_principal_angle(g.matrix, local_basis(f.snaps[0], kOrder).matrix) < 1e-12);
  }
  SUBCASE("dissimilar regimes are each represented worse than by their own basis") {
    const auto soft = run_hfm(toy_chain(kStories, 0.1, 1e4), f.loads, integrator());
    const auto stiff = run_hfm(toy_chain(kStories, 1.0, 5e4), f.loads, integrator());
    const auto s1 = to_snapshot(soft, ParameterPoint<double>{0.1, 1e4});
    const auto s2 = to_snapshot(stiff, ParameterPoint<double>{1.0, 5e4});
    const auto g = build_global<double>({&s1, &s2}, kOrder);
    CHECK(reconstruction_error(s1.displacements, g.matrix) > reconstruction_error(s1.displacements, local_basis(s1, kOrder).matrix));
    CHECK(reconstruction_error(s2.displacements, g.matrix) > reconstruction_error(s2.displacements, local_basis(s2, kOrder).matrix));
  }
}

TEST_CASE("region model construction") {
  const auto& f = fixture();
  const auto& sub = f.grid.subdomains[0];
  const auto rm = build_region(sub, f.ptrs(), kOrder);

  CHECK(rm.local_bases.size() == 5);
  CHECK(rm.global_region_basis.order() == 5 * kOrder);
  CHECK(largest_principal_angle(rm.reference_basis.matrix, local_basis(f.snaps[4], kOrder).matrix) < 1e-12);

  SUBCASE("untruncated region basis reproduces every tangent") {
    for (std::size_t i = 0; i < rm.tangent_locals.size(); ++i) {
      const MatrixXd back = rm.global_region_basis.matrix * rm.coeff_matrices[i];
      CHECK((back - rm.tangent_locals[i].matrix).norm() <= 1e-10 * std::max(1.0, rm.tangent_locals[i].matrix.norm()));
    }
  }
  SUBCASE("truncated region basis: residual equals the SVD tail") {
    const auto rt = build_region(sub, f.ptrs(), kOrder, 6);
    MatrixXd stacked(kStories, 5 * kOrder);
    for (Index i = 0; i < 5; ++i) stacked.middleCols(i * kOrder, kOrder) = rt.tangent_locals[static_cast<std::size_t>(i)].matrix;
    Eigen::JacobiSVD<MatrixXd> svd(stacked);
    const VectorXd s = svd.singularValues();
    double residual2 = 0;
    for (std::size_t i = 0; i < 5; ++i) {
      residual2 += (rt.global_region_basis.matrix * rt.coeff_matrices[i] - rt.tangent_locals[i].matrix).squaredNorm();
    }
    CHECK(std::sqrt(residual2) == doctest::Approx(std::sqrt(s.tail(s.size() - 6).squaredNorm())).epsilon(1e-8));
  }
  SUBCASE("one training point: Xi recovers the tangent exactly") {
    Subdomain<double> one = sub;
    one.training_points = {sub.training_points[0]};
    one.reference_index = 0;
    const auto r1 = build_region<double>(one, {&f.snaps[0]}, kOrder);
    CHECK((r1.global_region_basis.matrix * r1.coeff_matrices[0] - r1.tangent_locals[0].matrix).norm() < 1e-12);
  }
  SUBCASE("mismatched snapshot count") {
    CHECK_THROWS_AS(build_region<double>(sub, {&f.snaps[0]}, kOrder), ConfigError);
  }
}

TEST_CASE("interpolated bases") {
  const auto& f = fixture();
  const auto& sub = f.grid.subdomains[0];
  const auto rm = build_region(sub, f.ptrs(), kOrder);

  SUBCASE("training points are recovered") {
    for (std::size_t i = 0; i < 5; ++i) {
      const auto q = sub.training_points[i];
      CHECK(largest_principal_angle(interpolate_coefficients(rm, f.domain, q).basis.matrix, rm.local_bases[i].matrix) < 1e-8);
      CHECK(largest_principal_angle(interpolate_entries(rm, f.domain, q).basis.matrix, rm.local_bases[i].matrix) < 1e-8);
    }
  }
  SUBCASE("centroid query uses the centroid coefficients") {
    const auto it = interpolate_coefficients(rm, f.domain, sub.reference());
    CHECK(it.weights(4) == 1.0);
    CHECK(largest_principal_angle(it.basis.matrix, rm.reference_basis.matrix) < 1e-12);
  }
  SUBCASE("coefficients and entries coincide for the untruncated region basis") {
    for (double a : {0.35, 0.45, 0.62}) {
      for (double z : {1.6e4, 2.1e4, 2.45e4}) {
        const ParameterPoint<double> q{a, z};
        const double ang = largest_principal_angle(interpolate_coefficients(rm, f.domain, q).basis.matrix,
                                                   interpolate_entries(rm, f.domain, q).basis.matrix);
        CHECK(ang < 1e-9);
      }
    }
  }
  SUBCASE("truncated region basis: subspaces differ, both stay accurate") {
    const auto rt = build_region(sub, f.ptrs(), kOrder, 2);
    const ParameterPoint<double> q{0.4, 1.75e4};
    const auto bc = interpolate_coefficients(rt, f.domain, q).basis;
    const auto be = interpolate_entries(rt, f.domain, q).basis;
    CHECK(largest_principal_angle(bc.matrix, be.matrix) > 1e-9);
    const auto model = toy_chain(kStories, q[0], q[1]);
    const auto truth = run_hfm(model, f.loads, integrator());
    ReducedSystem<double> rc(model, bc), re(model, be);
    CHECK(compare_rom(model, f.loads, integrator(), truth, rc).re_u < 0.05);
    CHECK(compare_rom(model, f.loads, integrator(), truth, re).re_u < 0.05);
  }
  SUBCASE("query outside the subdomain") {
    CHECK_THROWS_AS(interpolate_coefficients(rm, f.domain, ParameterPoint<double>{0.9, 2e4}), DomainError);
    CHECK_THROWS_AS(interpolate_entries(rm, f.domain, ParameterPoint<double>{0.5, 3e4}), DomainError);
    CHECK_THROWS_AS(query_local(rm, f.domain, ParameterPoint<double>{0.5, 3e4}, toy_chain(kStories, 0.5, 2e4)), DomainError);
  }
  SUBCASE("interpolated bases are orthonormal") {
    const auto b = interpolate_coefficients(rm, f.domain, ParameterPoint<double>{0.41, 2.3e4}).basis;
    CHECK(orthonormality_defect(b.matrix) < 1e-10);
  }
}

TEST_CASE("local variant on a single subdomain equals the global basis of its training set") {
  const auto& f = fixture();
  const auto rm = build_region(f.grid.subdomains[0], f.ptrs(), kOrder);
  const auto g = build_global(f.ptrs(), kOrder);
  CHECK(largest_principal_angle(rm.local_region_basis.matrix, g.matrix) < 1e-10);
}

TEST_CASE("query builders") {
  const auto& f = fixture();
  const auto rm = build_region(f.grid.subdomains[0], f.ptrs(), kOrder);
  const ParameterPoint<double> q{0.4, 1.75e4};
  const auto model = toy_chain(kStories, q[0], q[1]);
  const auto truth = run_hfm(model, f.loads, integrator());
  auto rc = query_coefficients(rm, f.domain, q, model);
  auto re = query_entries(rm, f.domain, q, model);
  auto rl = query_local(rm, f.domain, q, model);
  const double ec = compare_rom(model, f.loads, integrator(), truth, rc).re_u;
  const double ee = compare_rom(model, f.loads, integrator(), truth, re).re_u;
  const double el = compare_rom(model, f.loads, integrator(), truth, rl).re_u;
  CHECK(ec == doctest::Approx(ee).epsilon(1e-6));
  CHECK(ec < 0.05);
  CHECK(el < 0.1);
  CHECK(variant_from_string("coefficients") == Variant::Coefficients);
  CHECK_THROWS_AS(variant_from_string("bogus"), ConfigError);
}

TEST_CASE("interpolation cost scales with n for entries only") {
  // Synthetic region models: nearby random subspaces of R^n, five training points.
  std::map<Index, std::pair<std::uint64_t, std::uint64_t>> flops;
  const Box<double> domain{{{"a", 0.0, 1.0}, {"b", 0.0, 1.0}}};
  const auto grid = partition_grid(domain, {1, 1});
  for (Index n : {50, 500, 5000}) {
    Rng rng(static_cast<std::uint64_t>(n));
    const MatrixXd base = gaussian(rng, n, 4);
    std::vector<SnapshotSet<double>> snaps;
    for (const auto& p : grid.subdomains[0].training_points) {
      const MatrixXd modes = base + 0.05 * gaussian(rng, n, 4);
      snaps.push_back({p, MatrixXd(modes * gaussian(rng, 4, 12)), {}});
    }
    std::vector<const SnapshotSet<double>*> ptrs;
    for (const auto& s : snaps) ptrs.push_back(&s);
    const auto rm = build_region(grid.subdomains[0], ptrs, 4);
    const ParameterPoint<double> q{0.3, 0.6};
    flops[n] = {interpolate_coefficients(rm, domain, q).interpolation_flops,
                interpolate_entries(rm, domain, q).interpolation_flops};
  }
  CHECK(flops[50].first == flops[500].first);
  CHECK(flops[500].first == flops[5000].first);
  CHECK(double(flops[5000].second) / double(flops[50].second) > 10);
  CHECK(flops[5000].second == 100 * flops[50].second);
}

TEST_CASE("order selection") {
  SUBCASE("threshold one accepts the first order") {
    const auto& f = fixture();
    const auto model = toy_chain(kStories, 0.5, 2e4);
    const auto& truth = f.truths[4];
    const auto choice = choose_order(model, f.snaps[4], f.loads, integrator(), truth, 1.0, 1.0);
    CHECK(choice.order == 1);
    CHECK(choice.satisfied);
  }
  SUBCASE("linear chain: order equals the number of excited modes") {
    const Index n = 8;
    const auto model = linear_chain(n, 400.0);
    const MatrixXd K = MatrixXd(model.linear_stiffness), M = MatrixXd(model.mass);
    // Unit masses: the mass-normalized modes are eigenvectors of K.
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(K);
    const VectorXd phi1 = es.eigenvectors().col(0), phi3 = es.eigenvectors().col(2);
    const double dt = 0.01;
    const Index steps = 601;
    LoadHistory<double> loads;
    loads.dt = dt;
    loads.samples.resize(steps, n);
    for (Index k = 0; k < steps; ++k) {
      const double t = double(k) * dt;
      loads.samples.row(k) = (M * (phi1 * std::sin(2.1 * t) + phi3 * 0.5 * std::sin(5.3 * t))).transpose();
    }
    const auto truth = run_hfm(model, loads, integrator(dt));
    const auto snap = to_snapshot(truth, ParameterPoint<double>{0.0});
    const auto choice = choose_order(model, snap, loads, integrator(dt), truth, 1e-6, 1.0);
    CHECK(choice.satisfied);
    CHECK(choice.order == 2);
    REQUIRE(choice.sweep.size() == 2);
    CHECK(choice.sweep[0].re_u > 1e-3);
  }
  SUBCASE("toy chain with a one percent target needs a handful of modes") {
    const auto& f = fixture();
    const auto model = toy_chain(kStories, 0.5, 2e4);
    const auto choice = choose_order(model, f.snaps[4], f.loads, integrator(), f.truths[4], 0.01, 1.0, 12);
    CHECK(choice.satisfied);
    CHECK(choice.order >= 2);
    CHECK(choice.order <= 10);
    for (std::size_t i = 0; i + 1 < choice.sweep.size(); ++i) CHECK(choice.sweep[i].re_u > 0.01);
  }
  SUBCASE("unreachable thresholds report the best order") {
    const auto& f = fixture();
    const auto model = toy_chain(kStories, 0.5, 2e4);
    const auto choice = choose_order(model, f.snaps[4], f.loads, integrator(), f.truths[4], 1e-15, 1e-15, 3);
    CHECK_FALSE(choice.satisfied);
    CHECK(choice.sweep.size() == 3);
    CHECK(choice.order >= 1);
  }
  SUBCASE("thresholds outside (0, 1]") {
    const auto& f = fixture();
    CHECK_THROWS_AS(choose_order(toy_chain(kStories, 0.5, 2e4), f.snaps[4], f.loads, integrator(), f.truths[4], 0.0, 0.5),
                    ConfigError);
  }
}
