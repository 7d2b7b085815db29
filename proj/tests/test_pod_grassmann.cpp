#include "support.hpp"

#include "prom/grassmann.hpp"

#include <doctest.h>

#include <cmath>

using namespace prom;
using namespace prom::testing;

namespace {

ReductionBasis<double> random_basis(Rng& rng, Index n, Index r) {
  ReductionBasis<double> b;
  b.matrix = orthonormalize(gaussian(rng, n, r));
  return b;
}

ReductionBasis<double> perturbed(Rng& rng, const ReductionBasis<double>& v, double eps) {
  ReductionBasis<double> b;
  b.matrix = orthonormalize(MatrixXd(v.matrix + eps * gaussian(rng, v.dofs(), v.order())));
  return b;
}

/// Tail energy from a full (Jacobi) SVD.
double svd_tail(const MatrixXd& X, Index r) {
  Eigen::JacobiSVD<MatrixXd> svd(X);
  const VectorXd s = svd.singularValues();
  return std::sqrt(s.tail(s.size() - r).squaredNorm()) / X.norm();
}

}  // namespace

TEST_CASE("local basis") {
  Rng rng(1);
  SUBCASE("rank-one snapshots span the mode") {
    const VectorXd phi = gaussian(rng, 20, 1);
    const VectorXd a = gaussian(rng, 50, 1);
    SnapshotSet<double> s{ParameterPoint<double>{0.0}, phi * a.transpose(), {}};
    const auto b = local_basis(s, 1);
    CHECK(largest_principal_angle(MatrixXd(phi.normalized()), b.matrix) < 1e-10);
  }
  SUBCASE("order equal to the rank reconstructs exactly") {
    const MatrixXd X = gaussian(rng, 30, 5) * gaussian(rng, 5, 40);
    const auto b = pod_basis(X, 5, Provenance::LocalSnapshot);
    CHECK(reconstruction_error(X, b.matrix) < 1e-10);
  }
  SUBCASE("truncation error equals the full-SVD tail") {
    const MatrixXd X = gaussian(rng, 50, 200);
    const auto b = pod_basis(X, 8, Provenance::LocalSnapshot);
    CHECK(reconstruction_error(X, b.matrix) == doctest::Approx(svd_tail(X, 8)).epsilon(1e-10));
  }
  SUBCASE("order above the numerical rank lists the rank") {
    const MatrixXd X = gaussian(rng, 30, 3) * gaussian(rng, 3, 40);
    try {
      pod_basis(X, 4, Provenance::LocalSnapshot);
      FAIL("expected NumericError");
    } catch (const NumericError& e) {
      CHECK(std::string(e.what()).find("rank 3") != std::string::npos);
    }
  }
  SUBCASE("order beyond the matrix size is a config error") {
    CHECK_THROWS_AS(pod_basis(MatrixXd(gaussian(rng, 5, 3)), 4, Provenance::LocalSnapshot), ConfigError);
  }
  SUBCASE("sign convention is deterministic") {
    const MatrixXd X = gaussian(rng, 25, 60);
    const auto a = pod_basis(X, 6, Provenance::LocalSnapshot);
    const auto b = pod_basis(MatrixXd(-X), 6, Provenance::LocalSnapshot);
    CHECK((a.matrix - b.matrix).norm() < 1e-10);
    for (Index j = 0; j < 6; ++j) {
      Index i = 0;
      a.matrix.col(j).cwiseAbs().maxCoeff(&i);
      CHECK(a.matrix(i, j) > 0);
    }
  }
}

TEST_CASE("POD properties") {
  Rng rng(2);
  const MatrixXd X = gaussian(rng, 40, 15) * gaussian(rng, 15, 80);
  double prev = 1e300;
  for (Index r = 1; r <= 15; ++r) {
    const auto b = pod_basis(X, r, Provenance::LocalSnapshot);
    CHECK(orthonormality_defect(b.matrix) < 1e-10);
    for (Index k = 1; k < r; ++k) CHECK(b.singular_values(k) <= b.singular_values(k - 1));
    const double e = reconstruction_error(X, b.matrix);
    CHECK(e <= prev + 1e-14);
    prev = e;
  }
  SUBCASE("energy criterion") {
    const auto b = pod_basis(X, 15, Provenance::LocalSnapshot);
    const Index r = order_for_energy(b.singular_values, 0.9);
    const double total = b.singular_values.squaredNorm();
    CHECK(b.singular_values.head(r).squaredNorm() / total >= 0.9);
    CHECK(b.singular_values.head(r - 1).squaredNorm() / total < 0.9);
  }
}

TEST_CASE("stack and compress") {
  Rng rng(3);
  SUBCASE("identical bases stacked") {
    const auto v = random_basis(rng, 30, 4);
    const auto g = stack_and_compress<double>({v.matrix, v.matrix, v.matrix}, 4);
    CHECK(largest_principal_angle(v.matrix, g.matrix) < 1e-10);
  }
  SUBCASE("orthogonal rank-one bases span their direct sum") {
    MatrixXd a = MatrixXd::Zero(10, 1), b = MatrixXd::Zero(10, 1);
    a(2, 0) = 1;
    b(7, 0) = 1;
    const auto g = stack_and_compress<double>({a, b}, 2);
    MatrixXd ab(10, 2);
    ab << a, b;
    CHECK(largest_principal_angle(ab, g.matrix) < 1e-12);
    CHECK(g.provenance == Provenance::GlobalRegion);
  }
  SUBCASE("toy-run bases: truncation error equals the full-SVD tail") {
    std::vector<MatrixXd> bases;
    for (double A : {0.2, 0.4, 0.6, 0.8, 1.0}) {
      const auto m = toy_chain(12, A, 2e4);
      const auto truth = run_hfm(m, top_sine(12, 1e8, 0.8, 0.01, 3.0), integrator());
      bases.push_back(local_basis(to_snapshot(truth, ParameterPoint<double>{A}), 8).matrix);
    }
    MatrixXd stacked(12, 40);
    for (Index i = 0; i < 5; ++i) stacked.middleCols(8 * i, 8) = bases[static_cast<std::size_t>(i)];
    for (Index r : {4, 8, 11}) {
      const auto g = stack_and_compress(bases, r);
      CHECK(reconstruction_error(stacked, g.matrix) == doctest::Approx(svd_tail(stacked, r)).epsilon(1e-8));
    }
  }
  SUBCASE("inconsistent shapes") {
    CHECK_THROWS_AS(stack_and_compress<double>({MatrixXd::Identity(4, 2), MatrixXd::Identity(5, 2)}, 2), ConfigError);
  }
}

TEST_CASE("log map") {
  Rng rng(4);
  const auto v0 = random_basis(rng, 25, 3);
  SUBCASE("of the reference is zero") { CHECK(log_map(v0, v0).matrix.norm() < 1e-12); }
  SUBCASE("is blind to a change of basis within the span") {
    ReductionBasis<double> vr;
    vr.matrix = v0.matrix * orthonormalize(gaussian(rng, 3, 3));
    CHECK(log_map(v0, vr).matrix.norm() < 1e-10);
  }
  SUBCASE("is horizontal") {
    const auto g = log_map(v0, perturbed(rng, v0, 0.3));
    CHECK((v0.matrix.transpose() * g.matrix).cwiseAbs().maxCoeff() < 1e-8);
  }
  SUBCASE("norm of the tangent equals the principal angles") {
    const auto vi = perturbed(rng, v0, 0.2);
    const auto g = log_map(v0, vi);
    Eigen::JacobiSVD<MatrixXd> s(v0.matrix.transpose() * vi.matrix);
    const VectorXd theta = s.singularValues().array().min(1.0).acos().matrix();
    CHECK(g.matrix.norm() == doctest::Approx(theta.norm()).epsilon(1e-8));
  }
  SUBCASE("orthogonal subspaces are rejected") {
    ReductionBasis<double> a, b;
    a.matrix = MatrixXd::Identity(6, 2);
    b.matrix = MatrixXd::Zero(6, 2);
    b.matrix(3, 0) = b.matrix(4, 1) = 1;
    CHECK_THROWS_AS(log_map(a, b), NumericError);
  }
}

TEST_CASE("exp map") {
  Rng rng(5);
  const auto v0 = random_basis(rng, 25, 3);
  SUBCASE("of zero is the reference") {
    const auto v = exp_map(v0, MatrixXd(MatrixXd::Zero(25, 3)));
    CHECK(largest_principal_angle(v0.matrix, v.matrix) < 1e-12);
  }
  SUBCASE("round trip over 100 nearby pairs") {
    double worst_angle = 0, worst_ortho = 0;
    for (int k = 0; k < 100; ++k) {
      const auto a = random_basis(rng, 30, 4);
      const auto b = perturbed(rng, a, 0.15);
      const auto back = exp_map(a, log_map(a, b));
      worst_angle = std::max(worst_angle, largest_principal_angle(b.matrix, back.matrix));
      worst_ortho = std::max(worst_ortho, orthonormality_defect(back.matrix));
    }
    CHECK(worst_angle < 1e-9);
    CHECK(worst_ortho < 1e-10);
  }
  SUBCASE("geodesic: principal angle grows linearly in t") {
    const auto g = log_map(v0, perturbed(rng, v0, 0.2));
    Eigen::JacobiSVD<MatrixXd> svd(g.matrix);
    const double smax = svd.singularValues()(0);
    double prev = -1;
    for (int i = 0; i <= 10; ++i) {
      const double t = i / 10.0;
      const double ang = largest_principal_angle(v0.matrix, exp_map(v0, MatrixXd(t * g.matrix)).matrix);
      CHECK(ang > prev);
      CHECK(std::abs(ang - t * smax) < 1e-9);
      prev = ang;
    }
  }
}

TEST_CASE("principal angle oracle") {
  Rng rng(6);
  const auto a = random_basis(rng, 15, 3);
  const auto b = perturbed(rng, a, 0.4);
  Eigen::JacobiSVD<MatrixXd> s(a.matrix.transpose() * b.matrix);
  const double cos_min = s.singularValues().minCoeff();
  CHECK(largest_principal_angle(a.matrix, b.matrix) == doctest::Approx(std::acos(cos_min)).epsilon(1e-8));
}
