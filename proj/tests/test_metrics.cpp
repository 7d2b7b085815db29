#include "support.hpp"

#include "prom/metrics.hpp"

#include <doctest.h>

using namespace prom;
using namespace prom::testing;

TEST_CASE("relative error identities") {
  Rng rng(1);
  const MatrixXd q = gaussian(rng, 12, 30);
  CHECK(relative_error(q, q) == 0);
  CHECK(std::abs(relative_error(q, MatrixXd::Zero(12, 30)) - 1) < 1e-12);
  for (double eps : {1e-6, 1e-3, 0.1, 0.5}) {
    CHECK(std::abs(relative_error(q, MatrixXd((1 + eps) * q)) - eps) < 1e-12);
  }
  SUBCASE("vectors and expressions") {
    const VectorXd v = gaussian(rng, 9, 1);
    CHECK(std::abs(relative_error(v, 2.0 * v) - 1) < 1e-12);
  }
}

TEST_CASE("relative error: printed denominator") {
  Rng rng(2);
  const MatrixXd q = gaussian(rng, 5, 6);
  // sqrt(Qh^T Qr) with Qr = (1 + eps) Qh gives eps / sqrt(1 + eps).
  const double eps = 0.2;
  CHECK(relative_error(q, MatrixXd((1 + eps) * q), true) == doctest::Approx(eps / std::sqrt(1 + eps)).epsilon(1e-12));
  CHECK_THROWS_AS(relative_error(q, MatrixXd(-q), true), NumericError);
  CHECK_THROWS_AS(relative_error(q, MatrixXd::Zero(5, 6), true), NumericError);
}

TEST_CASE("relative error: invalid inputs") {
  CHECK_THROWS_AS(relative_error(MatrixXd::Zero(3, 3), MatrixXd::Ones(3, 3)), NumericError);
  CHECK_THROWS_AS(relative_error(MatrixXd::Ones(3, 3), MatrixXd::Ones(3, 2)), ConfigError);
}

TEST_CASE("speed-up") {
  CHECK(speedup(4.0, 4.0) == 1.0);
  CHECK(speedup(1.19e4, 3.06e2) == doctest::Approx(38.8).epsilon(3e-3));
  CHECK(speedup(1.19e4, 1.02e4) == doctest::Approx(1.16).epsilon(1e-2));
  CHECK_THROWS_AS(speedup(1.0, 0.0), ConfigError);
}

TEST_CASE("summaries") {
  std::vector<ComparisonReport> rows(3);
  rows[0].re_u = 0.01;
  rows[1].re_u = 0.03;
  rows[2].re_u = 0.02;
  rows[1].re_rf = 0.5;
  const auto s = summarize(rows);
  CHECK(s.count == 3);
  CHECK(s.mean_re_u == doctest::Approx(0.02));
  CHECK(s.max_re_u == 0.03);
  CHECK(s.max_re_rf == 0.5);
  CHECK(summarize({}).count == 0);
}
