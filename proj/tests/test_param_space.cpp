#include "prom/param_space.hpp"

#include <doctest.h>

#include <random>

using namespace prom;

namespace {

Box<double> toy_domain() { return Box<double>{{{"A", 0.1, 1.0}, {"z_max", 1e4, 5e4}}}; }
Box<double> unit_square() { return Box<double>{{{"x", 0.0, 1.0}, {"y", 0.0, 1.0}}}; }

}  // namespace

TEST_CASE("extents 0.4 x 1.6e4 give four base tiles and five remainder tiles") {
  const auto g = partition_grid_extents(toy_domain(), {0.4, 1.6e4}, Overlap::Remainder);
  CHECK(g.base_count() == 4);
  // Remainders on both axes: two per axis plus the shared corner tile.
  CHECK(g.overlapping_count() == 5);
  for (const auto& s : g.subdomains) CHECK(s.training_points.size() == 5);
}

TEST_CASE("extents 0.2 x 0.8e4 give twenty base tiles and five remainder tiles") {
  const auto g = partition_grid_extents(toy_domain(), {0.2, 0.8e4}, Overlap::Remainder);
  CHECK(g.base_count() == 20);
  CHECK(g.overlapping_count() == 5);
}

TEST_CASE("no overlap leaves the remainder uncovered") {
  const auto g = partition_grid_extents(toy_domain(), {0.4, 1.6e4}, Overlap::None);
  CHECK(g.overlapping_count() == 0);
  CHECK_THROWS_AS(locate(g, ParameterPoint<double>{0.95, 2e4}), DomainError);
}

TEST_CASE("identity partition") {
  const auto g = partition_grid(unit_square(), {1, 1});
  REQUIRE(g.subdomains.size() == 1);
  const auto& c = g.subdomains[0].reference();
  CHECK(c[0] == doctest::Approx(0.5));
  CHECK(c[1] == doctest::Approx(0.5));
}

TEST_CASE("every point of the domain is covered") {
  const auto d = toy_domain();
  for (const auto& ext : {std::vector<double>{0.4, 1.6e4}, std::vector<double>{0.2, 0.8e4}}) {
    const auto g = partition_grid_extents(d, ext, Overlap::Remainder);
    for (int i = 0; i <= 20; ++i)
      for (int j = 0; j <= 20; ++j) {
        const auto q = d.denormalize(Eigen::Vector2d(i / 20.0, j / 20.0));
        CHECK_NOTHROW(locate(g, q));
      }
  }
}

TEST_CASE("locate") {
  const auto g = partition_grid(unit_square(), {2, 1});
  SUBCASE("centroid selects its own subdomain") {
    for (const auto& s : g.subdomains) CHECK(locate(g, s.reference()).id == s.id);
  }
  SUBCASE("shared edge goes to the lower index") { CHECK(locate(g, ParameterPoint<double>{0.5, 0.3}).id == 0); }
  SUBCASE("outside the domain") { CHECK_THROWS_AS(locate(g, ParameterPoint<double>{1.2, 0.3}), DomainError); }
  SUBCASE("point in a box of a differently scaled domain") {
    const Box<double> d{{{"a", 0.25, 1.75}, {"b", 16.0, 36.0}}};
    const auto one = partition_grid(d, {1, 1});
    CHECK(locate(one, ParameterPoint<double>{0.62, 31.0}).id == 0);
  }
}

TEST_CASE("interpolation weights") {
  const auto d = unit_square();
  const auto g = partition_grid(d, {1, 1});
  const auto& sub = g.subdomains[0];

  SUBCASE("one-hot at a training point") {
    for (std::size_t k = 0; k < sub.training_points.size(); ++k) {
      const VectorXd w = interpolation_weights(d, sub, sub.training_points[k]);
      VectorXd e = VectorXd::Zero(5);
      e(static_cast<Index>(k)) = 1;
      CHECK((w - e).norm() == 0);
    }
  }
  SUBCASE("equidistant corners share equal weight") {
    const VectorXd w = interpolation_weights(d, sub, ParameterPoint<double>{0.5, 0.0});
    CHECK(w(0) == doctest::Approx(w(1)).epsilon(1e-15));
    CHECK(w(2) == doctest::Approx(w(3)).epsilon(1e-15));
  }
  SUBCASE("matches the inverse-square formula") {
    // Reference values from an independent numpy evaluation of d^-2 / sum d^-2.
    const double frozen[] = {0.07015503002833882, 0.04532139108025428, 0.39394747631297966, 0.09662862626544784,
                             0.3939474763129795};
    const ParameterPoint<double> q{0.3, 0.8};
    const VectorXd w = interpolation_weights(d, sub, q);
    double denom = 0;
    VectorXd direct(5);
    for (Index i = 0; i < 5; ++i) {
      const double dx = q[0] - sub.training_points[i][0], dy = q[1] - sub.training_points[i][1];
      direct(i) = 1 / (dx * dx + dy * dy);
      denom += direct(i);
    }
    direct /= denom;
    for (Index i = 0; i < 5; ++i) {
      CHECK(w(i) == doctest::Approx(frozen[i]).epsilon(1e-13));
      CHECK(w(i) == doctest::Approx(direct(i)).epsilon(1e-13));
    }
  }
  SUBCASE("distances use normalized coordinates") {
    const auto dt = toy_domain();
    const auto gt = partition_grid(dt, {1, 1});
    const VectorXd wt = interpolation_weights(dt, gt.subdomains[0], dt.denormalize(Eigen::Vector2d(0.3, 0.8)));
    const VectorXd wu = interpolation_weights(d, sub, ParameterPoint<double>{0.3, 0.8});
    CHECK((wt - wu).norm() < 1e-14);
  }
}

TEST_CASE("weights form a partition of unity") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  const auto d = toy_domain();
  const auto g = partition_grid_extents(d, {0.2, 0.8e4}, Overlap::Remainder);
  for (int k = 0; k < 500; ++k) {
    const auto q = d.denormalize(Eigen::Vector2d(u(rng), u(rng)));
    const auto& sub = locate(g, q);
    const VectorXd w = interpolation_weights(d, sub, q);
    CHECK(std::abs(w.sum() - 1) < 1e-12);
    CHECK(w.minCoeff() >= 0);
  }
}

TEST_CASE("degenerate axes are rejected") {
  const Box<double> d{{{"x", 1.0, 1.0}}};
  CHECK_THROWS_AS(d.validate(), ConfigError);
}
