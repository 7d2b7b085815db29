#pragma once

// Small fixtures shared by the unit tests.

#include "prom/evaluation.hpp"
#include "prom/structural_model.hpp"

#include <random>
#include <vector>

namespace prom::testing {

using Rng = std::mt19937_64;

inline MatrixXd gaussian(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> nd;
  MatrixXd m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = nd(rng);
  return m;
}

/// Heterogeneous chain whose mode shapes move with A: soft springs and stiff
/// links at the top.
inline StructuralModel<double> toy_chain(Index n, double A, double z_max, int substeps = 4) {
  std::vector<double> mass(n, 1.0), k(n);
  std::vector<LinkParams<double>> lp(n);
  for (Index e = 0; e < n; ++e) {
    const double t = n > 1 ? double(e) / double(n - 1) : 0.0;
    k[e] = 1000.0 + t * (190.0 - 1000.0);
    lp[e] = {3800.0 + t * (20000.0 - 3800.0), A, z_max, 1.0};
  }
  return build_shear_frame(mass, k, 0.04, lp, substeps);
}

/// Chain whose links are negligible (k_link tiny): effectively linear.
inline StructuralModel<double> linear_chain(Index n, double k = 100.0, double zeta = 0.04) {
  std::vector<LinkParams<double>> lp(n, {1e-12, 1.0, 1.0, 1.0});
  return build_shear_frame(std::vector<double>(n, 1.0), std::vector<double>(n, k), zeta, lp);
}

inline LoadHistory<double> top_sine(Index n, double amplitude, double freq_hz, double dt, double T) {
  VectorXd pattern = VectorXd::Zero(n);
  pattern(n - 1) = 1;
  return sinusoid(freq_hz, amplitude, pattern, dt, static_cast<Index>(T / dt + 0.5) + 1);
}

inline IntegratorConfig<double> integrator(double dt = 0.01) {
  IntegratorConfig<double> c;
  c.dt = dt;
  return c;
}

}  // namespace prom::testing
