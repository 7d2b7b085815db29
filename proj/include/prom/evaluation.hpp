#pragma once

// HFM ground truth and ROM-vs-HFM comparison at one parameter point.

#include "prom/full_order_system.hpp"
#include "prom/metrics.hpp"
#include "prom/reduced_system.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace prom {

template <typename Scalar = double>
struct GroundTruth {
  Mat<Scalar> displacements;  ///< n x steps
  Mat<Scalar> link_forces;    ///< links x steps
  Mat<Scalar> story_forces;   ///< elements x steps (spring + link)
  double wall_time_s = 0;
};

template <typename Scalar>
GroundTruth<Scalar> run_hfm(const StructuralModel<Scalar>& model, const LoadHistory<Scalar>& loads,
                            const IntegratorConfig<Scalar>& cfg) {
  const auto h = integrate_full(model, loads, cfg);
  GroundTruth<Scalar> g;
  g.displacements = h.displacements.transpose();
  g.link_forces = link_force_history(model, g.displacements, cfg.dt);
  g.story_forces = element_force_history(model, g.displacements, g.link_forces);
  g.wall_time_s = h.wall_time_s;
  return g;
}

template <typename Scalar>
SnapshotSet<Scalar> to_snapshot(const GroundTruth<Scalar>& g, const ParameterPoint<Scalar>& p) {
  return {p, g.displacements, g.link_forces};
}

/// Simulate the reduced system and compare against the HFM. Link and story
/// forces of the ROM are recovered on the full mesh from V ur(t), outside
/// the timed region.
template <typename Scalar>
ComparisonReport compare_rom(const StructuralModel<Scalar>& model, const LoadHistory<Scalar>& loads,
                             const IntegratorConfig<Scalar>& cfg, const GroundTruth<Scalar>& truth,
                             ReducedSystem<Scalar>& rom, bool literal_metric = false) {
  const auto h = integrate_reduced(rom, loads, cfg);
  const Mat<Scalar> U = reconstruct(rom.basis(), h);
  const Mat<Scalar> lf = link_force_history(model, U, cfg.dt);
  const Mat<Scalar> sf = element_force_history(model, U, lf);
  ComparisonReport c;
  c.order = rom.order();
  c.re_u = relative_error(truth.displacements, U, literal_metric);
  c.re_rf = relative_error(truth.link_forces, lf, literal_metric);
  const Index last = sf.cols() - 1;
  c.re_sigma = relative_error(truth.story_forces.col(last), sf.col(last), literal_metric);
  c.mesh_elements = rom.links().size();
  c.total_elements = static_cast<Index>(model.links.size());
  c.hfm_wall_s = truth.wall_time_s;
  c.rom_wall_s = h.wall_time_s;
  c.speedup = (truth.wall_time_s > 0 && h.wall_time_s > 0) ? truth.wall_time_s / h.wall_time_s : 0;
  return c;
}

struct OrderSweepRow {
  Index order = 0;
  double re_u = 0;
  double re_sigma = 0;
};

struct OrderChoice {
  Index order = 0;
  bool satisfied = false;  ///< false: `order` is the best achievable
  std::vector<OrderSweepRow> sweep;
};

/// Smallest r for which the ROM on local_basis(s, r) meets both thresholds
/// against `truth` on `loads`. A threshold of 1 accepts any basis. The sweep
/// stops at the first passing order or at the numerical rank of s.
template <typename Scalar>
OrderChoice choose_order(const StructuralModel<Scalar>& model, const SnapshotSet<Scalar>& s,
                         const LoadHistory<Scalar>& loads, const IntegratorConfig<Scalar>& cfg,
                         const GroundTruth<Scalar>& truth, double err_threshold_u, double err_threshold_sigma,
                         Index max_order = 0) {
  if (!(err_threshold_u > 0 && err_threshold_u <= 1) || !(err_threshold_sigma > 0 && err_threshold_sigma <= 1)) {
    throw ConfigError("order selection thresholds must lie in (0, 1]");
  }
  const auto svd = thin_svd(s.displacements);
  Index rank = numerical_rank(svd.sigma, s.displacements.rows(), s.displacements.cols());
  if (max_order > 0) rank = std::min(rank, max_order);
  require(rank >= 1, "snapshot matrix has rank zero");

  const auto passes = [](double re, double thr) { return thr >= 1 || re <= thr; };
  OrderChoice out;
  double best = std::numeric_limits<double>::infinity();
  for (Index r = 1; r <= rank; ++r) {
    ReducedSystem<Scalar> rom(model, local_basis(s, r));
    OrderSweepRow row{r, 0, 0};
    try {
      const auto c = compare_rom(model, loads, cfg, truth, rom);
      row.re_u = c.re_u;
      row.re_sigma = c.re_sigma;
    } catch (const NumericError&) {
      row.re_u = row.re_sigma = std::numeric_limits<double>::infinity();
    }
    out.sweep.push_back(row);
    if (passes(row.re_u, err_threshold_u) && passes(row.re_sigma, err_threshold_sigma)) {
      out.order = r;
      out.satisfied = true;
      return out;
    }
    const double score = std::max(row.re_u / err_threshold_u, row.re_sigma / err_threshold_sigma);
    if (score < best) {
      best = score;
      out.order = r;
    }
  }
  return out;
}

}  // namespace prom
