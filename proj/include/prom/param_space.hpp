#pragma once

// Parameter domain, rectangular partitioning and inverse-distance weights.
//
// All distances are measured after mapping each axis affinely onto [0, 1];
// axes typically carry incommensurate units (stiffness factor vs. length,
// frequency vs. amplitude).

#include "prom/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace prom {

template <typename Scalar = double>
struct ParameterPoint {
  Vec<Scalar> coords;

  ParameterPoint() = default;
  explicit ParameterPoint(Vec<Scalar> c) : coords(std::move(c)) {}
  ParameterPoint(std::initializer_list<Scalar> c) : coords(static_cast<Index>(c.size())) {
    Index i = 0;
    for (Scalar v : c) coords(i++) = v;
  }

  Index dim() const { return coords.size(); }
  Scalar operator[](Index i) const { return coords(i); }

  std::string str() const {
    std::ostringstream os;
    os.precision(12);
    os << '[';
    for (Index i = 0; i < dim(); ++i) os << (i ? "," : "") << coords(i);
    os << ']';
    return os.str();
  }
};

template <typename Scalar = double>
struct Axis {
  std::string label;
  Scalar lower{};
  Scalar upper{};

  Scalar width() const { return upper - lower; }
};

/// Axis-aligned parameter box; doubles as the normalizer for distances.
template <typename Scalar = double>
struct Box {
  std::vector<Axis<Scalar>> axes;

  Index dim() const { return static_cast<Index>(axes.size()); }

  void validate() const {
    require(!axes.empty(), "parameter box needs at least one axis");
    for (const auto& a : axes) {
      require(std::isfinite(a.lower) && std::isfinite(a.upper),
              "axis '" + a.label + "' has non-finite bounds");
      require(a.upper > a.lower, "axis '" + a.label + "' is degenerate (zero or negative width)");
    }
  }

  Vec<Scalar> normalize(const ParameterPoint<Scalar>& p) const {
    require(p.dim() == dim(), "parameter point dimension mismatch");
    Vec<Scalar> out(dim());
    for (Index i = 0; i < dim(); ++i) out(i) = (p[i] - axes[i].lower) / axes[i].width();
    return out;
  }

  ParameterPoint<Scalar> denormalize(const Vec<Scalar>& s) const {
    Vec<Scalar> out(dim());
    for (Index i = 0; i < dim(); ++i) out(i) = axes[i].lower + s(i) * axes[i].width();
    return ParameterPoint<Scalar>(out);
  }

  bool contains(const ParameterPoint<Scalar>& p, Scalar tol = Scalar(1e-12)) const {
    if (p.dim() != dim()) return false;
    const Vec<Scalar> s = normalize(p);
    for (Index i = 0; i < dim(); ++i) {
      if (!std::isfinite(s(i)) || s(i) < -tol || s(i) > 1 + tol) return false;
    }
    return true;
  }
};

template <typename Scalar = double>
struct Subdomain {
  Index id = 0;
  ParameterPoint<Scalar> lower;
  ParameterPoint<Scalar> upper;
  /// 2^l corners (bit k of the corner index selects the upper bound on axis k)
  /// followed by the centroid.
  std::vector<ParameterPoint<Scalar>> training_points;
  Index reference_index = 0;
  /// Set for subdomains added to cover the remainder of an axis.
  bool overlapping = false;

  const ParameterPoint<Scalar>& reference() const { return training_points[reference_index]; }

  bool contains(const Box<Scalar>& domain, const ParameterPoint<Scalar>& q,
                Scalar tol = Scalar(1e-12)) const {
    const Vec<Scalar> s = domain.normalize(q);
    const Vec<Scalar> lo = domain.normalize(lower);
    const Vec<Scalar> hi = domain.normalize(upper);
    for (Index i = 0; i < s.size(); ++i) {
      if (s(i) < lo(i) - tol || s(i) > hi(i) + tol) return false;
    }
    return true;
  }
};

enum class Overlap {
  None,       ///< tiles only; an axis remainder is left uncovered
  Remainder,  ///< add tiles anchored at the upper bound to cover any remainder
};

template <typename Scalar = double>
struct ParameterGrid {
  Box<Scalar> domain;
  std::vector<Subdomain<Scalar>> subdomains;
  bool overlap_allowed = false;

  Index base_count() const {
    return std::count_if(subdomains.begin(), subdomains.end(),
                         [](const auto& s) { return !s.overlapping; });
  }
  Index overlapping_count() const { return static_cast<Index>(subdomains.size()) - base_count(); }
};

namespace detail {

template <typename Scalar>
Subdomain<Scalar> make_subdomain(Index id, const Vec<Scalar>& lo, const Vec<Scalar>& hi,
                                 bool overlapping) {
  const Index l = lo.size();
  Subdomain<Scalar> s;
  s.id = id;
  s.lower = ParameterPoint<Scalar>(lo);
  s.upper = ParameterPoint<Scalar>(hi);
  s.overlapping = overlapping;
  const Index corners = Index(1) << l;
  for (Index c = 0; c < corners; ++c) {
    Vec<Scalar> p(l);
    for (Index k = 0; k < l; ++k) p(k) = ((c >> k) & 1) ? hi(k) : lo(k);
    s.training_points.emplace_back(p);
  }
  s.training_points.emplace_back(Vec<Scalar>((lo + hi) / Scalar(2)));
  s.reference_index = corners;
  return s;
}

// Tile start offsets along one axis, split into the regular lattice and the
// end-anchored remainder tile (if any).
template <typename Scalar>
void axis_tiles(const Axis<Scalar>& axis, Scalar extent, Overlap overlap,
                std::vector<Scalar>& base, std::vector<Scalar>& extra) {
  const Scalar tol = Scalar(1e-9) * axis.width();
  if (extent >= axis.width() - tol) {
    base.push_back(axis.lower);
    return;
  }
  Scalar start = axis.lower;
  for (Index k = 1; start + extent <= axis.upper + tol; ++k) {
    base.push_back(start);
    start = axis.lower + Scalar(k) * extent;
  }
  const Scalar covered = base.back() + extent;
  if (covered < axis.upper - tol && overlap == Overlap::Remainder) {
    extra.push_back(axis.upper - extent);
  }
}

}  // namespace detail

/// Partition by per-axis tile extents (physical units). Regular tiles first,
/// then remainder tiles: every combination of start offsets that uses at
/// least one end-anchored offset.
template <typename Scalar>
ParameterGrid<Scalar> partition_grid_extents(const Box<Scalar>& domain,
                                             const std::vector<Scalar>& extents,
                                             Overlap overlap) {
  domain.validate();
  const Index l = domain.dim();
  require(static_cast<Index>(extents.size()) == l, "one extent per axis required");
  for (Index k = 0; k < l; ++k) {
    require(std::isfinite(extents[k]) && extents[k] > 0,
            "subdomain extent on axis '" + domain.axes[k].label + "' must be positive");
  }

  std::vector<std::vector<Scalar>> starts(l);
  std::vector<Index> n_base(l);
  for (Index k = 0; k < l; ++k) {
    std::vector<Scalar> base, extra;
    detail::axis_tiles(domain.axes[k], extents[k], overlap, base, extra);
    n_base[k] = static_cast<Index>(base.size());
    starts[k] = base;
    starts[k].insert(starts[k].end(), extra.begin(), extra.end());
  }

  ParameterGrid<Scalar> grid;
  grid.domain = domain;
  grid.overlap_allowed = overlap != Overlap::None;

  // Odometer over all start combinations, last axis fastest.
  std::vector<std::vector<Index>> base_combos, extra_combos;
  std::vector<Index> idx(l, 0);
  while (true) {
    bool is_base = true;
    for (Index k = 0; k < l; ++k) is_base = is_base && idx[k] < n_base[k];
    (is_base ? base_combos : extra_combos).push_back(idx);
    Index k = l - 1;
    while (k >= 0 && ++idx[k] == static_cast<Index>(starts[k].size())) idx[k--] = 0;
    if (k < 0) break;
  }

  auto emit = [&](const std::vector<Index>& combo, bool overlapping) {
    Vec<Scalar> lo(l), hi(l);
    for (Index k = 0; k < l; ++k) {
      lo(k) = starts[k][combo[k]];
      hi(k) = std::min(lo(k) + extents[k], domain.axes[k].upper);
    }
    grid.subdomains.push_back(detail::make_subdomain<Scalar>(
        static_cast<Index>(grid.subdomains.size()), lo, hi, overlapping));
  };
  for (const auto& c : base_combos) emit(c, false);
  for (const auto& c : extra_combos) emit(c, true);
  return grid;
}

/// Partition into equal divisions per axis.
template <typename Scalar>
ParameterGrid<Scalar> partition_grid(const Box<Scalar>& domain, const std::vector<Index>& divisions,
                                     Overlap overlap = Overlap::None) {
  domain.validate();
  require(static_cast<Index>(divisions.size()) == domain.dim(), "one division count per axis required");
  std::vector<Scalar> extents;
  for (Index k = 0; k < domain.dim(); ++k) {
    require(divisions[k] >= 1, "division count must be >= 1");
    extents.push_back(domain.axes[k].width() / Scalar(divisions[k]));
  }
  return partition_grid_extents(domain, extents, overlap);
}

/// Subdomain containing q. Among several, the one whose centroid is nearest in
/// normalized coordinates; exact ties go to the lowest index.
template <typename Scalar>
const Subdomain<Scalar>& locate(const ParameterGrid<Scalar>& grid, const ParameterPoint<Scalar>& q) {
  require(q.dim() == grid.domain.dim(), "query dimension mismatch");
  const Vec<Scalar> s = grid.domain.normalize(q);
  const Subdomain<Scalar>* best = nullptr;
  Scalar best_d = std::numeric_limits<Scalar>::infinity();
  for (const auto& sub : grid.subdomains) {
    if (!sub.contains(grid.domain, q)) continue;
    const Scalar d = (grid.domain.normalize(sub.reference()) - s).norm();
    if (d < best_d) {
      best_d = d;
      best = &sub;
    }
  }
  if (!best) throw DomainError("parameter point " + q.str() + " lies outside every subdomain");
  return *best;
}

/// Shepard weights with power 2 over the subdomain's training points.
template <typename Scalar>
Vec<Scalar> interpolation_weights(const Box<Scalar>& domain, const Subdomain<Scalar>& sub,
                                  const ParameterPoint<Scalar>& q) {
  const Index k = static_cast<Index>(sub.training_points.size());
  const Vec<Scalar> s = domain.normalize(q);
  Vec<Scalar> w(k);
  for (Index i = 0; i < k; ++i) {
    const Scalar d = (domain.normalize(sub.training_points[i]) - s).norm();
    if (d < Scalar(1e-12)) {
      w.setZero();
      w(i) = 1;
      return w;
    }
    w(i) = 1 / (d * d);
  }
  return w / w.sum();
}

}  // namespace prom
