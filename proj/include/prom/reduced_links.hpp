#pragma once

#include "prom/structural_model.hpp"
#include "prom/types.hpp"

#include <cstdint>
#include <vector>

namespace prom {

/// Projected Bouc-Wen link forces over a weighted subset of elements:
///   g_r = sum_e w_e (B_e V)^T k_e A_e z_e
/// With all elements and unit weights this is the exact Galerkin projection of
/// the nonlinear part of the restoring force.
template <typename Scalar = double>
class ReducedLinkOperator {
 public:
  ReducedLinkOperator() = default;

  ReducedLinkOperator(const StructuralModel<Scalar>& model, const Mat<Scalar>& V, std::vector<Index> ids,
                      Vec<Scalar> weights)
      : ids_(std::move(ids)), weights_(std::move(weights)), substeps_(model.link_substeps) {
    require(V.rows() == model.n, "basis row count differs from the model size");
    require(static_cast<Index>(ids_.size()) == weights_.size(), "one weight per element required");
    BV_.resize(static_cast<Index>(ids_.size()), V.cols());
    for (std::size_t k = 0; k < ids_.size(); ++k) {
      require(ids_[k] >= 0 && ids_[k] < static_cast<Index>(model.links.size()), "element id out of range");
      const auto& l = model.links[static_cast<std::size_t>(ids_[k])];
      links_.push_back(l);
      BV_.row(static_cast<Index>(k)) = V.row(l.dof_j);
      if (l.dof_i != kGround) BV_.row(static_cast<Index>(k)) -= V.row(l.dof_i);
    }
  }

  static ReducedLinkOperator full(const StructuralModel<Scalar>& model, const Mat<Scalar>& V) {
    const Index ne = static_cast<Index>(model.links.size());
    std::vector<Index> ids(static_cast<std::size_t>(ne));
    for (Index e = 0; e < ne; ++e) ids[static_cast<std::size_t>(e)] = e;
    return ReducedLinkOperator(model, V, std::move(ids), Vec<Scalar>::Ones(ne));
  }

  Index size() const { return static_cast<Index>(ids_.size()); }
  Index order() const { return BV_.cols(); }
  const std::vector<Index>& ids() const { return ids_; }
  const Vec<Scalar>& weights() const { return weights_; }
  const Mat<Scalar>& projected_gradients() const { return BV_; }

  struct Trial {
    Vec<Scalar> force;  ///< reduced (length r)
    Vec<Scalar> z;      ///< per evaluated element
    Vec<Scalar> kt;     ///< per evaluated element, d(link force)/dx
  };

  /// Advance the evaluated links from z_committed along the secant rate
  /// between u_prev and u (reduced coordinates).
  Trial trial(const Vec<Scalar>& z_committed, const Vec<Scalar>& u_prev, const Vec<Scalar>& u,
              Scalar dt) const {
    const Index ne = size();
    Trial t{Vec<Scalar>::Zero(order()), Vec<Scalar>(ne), Vec<Scalar>(ne)};
    const Vec<Scalar> x_prev = BV_ * u_prev;
    const Vec<Scalar> x = BV_ * u;
    for (Index k = 0; k < ne; ++k) {
      const auto& l = links_[static_cast<std::size_t>(k)];
      const auto up = advance_link(l, z_committed(k), (x(k) - x_prev(k)) / dt, dt, substeps_);
      t.z(k) = up.z;
      t.kt(k) = l.k_link * l.A * up.dz_dxdot / dt;
      t.force += (weights_(k) * l.force(up.z)) * BV_.row(k).transpose();
    }
    evaluations_ += static_cast<std::uint64_t>(ne);
    return t;
  }

  /// sum_e w_e kt_e (B_e V)^T (B_e V)
  Mat<Scalar> tangent(const Vec<Scalar>& kt) const {
    return BV_.transpose() * (weights_.cwiseProduct(kt)).asDiagonal() * BV_;
  }

  std::uint64_t element_evaluations() const { return evaluations_; }

 private:
  std::vector<Index> ids_;
  Vec<Scalar> weights_;
  std::vector<BoucWenLink<Scalar>> links_;
  Mat<Scalar> BV_;
  int substeps_ = 1;
  mutable std::uint64_t evaluations_ = 0;
};

}  // namespace prom
