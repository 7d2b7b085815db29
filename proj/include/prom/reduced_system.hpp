#pragma once

// Galerkin-projected system  Mr ur'' + Cr ur' + Kr ur + g_r(ur) = V^T f,
// with the link force evaluated on the full mesh or on a hyper mesh.

#include "prom/ecsw.hpp"
#include "prom/excitation.hpp"
#include "prom/newmark.hpp"
#include "prom/pod.hpp"
#include "prom/reduced_links.hpp"
#include "prom/structural_model.hpp"

#include <Eigen/Cholesky>

#include <optional>

namespace prom {

template <typename Scalar_ = double>
class ReducedSystem {
 public:
  using Scalar = Scalar_;
  using V = Vec<Scalar>;

  ReducedSystem(const StructuralModel<Scalar>& model, ReductionBasis<Scalar> basis,
                const HyperMesh<Scalar>* mesh = nullptr)
      : basis_(std::move(basis)) {
    const Mat<Scalar>& Vb = basis_.matrix;
    require(Vb.rows() == model.n, "basis row count differs from the model size");
    Mr_ = Vb.transpose() * (model.mass * Vb);
    Cr_ = Vb.transpose() * (model.damping * Vb);
    Kr_ = Vb.transpose() * (model.linear_stiffness * Vb);
    mass_llt_.compute(Mr_);
    if (mass_llt_.info() != Eigen::Success) throw NumericError("reduced mass is not positive definite");
    links_ = mesh ? hyper_operator(*mesh, basis_, model) : ReducedLinkOperator<Scalar>::full(model, Vb);
    hyper_ = mesh != nullptr;
    z_committed_.resize(links_.size());
    for (Index k = 0; k < links_.size(); ++k) z_committed_(k) = model.link_z(links_.ids()[static_cast<std::size_t>(k)]);
    u_committed_ = V::Zero(order());
  }

  Index size() const { return basis_.order(); }
  Index order() const { return basis_.order(); }
  bool hyper_reduced() const { return hyper_; }
  const ReductionBasis<Scalar>& basis() const { return basis_; }
  const Mat<Scalar>& reduced_mass() const { return Mr_; }
  const Mat<Scalar>& reduced_damping() const { return Cr_; }
  const Mat<Scalar>& reduced_stiffness() const { return Kr_; }
  const ReducedLinkOperator<Scalar>& links() const { return links_; }

  /// Loads are projected once per history and cached.
  V load(const LoadHistory<Scalar>& loads, Index step) const {
    if (projected_source_ != &loads || projected_.rows() != loads.steps()) {
      require(loads.dofs() == basis_.dofs(), "load history width differs from the model size");
      projected_ = loads.samples * basis_.matrix;
      projected_source_ = &loads;
    }
    return projected_.row(step).transpose();
  }

  V mass_times(const V& x) const { return Mr_ * x; }
  V damping_times(const V& x) const { return Cr_ * x; }
  V mass_solve(const V& rhs) const { return mass_llt_.solve(rhs); }

  V internal_force(const V& u, Scalar dt) {
    trial_ = links_.trial(z_committed_, u_committed_, u, dt);
    return Kr_ * u + trial_.force;
  }

  void factor(Scalar c_mass, Scalar c_damp) {
    const Mat<Scalar> S = c_mass * Mr_ + c_damp * Cr_ + Kr_ + links_.tangent(trial_.kt);
    solver_.compute(S);
    if (solver_.info() != Eigen::Success) throw NumericError("reduced effective stiffness factorization failed");
  }

  V solve(const V& rhs) const { return solver_.solve(rhs); }

  void commit(const V& u) {
    z_committed_ = trial_.z;
    u_committed_ = u;
  }

 private:
  ReductionBasis<Scalar> basis_;
  Mat<Scalar> Mr_, Cr_, Kr_;
  Eigen::LLT<Mat<Scalar>> mass_llt_;
  ReducedLinkOperator<Scalar> links_;
  bool hyper_ = false;
  V z_committed_;
  V u_committed_;
  typename ReducedLinkOperator<Scalar>::Trial trial_;
  Eigen::LDLT<Mat<Scalar>> solver_;
  mutable Mat<Scalar> projected_;
  mutable const LoadHistory<Scalar>* projected_source_ = nullptr;
};

/// Reduced simulation; the returned displacements are reduced coordinates.
template <typename Scalar>
ResponseHistory<Scalar> integrate_reduced(ReducedSystem<Scalar>& rom, const LoadHistory<Scalar>& loads,
                                          const IntegratorConfig<Scalar>& cfg) {
  return integrate(rom, loads, cfg);
}

/// n x steps full-space displacement history V ur(t).
template <typename Scalar>
Mat<Scalar> reconstruct(const ReductionBasis<Scalar>& basis, const ResponseHistory<Scalar>& h) {
  return basis.matrix * h.displacements.transpose();
}

}  // namespace prom
