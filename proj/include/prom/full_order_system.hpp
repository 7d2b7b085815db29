#pragma once

#include "prom/excitation.hpp"
#include "prom/newmark.hpp"
#include "prom/structural_model.hpp"

#include <Eigen/SparseCholesky>

namespace prom {

/// Adapts a StructuralModel to the integrator interface. Owns a copy of the
/// model so that link states belong to exactly one run.
template <typename Scalar_ = double>
class FullOrderSystem {
 public:
  using Scalar = Scalar_;
  using V = Vec<Scalar>;

  explicit FullOrderSystem(StructuralModel<Scalar> model)
      : model_(std::move(model)), u_committed_(V::Zero(model_.n)) {
    mass_diag_ = model_.mass_diagonal();
    diagonal_mass_ = Mat<Scalar>(model_.mass).isDiagonal();
  }

  Index size() const { return model_.n; }
  const StructuralModel<Scalar>& model() const { return model_; }

  V load(const LoadHistory<Scalar>& loads, Index step) const {
    require(loads.dofs() == model_.n, "load history width differs from the model size");
    return loads.samples.row(step).transpose();
  }

  V mass_times(const V& x) const { return model_.mass * x; }
  V damping_times(const V& x) const { return model_.damping * x; }

  V mass_solve(const V& rhs) const {
    if (diagonal_mass_) return rhs.cwiseQuotient(mass_diag_);
    Eigen::SimplicialLDLT<SparseMat<Scalar>> ldlt(model_.mass);
    return ldlt.solve(rhs);
  }

  V internal_force(const V& u, Scalar dt) {
    trial_ = trial_restoring_force(model_, u_committed_, u, dt);
    return trial_.force;
  }

  void factor(Scalar c_mass, Scalar c_damp) {
    SparseMat<Scalar> S = link_tangent(model_, trial_.kt);
    S += c_mass * model_.mass + c_damp * model_.damping;
    if (!analyzed_) {
      solver_.analyzePattern(S);
      analyzed_ = true;
    }
    solver_.factorize(S);
    if (solver_.info() != Eigen::Success) throw NumericError("effective stiffness factorization failed");
  }

  V solve(const V& rhs) const { return solver_.solve(rhs); }

  void commit(const V& u) {
    model_.link_z = trial_.z;
    u_committed_ = u;
  }

 private:
  StructuralModel<Scalar> model_;
  V u_committed_;
  V mass_diag_;
  bool diagonal_mass_ = false;
  TrialForce<Scalar> trial_;
  Eigen::SimplicialLDLT<SparseMat<Scalar>> solver_;
  bool analyzed_ = false;
};

/// Full-order simulation of `model` from its committed state.
template <typename Scalar>
ResponseHistory<Scalar> integrate_full(const StructuralModel<Scalar>& model, const LoadHistory<Scalar>& loads,
                                       const IntegratorConfig<Scalar>& cfg) {
  FullOrderSystem<Scalar> sys(model);
  return integrate(sys, loads, cfg);
}

}  // namespace prom
