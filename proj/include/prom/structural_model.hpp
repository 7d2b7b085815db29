#pragma once

// High-fidelity shear-chain model: lumped story masses, linear inter-story
// springs and one Bouc-Wen link in parallel with each spring.

#include "prom/bouc_wen.hpp"
#include "prom/types.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>

#include <vector>

namespace prom {

template <typename Scalar>
using SparseMat = Eigen::SparseMatrix<Scalar>;

/// Two-node element: linear spring plus the Bouc-Wen link at the same index.
template <typename Scalar = double>
struct SpringElement {
  Index dof_i = kGround;
  Index dof_j = 0;
  Scalar k_spring{};
};

template <typename Scalar = double>
struct StructuralModel {
  Index n = 0;
  SparseMat<Scalar> mass;
  SparseMat<Scalar> damping;
  SparseMat<Scalar> linear_stiffness;
  std::vector<SpringElement<Scalar>> elements;
  std::vector<BoucWenLink<Scalar>> links;  ///< links[e] sits on elements[e]
  std::vector<Index> constrained_dofs;     ///< ground is eliminated; empty for chains
  Vec<Scalar> link_z;                      ///< committed hysteretic states
  int link_substeps = 4;

  Index num_elements() const { return static_cast<Index>(elements.size()); }

  Vec<Scalar> mass_diagonal() const { return Vec<Scalar>(mass.diagonal()); }
};

template <typename Scalar = double>
struct LinkParams {
  Scalar k_link{};
  Scalar A{};
  Scalar z_max{};
  Scalar w = 1;
};

template <typename Scalar>
Scalar first_natural_frequency(const SparseMat<Scalar>& K, const SparseMat<Scalar>& M) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat<Scalar>> es(Mat<Scalar>(K), Mat<Scalar>(M),
                                                          Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("generalized eigenproblem failed");
  return std::sqrt(es.eigenvalues()(0));
}

/// Shear chain with `story_mass.size()` stories. Story e joins node e-1 (the
/// ground for e = 0) to node e. Damping is mass proportional, C = a0 M with
/// a0 = 2 zeta omega_1 of the linear skeleton.
template <typename Scalar>
StructuralModel<Scalar> build_shear_frame(const std::vector<Scalar>& story_mass,
                                          const std::vector<Scalar>& story_stiffness,
                                          Scalar damping_ratio,
                                          const std::vector<LinkParams<Scalar>>& link_params,
                                          int link_substeps = 4) {
  const Index n = static_cast<Index>(story_mass.size());
  require(n >= 1, "shear frame needs at least one story");
  require(static_cast<Index>(story_stiffness.size()) == n &&
              static_cast<Index>(link_params.size()) == n,
          "per-story mass, stiffness and link parameter lists must have equal length");
  require(damping_ratio > 0, "damping ratio must be positive");
  require(link_substeps >= 1, "link substeps must be >= 1");

  StructuralModel<Scalar> m;
  m.n = n;
  m.link_substeps = link_substeps;
  std::vector<Eigen::Triplet<Scalar>> mt, kt;
  for (Index e = 0; e < n; ++e) {
    require(story_mass[e] > 0, "story mass must be positive");
    require(story_stiffness[e] > 0, "story stiffness must be positive");
    mt.emplace_back(e, e, story_mass[e]);
    const Index i = e - 1;
    const Index j = e;
    const Scalar k = story_stiffness[e];
    kt.emplace_back(j, j, k);
    if (i != kGround) {
      kt.emplace_back(i, i, k);
      kt.emplace_back(i, j, -k);
      kt.emplace_back(j, i, -k);
    }
    m.elements.push_back({i, j, k});
    const auto& lp = link_params[e];
    m.links.push_back(BoucWenLink<Scalar>::from_envelope(i, j, lp.k_link, lp.A,
                                                         lp.z_max, lp.w));
  }
  m.mass.resize(n, n);
  m.mass.setFromTriplets(mt.begin(), mt.end());
  m.linear_stiffness.resize(n, n);
  m.linear_stiffness.setFromTriplets(kt.begin(), kt.end());
  const Scalar omega1 = first_natural_frequency(m.linear_stiffness, m.mass);
  m.damping = (2 * damping_ratio * omega1) * m.mass;
  m.link_z = Vec<Scalar>::Zero(n);
  return m;
}

/// K u + sum of link forces at the committed link states. Pure.
template <typename Scalar>
Vec<Scalar> restoring_force(const StructuralModel<Scalar>& model, const Vec<Scalar>& u) {
  require(u.size() == model.n, "displacement vector has wrong length");
  Vec<Scalar> f = model.linear_stiffness * u;
  for (std::size_t e = 0; e < model.links.size(); ++e) {
    const auto& l = model.links[e];
    const Scalar fl = l.force(model.link_z(static_cast<Index>(e)));
    f(l.dof_j) += fl;
    if (l.dof_i != kGround) f(l.dof_i) -= fl;
  }
  return f;
}

/// New link states after one step at constant relative rates xdot.
template <typename Scalar>
Vec<Scalar> update_link_states(const StructuralModel<Scalar>& model, const Vec<Scalar>& xdot,
                               Scalar dt) {
  require(dt > 0, "time step must be positive");
  require(xdot.size() == static_cast<Index>(model.links.size()), "one rate per link required");
  Vec<Scalar> z(xdot.size());
  for (Index e = 0; e < xdot.size(); ++e) {
    z(e) = advance_link(model.links[e], model.link_z(e), xdot(e), dt, model.link_substeps).z;
  }
  return z;
}

/// Restoring force at trial displacement u, with link states advanced from
/// the committed ones along the secant rate (x(u) - x(u_prev)) / dt.
template <typename Scalar>
struct TrialForce {
  Vec<Scalar> force;
  Vec<Scalar> z;   ///< trial link states
  Vec<Scalar> kt;  ///< link tangent d(link force)/d(relative displacement)
};

template <typename Scalar>
TrialForce<Scalar> trial_restoring_force(const StructuralModel<Scalar>& model,
                                         const Vec<Scalar>& u_prev, const Vec<Scalar>& u,
                                         Scalar dt) {
  require(u.size() == model.n && u_prev.size() == model.n, "displacement vector has wrong length");
  const Index ne = static_cast<Index>(model.links.size());
  TrialForce<Scalar> t{model.linear_stiffness * u, Vec<Scalar>(ne), Vec<Scalar>(ne)};
  for (Index e = 0; e < ne; ++e) {
    const auto& l = model.links[e];
    const Scalar xdot = (l.relative(u) - l.relative(u_prev)) / dt;
    const auto up = advance_link(l, model.link_z(e), xdot, dt, model.link_substeps);
    t.z(e) = up.z;
    t.kt(e) = l.k_link * l.A * up.dz_dxdot / dt;
    const Scalar fl = l.force(up.z);
    t.force(l.dof_j) += fl;
    if (l.dof_i != kGround) t.force(l.dof_i) -= fl;
  }
  return t;
}

/// Assemble K + sum kt_e B_e^T B_e.
template <typename Scalar>
SparseMat<Scalar> link_tangent(const StructuralModel<Scalar>& model, const Vec<Scalar>& kt) {
  std::vector<Eigen::Triplet<Scalar>> trip;
  for (std::size_t e = 0; e < model.links.size(); ++e) {
    const auto& l = model.links[e];
    const Scalar k = kt(static_cast<Index>(e));
    trip.emplace_back(l.dof_j, l.dof_j, k);
    if (l.dof_i != kGround) {
      trip.emplace_back(l.dof_i, l.dof_i, k);
      trip.emplace_back(l.dof_i, l.dof_j, -k);
      trip.emplace_back(l.dof_j, l.dof_i, -k);
    }
  }
  SparseMat<Scalar> Kl(model.n, model.n);
  Kl.setFromTriplets(trip.begin(), trip.end());
  return model.linear_stiffness + Kl;
}

/// Jacobian of trial_restoring_force with respect to u.
template <typename Scalar>
SparseMat<Scalar> tangent_stiffness(const StructuralModel<Scalar>& model, const Vec<Scalar>& u_prev,
                                    const Vec<Scalar>& u, Scalar dt) {
  return link_tangent(model, trial_restoring_force(model, u_prev, u, dt).kt);
}

/// Replay the link laws along a displacement history (columns = time steps,
/// starting from the model's committed states). Returns link forces,
/// links x steps.
template <typename Scalar>
Mat<Scalar> link_force_history(const StructuralModel<Scalar>& model, const Mat<Scalar>& U,
                               Scalar dt) {
  require(U.rows() == model.n, "history row count must equal the model size");
  const Index ne = static_cast<Index>(model.links.size());
  Mat<Scalar> F(ne, U.cols());
  for (Index e = 0; e < ne; ++e) {
    const auto& l = model.links[e];
    Scalar z = model.link_z(e);
    Scalar x_prev = l.relative(U.col(0));
    F(e, 0) = l.force(z);
    for (Index t = 1; t < U.cols(); ++t) {
      const Scalar x = l.relative(U.col(t));
      z = advance_link(l, z, (x - x_prev) / dt, dt, model.link_substeps).z;
      F(e, t) = l.force(z);
      x_prev = x;
    }
  }
  return F;
}

/// Total element (story shear) forces: spring plus link, elements x steps.
template <typename Scalar>
Mat<Scalar> element_force_history(const StructuralModel<Scalar>& model, const Mat<Scalar>& U,
                                  const Mat<Scalar>& link_forces) {
  Mat<Scalar> S = link_forces.rows() == 0 ? Mat<Scalar>::Zero(model.num_elements(), U.cols()) : link_forces;
  for (Index e = 0; e < model.num_elements(); ++e) {
    const auto& el = model.elements[e];
    for (Index t = 0; t < U.cols(); ++t) {
      const Scalar x = U(el.dof_j, t) - (el.dof_i == kGround ? Scalar(0) : U(el.dof_i, t));
      S(e, t) += el.k_spring * x;
    }
  }
  return S;
}

}  // namespace prom
