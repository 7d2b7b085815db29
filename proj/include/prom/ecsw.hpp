#pragma once

// Energy-conserving sampling and weighting.
//
// Each training configuration (snapshot time sample) contributes r rows to G:
// G((s, k), e) is the virtual work of element e's link force along reduced
// direction k. b = G 1 is the work of the complete mesh. A sparse
// non-negative xi with ||G xi - b|| <= tau ||b|| defines the hyper mesh.

#include "prom/io.hpp"
#include "prom/pod.hpp"
#include "prom/reduced_links.hpp"
#include "prom/structural_model.hpp"

#include <Eigen/QR>

#include <string>
#include <vector>

namespace prom {

template <typename Scalar = double>
struct EcswTraining {
  Mat<Scalar> G;
  Vec<Scalar> b;
  Scalar tau = Scalar(0.01);
};

template <typename Scalar = double>
struct HyperMesh {
  std::vector<Index> selected;
  Vec<Scalar> weights;  ///< strictly positive, aligned with `selected`
  Scalar tau{};
  Scalar residual{};    ///< achieved ||G xi - b|| / ||b||
  bool feasible = true; ///< residual <= tau
  Index total_elements = 0;
  std::string basis_fingerprint;

  Index size() const { return static_cast<Index>(selected.size()); }
};

template <typename Scalar>
std::string basis_fingerprint(const Mat<Scalar>& V) {
  return io::fingerprint(V.template cast<double>());
}

/// Rows of (B_e V) for every link of the model: links x r.
template <typename Scalar>
Mat<Scalar> link_projection(const StructuralModel<Scalar>& model, const Mat<Scalar>& V) {
  return ReducedLinkOperator<Scalar>::full(model, V).projected_gradients();
}

template <typename Scalar>
EcswTraining<Scalar> assemble_training(const StructuralModel<Scalar>& model,
                                       const std::vector<const SnapshotSet<Scalar>*>& snapshots,
                                       const ReductionBasis<Scalar>& basis, Index stride,
                                       Scalar tau = Scalar(0.01)) {
  require(stride >= 1, "ECSW sample stride must be >= 1");
  require(tau > 0 && tau <= 1, "ECSW tolerance must lie in (0, 1]");
  require(!snapshots.empty(), "ECSW training needs at least one snapshot set");
  require(basis.dofs() == model.n, "basis rows differ from the model size");
  const Index ne = static_cast<Index>(model.links.size());
  const Index r = basis.order();
  const Mat<Scalar> BV = link_projection(model, basis.matrix);

  Index samples = 0;
  for (auto* s : snapshots) {
    if (s->link_forces.rows() != ne || s->link_forces.cols() != s->steps()) {
      throw ConfigError("snapshot at " + s->parameter_point.str() + " is missing element force records");
    }
    samples += (s->steps() + stride - 1) / stride;
  }

  EcswTraining<Scalar> t;
  t.tau = tau;
  t.G.resize(samples * r, ne);
  Index row = 0;
  for (auto* s : snapshots) {
    for (Index step = 0; step < s->steps(); step += stride) {
      // column e of the block: f_e(step) * (B_e V)^T
      t.G.middleRows(row, r) = BV.transpose() * s->link_forces.col(step).asDiagonal();
      row += r;
    }
  }
  t.b = t.G.rowwise().sum();
  return t;
}

/// Greedy active-set NNLS (Lawson-Hanson inner loop) stopped as soon as the
/// residual meets tau ||b||.
template <typename Scalar>
HyperMesh<Scalar> solve_sparse_nnls(const EcswTraining<Scalar>& t, Index max_outer = -1) {
  require(t.tau > 0 && t.tau <= 1, "ECSW tolerance must lie in (0, 1]");
  const Mat<Scalar>& G = t.G;
  const Vec<Scalar>& b = t.b;
  const Index ne = G.cols();
  if (max_outer < 0) max_outer = 3 * ne + 10;

  const Scalar bnorm = b.norm();
  const Scalar target = t.tau * bnorm;
  Vec<Scalar> x = Vec<Scalar>::Zero(ne);
  std::vector<char> passive(static_cast<std::size_t>(ne), 0);
  std::vector<char> rejected(static_cast<std::size_t>(ne), 0);
  Vec<Scalar> res = b;
  Scalar res_norm = bnorm;

  auto passive_list = [&] {
    std::vector<Index> p;
    for (Index e = 0; e < ne; ++e) if (passive[static_cast<std::size_t>(e)]) p.push_back(e);
    return p;
  };
  auto ls_solve = [&](const std::vector<Index>& p) {
    Mat<Scalar> Gp(G.rows(), static_cast<Index>(p.size()));
    for (std::size_t k = 0; k < p.size(); ++k) Gp.col(static_cast<Index>(k)) = G.col(p[k]);
    return Vec<Scalar>(Gp.colPivHouseholderQr().solve(b));
  };

  for (Index outer = 0; outer < max_outer && res_norm > target; ++outer) {
    const Vec<Scalar> grad = G.transpose() * res;
    Index best = -1;
    Scalar best_g = Scalar(0);
    const Scalar gtol = Scalar(1e-13) * (G.cwiseAbs().maxCoeff() * bnorm + Scalar(1e-300));
    for (Index e = 0; e < ne; ++e) {
      const auto ue = static_cast<std::size_t>(e);
      if (passive[ue] || rejected[ue]) continue;
      if (grad(e) > best_g && grad(e) > gtol) {
        best_g = grad(e);
        best = e;
      }
    }
    if (best < 0) break;  // KKT point reached: no descent direction left
    passive[static_cast<std::size_t>(best)] = 1;

    for (int inner = 0; inner < 4 * ne + 10; ++inner) {
      const auto p = passive_list();
      const Vec<Scalar> z = ls_solve(p);
      if ((z.array() > 0).all()) {
        for (std::size_t k = 0; k < p.size(); ++k) x(p[k]) = z(static_cast<Index>(k));
        break;
      }
      // Step toward z until the first passive variable reaches zero, then
      // drop every variable sitting at zero.
      Scalar alpha = 1;
      std::size_t blocking = 0;
      for (std::size_t k = 0; k < p.size(); ++k) {
        const Scalar zk = z(static_cast<Index>(k));
        if (zk <= 0) {
          const Scalar xk = x(p[k]);
          const Scalar a = xk / (xk - zk);
          if (a < alpha) {
            alpha = a;
            blocking = k;
          }
        }
      }
      const Scalar xscale = x.cwiseAbs().maxCoeff();
      for (std::size_t k = 0; k < p.size(); ++k) {
        x(p[k]) += alpha * (z(static_cast<Index>(k)) - x(p[k]));
        if (k == blocking || x(p[k]) <= Scalar(1e-14) * xscale) {
          x(p[k]) = 0;
          passive[static_cast<std::size_t>(p[k])] = 0;
        }
      }
    }
    if (!passive[static_cast<std::size_t>(best)]) rejected[static_cast<std::size_t>(best)] = 1;

    res = b - G * x;
    const Scalar new_norm = res.norm();
    if (new_norm < res_norm) std::fill(rejected.begin(), rejected.end(), 0);
    res_norm = new_norm;
  }

  HyperMesh<Scalar> mesh;
  mesh.tau = t.tau;
  mesh.total_elements = ne;
  for (Index e = 0; e < ne; ++e) {
    if (x(e) > 0) {
      mesh.selected.push_back(e);
    }
  }
  mesh.weights.resize(mesh.size());
  for (Index k = 0; k < mesh.size(); ++k) mesh.weights(k) = x(mesh.selected[static_cast<std::size_t>(k)]);
  mesh.residual = bnorm > 0 ? res_norm / bnorm : Scalar(0);
  mesh.feasible = res_norm <= target;
  return mesh;
}

/// Assemble, solve and stamp the mesh with the training basis fingerprint.
template <typename Scalar>
HyperMesh<Scalar> train_hyper_mesh(const StructuralModel<Scalar>& model,
                                   const std::vector<const SnapshotSet<Scalar>*>& snapshots,
                                   const ReductionBasis<Scalar>& basis, Index stride, Scalar tau) {
  HyperMesh<Scalar> mesh = solve_sparse_nnls(assemble_training(model, snapshots, basis, stride, tau));
  mesh.basis_fingerprint = basis_fingerprint(basis.matrix);
  return mesh;
}

/// Declare that `mesh` is to be used with `basis` (e.g. a subdomain mesh
/// trained on the reference basis and reused for an interpolated one).
template <typename Scalar>
HyperMesh<Scalar> rebind(HyperMesh<Scalar> mesh, const ReductionBasis<Scalar>& basis) {
  mesh.basis_fingerprint = basis_fingerprint(basis.matrix);
  return mesh;
}

template <typename Scalar>
ReducedLinkOperator<Scalar> hyper_operator(const HyperMesh<Scalar>& mesh, const ReductionBasis<Scalar>& basis,
                                           const StructuralModel<Scalar>& model) {
  if (!mesh.basis_fingerprint.empty() && mesh.basis_fingerprint != basis_fingerprint(basis.matrix)) {
    throw ConfigError("hyper mesh was trained for basis " + mesh.basis_fingerprint + ", not " +
                      basis_fingerprint(basis.matrix) + "; rebind it explicitly");
  }
  require(mesh.total_elements == static_cast<Index>(model.links.size()),
          "hyper mesh element count differs from the model");
  return ReducedLinkOperator<Scalar>(model, basis.matrix, mesh.selected, mesh.weights);
}

/// Weighted reduced link force over the selected elements, advancing their
/// states z_selected along the reduced secant from u_prev_r to u_r.
template <typename Scalar>
Vec<Scalar> hyper_force(const HyperMesh<Scalar>& mesh, const ReductionBasis<Scalar>& basis,
                        const StructuralModel<Scalar>& model, const Vec<Scalar>& z_selected,
                        const Vec<Scalar>& u_prev_r, const Vec<Scalar>& u_r, Scalar dt) {
  return hyper_operator(mesh, basis, model).trial(z_selected, u_prev_r, u_r, dt).force;
}

}  // namespace prom
