#pragma once

// Snapshot POD: local bases from one displacement history, compressed bases
// from column-stacked inputs.

#include "prom/param_space.hpp"
#include "prom/types.hpp"

#include <Eigen/SVD>

#include <limits>
#include <string>
#include <vector>

namespace prom {

template <typename Scalar = double>
struct SnapshotSet {
  ParameterPoint<Scalar> parameter_point;
  Mat<Scalar> displacements;  ///< n x steps
  Mat<Scalar> link_forces;    ///< links x steps; empty when not recorded

  Index dofs() const { return displacements.rows(); }
  Index steps() const { return displacements.cols(); }
};

enum class Provenance { LocalSnapshot, GlobalRegion, GlobalDomain, Interpolated };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::LocalSnapshot: return "local_snapshot";
    case Provenance::GlobalRegion: return "global_region";
    case Provenance::GlobalDomain: return "global_domain";
    case Provenance::Interpolated: return "interpolated";
  }
  return "unknown";
}

inline Provenance provenance_from_string(const std::string& s) {
  if (s == "local_snapshot") return Provenance::LocalSnapshot;
  if (s == "global_region") return Provenance::GlobalRegion;
  if (s == "global_domain") return Provenance::GlobalDomain;
  if (s == "interpolated") return Provenance::Interpolated;
  throw ConfigError("unknown basis provenance '" + s + "'");
}

template <typename Scalar = double>
struct ReductionBasis {
  Mat<Scalar> matrix;  ///< n x r, orthonormal columns
  Vec<Scalar> singular_values;
  Provenance provenance = Provenance::LocalSnapshot;
  std::string source;  ///< parameter point or subdomain id

  Index dofs() const { return matrix.rows(); }
  Index order() const { return matrix.cols(); }
};

/// Flip each column so that its largest-magnitude entry is positive.
template <typename Derived>
void fix_signs(Eigen::MatrixBase<Derived>& V) {
  for (Index j = 0; j < V.cols(); ++j) {
    Index imax = 0;
    V.col(j).cwiseAbs().maxCoeff(&imax);
    if (V(imax, j) < 0) V.col(j) *= -1;
  }
}

template <typename Scalar>
Index numerical_rank(const Vec<Scalar>& sv, Index rows, Index cols) {
  if (sv.size() == 0 || sv(0) <= 0) return 0;
  const Scalar tol = sv(0) * Scalar(std::max(rows, cols)) * std::numeric_limits<Scalar>::epsilon();
  Index r = 0;
  while (r < sv.size() && sv(r) > tol) ++r;
  return r;
}

template <typename Scalar>
struct ThinSvd {
  Mat<Scalar> U;
  Vec<Scalar> sigma;
};

template <typename Scalar>
ThinSvd<Scalar> thin_svd(const Mat<Scalar>& X) {
  Eigen::BDCSVD<Mat<Scalar>> svd(X, Eigen::ComputeThinU);
  return {svd.matrixU(), svd.singularValues()};
}

/// Leading r left singular vectors of an arbitrary matrix, sign-fixed.
template <typename Scalar>
ReductionBasis<Scalar> pod_basis(const Mat<Scalar>& X, Index r, Provenance provenance,
                                 std::string source = {}, bool check_rank = true) {
  require(r >= 1, "reduction order must be >= 1");
  require(r <= std::min(X.rows(), X.cols()),
          "reduction order " + std::to_string(r) + " exceeds min(rows, cols) of the snapshot matrix");
  auto svd = thin_svd(X);
  if (check_rank) {
    const Index rank = numerical_rank(svd.sigma, X.rows(), X.cols());
    if (r > rank) {
      throw NumericError("requested order " + std::to_string(r) + " exceeds the numerical rank " +
                         std::to_string(rank) + " of the snapshot matrix");
    }
  }
  ReductionBasis<Scalar> b;
  b.matrix = svd.U.leftCols(r);
  fix_signs(b.matrix);
  b.singular_values = svd.sigma.head(r);
  b.provenance = provenance;
  b.source = std::move(source);
  return b;
}

template <typename Scalar>
ReductionBasis<Scalar> local_basis(const SnapshotSet<Scalar>& s, Index r) {
  return pod_basis(s.displacements, r, Provenance::LocalSnapshot, s.parameter_point.str());
}

/// SVD of the column-concatenated inputs truncated to r_global. Inputs may be
/// rank deficient (the reference point maps to the zero tangent), so no rank
/// check is applied.
template <typename Scalar>
ReductionBasis<Scalar> stack_and_compress(const std::vector<Mat<Scalar>>& bases, Index r_global,
                                          std::string source = {}) {
  require(!bases.empty(), "stack_and_compress needs at least one basis");
  const Index n = bases.front().rows();
  Index total = 0;
  for (const auto& b : bases) {
    require(b.rows() == n, "stacked bases must share the row dimension");
    total += b.cols();
  }
  require(r_global >= 1 && r_global <= total, "r_global must lie in [1, total stacked columns]");
  Mat<Scalar> X(n, total);
  Index c = 0;
  for (const auto& b : bases) {
    X.middleCols(c, b.cols()) = b;
    c += b.cols();
  }
  return pod_basis(X, std::min(r_global, n), Provenance::GlobalRegion, std::move(source), false);
}

/// Smallest order whose discarded singular-value energy is below 1 - fraction.
template <typename Scalar>
Index order_for_energy(const Vec<Scalar>& sv, Scalar fraction) {
  require(fraction > 0 && fraction <= 1, "energy fraction must lie in (0, 1]");
  const Scalar total = sv.squaredNorm();
  Scalar acc = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    acc += sv(i) * sv(i);
    if (acc >= fraction * total) return i + 1;
  }
  return sv.size();
}

template <typename Scalar>
Scalar reconstruction_error(const Mat<Scalar>& X, const Mat<Scalar>& V) {
  return (X - V * (V.transpose() * X)).norm() / X.norm();
}

template <typename Scalar>
Scalar orthonormality_defect(const Mat<Scalar>& V) {
  return (V.transpose() * V - Mat<Scalar>::Identity(V.cols(), V.cols())).cwiseAbs().maxCoeff();
}

/// Column-stack several snapshot matrices.
template <typename Scalar>
Mat<Scalar> stack_snapshots(const std::vector<const SnapshotSet<Scalar>*>& sets) {
  require(!sets.empty(), "need at least one snapshot set");
  Index cols = 0;
  for (auto* s : sets) cols += s->steps();
  Mat<Scalar> X(sets.front()->dofs(), cols);
  Index c = 0;
  for (auto* s : sets) {
    require(s->dofs() == X.rows(), "snapshot sets must share the dof count");
    X.middleCols(c, s->steps()) = s->displacements;
    c += s->steps();
  }
  return X;
}

}  // namespace prom
