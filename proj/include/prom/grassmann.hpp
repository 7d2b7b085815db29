#pragma once

// Logarithm and exponential maps on the Grassmann manifold of r-dimensional
// subspaces of R^n, using orthonormal n x r representatives.

#include "prom/pod.hpp"
#include "prom/types.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <string>

namespace prom {

template <typename Scalar = double>
struct TangentVector {
  Mat<Scalar> matrix;  ///< n x r, horizontal at the reference: V0^T Gamma = 0
  std::string reference_id;
};

inline constexpr double kMaxLogCondition = 1e8;

/// Gamma = P atan(S) Q^T with P S Q^T the thin SVD of (Vi - V0 V0^T Vi)(V0^T Vi)^{-1}.
template <typename Scalar>
TangentVector<Scalar> log_map(const ReductionBasis<Scalar>& v0, const ReductionBasis<Scalar>& vi) {
  require(v0.dofs() == vi.dofs() && v0.order() == vi.order(),
          "log_map needs bases of equal shape");
  const Mat<Scalar>& V0 = v0.matrix;
  const Mat<Scalar>& Vi = vi.matrix;
  const Mat<Scalar> M = V0.transpose() * Vi;
  Eigen::JacobiSVD<Mat<Scalar>> msvd(M);
  const auto& s = msvd.singularValues();
  const Scalar smin = s(s.size() - 1);
  if (!(smin > 0) || s(0) / smin > Scalar(kMaxLogCondition)) {
    throw NumericError("log_map: V0^T Vi is ill-conditioned (condition " +
                       std::to_string(smin > 0 ? double(s(0) / smin) : INFINITY) + ") between reference '" +
                       v0.source + "' and '" + vi.source +
                       "'; the subspaces are too far apart, repartition the domain");
  }
  const Mat<Scalar> H = Vi - V0 * M;
  // L = H M^{-1}  <=>  M^T L^T = H^T
  const Mat<Scalar> L = M.transpose().partialPivLu().solve(H.transpose()).transpose();
  Eigen::JacobiSVD<Mat<Scalar>> lsvd(L, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec<Scalar> theta = lsvd.singularValues().array().atan().matrix();
  TangentVector<Scalar> g;
  g.matrix = lsvd.matrixU() * theta.asDiagonal() * lsvd.matrixV().transpose();
  g.reference_id = v0.source;
  return g;
}

/// Re-orthonormalize by thin QR, keeping the column orientation of the input.
template <typename Scalar>
Mat<Scalar> orthonormalize(const Mat<Scalar>& X) {
  Eigen::HouseholderQR<Mat<Scalar>> qr(X);
  Mat<Scalar> Q = qr.householderQ() * Mat<Scalar>::Identity(X.rows(), X.cols());
  const Mat<Scalar> R = qr.matrixQR().topRows(X.cols()).template triangularView<Eigen::Upper>();
  for (Index j = 0; j < X.cols(); ++j) {
    if (R(j, j) < 0) Q.col(j) *= -1;
  }
  return Q;
}

/// V = V0 Q cos(S) Q^T + P sin(S) Q^T with P S Q^T the thin SVD of Gamma.
template <typename Scalar>
ReductionBasis<Scalar> exp_map(const ReductionBasis<Scalar>& v0, const Mat<Scalar>& gamma) {
  require(gamma.rows() == v0.dofs() && gamma.cols() == v0.order(),
          "exp_map: tangent vector shape differs from the reference basis");
  Eigen::JacobiSVD<Mat<Scalar>> svd(gamma, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec<Scalar> s = svd.singularValues();
  const Mat<Scalar>& Q = svd.matrixV();
  const Mat<Scalar> V = v0.matrix * Q * s.array().cos().matrix().asDiagonal() * Q.transpose() +
                        svd.matrixU() * s.array().sin().matrix().asDiagonal() * Q.transpose();
  ReductionBasis<Scalar> out;
  out.matrix = orthonormalize(V);
  out.provenance = Provenance::Interpolated;
  out.source = v0.source;
  return out;
}

template <typename Scalar>
ReductionBasis<Scalar> exp_map(const ReductionBasis<Scalar>& v0, const TangentVector<Scalar>& g) {
  return exp_map(v0, g.matrix);
}

/// Largest principal angle between span(A) and span(B), both orthonormal.
/// Uses the sine form ||(I - A A^T) B||_2 which stays accurate for small angles.
template <typename Scalar>
Scalar largest_principal_angle(const Mat<Scalar>& A, const Mat<Scalar>& B) {
  const Mat<Scalar> R = B - A * (A.transpose() * B);
  Eigen::JacobiSVD<Mat<Scalar>> svd(R);
  const Scalar s = svd.singularValues().size() ? svd.singularValues()(0) : Scalar(0);
  return std::asin(std::min(Scalar(1), s));
}

}  // namespace prom
