#include "phaseforge/metrics.hpp"

#include <cmath>

#include "phaseforge/errors.hpp"

namespace phaseforge {

namespace {

template <Scalar S>
S unit_phase(const S& z) {
  const double mag = std::abs(z);
  return mag == 0.0 ? S(1.0) : z / mag;
}

}  // namespace

template <Scalar S>
double phase_invariant_dist(const Vector<S>& xhat, const Vector<S>& x) {
  if (xhat.size() != x.size()) throw InvalidArgument("phase_invariant_dist: length mismatch");
  // The optimal rotation is the phase of <x, xhat>; applying it directly avoids
  // the cancellation in sqrt(|x|^2 + |xhat|^2 - 2|<xhat, x>|).
  const S rotation = unit_phase<S>(x.dot(xhat));
  return (xhat - rotation * x).norm();
}

template <Scalar S>
double relative_phase_error(const Vector<S>& xhat, const Vector<S>& x) {
  const double scale = x.norm();
  if (scale == 0.0) throw InvalidArgument("relative_phase_error: true signal is zero");
  return phase_invariant_dist(xhat, x) / scale;
}

template <Scalar S>
double matrix_phase_error(const Matrix<S>& Xhat, const Matrix<S>& X) {
  if (Xhat.rows() != X.rows() || Xhat.cols() != X.cols()) throw InvalidArgument("matrix_phase_error: shape mismatch");
  const double total = X.squaredNorm();
  if (total == 0.0) throw InvalidArgument("matrix_phase_error: true matrix is zero");
  double acc = 0.0;
  for (Index k = 0; k < X.cols(); ++k) {
    const double d = phase_invariant_dist<S>(Xhat.col(k), X.col(k));
    acc += d * d;
  }
  return std::sqrt(acc / total);
}

template <Scalar S>
double orthonormality_defect(const Matrix<S>& U) {
  const Matrix<S> gram = U.adjoint() * U;
  return (gram - Matrix<S>::Identity(U.cols(), U.cols())).cwiseAbs().maxCoeff();
}

template <Scalar S>
double subspace_distance(const Matrix<S>& Uhat, const Matrix<S>& U) {
  if (Uhat.rows() != U.rows()) throw InvalidArgument("subspace_distance: row mismatch");
  if (Uhat.cols() < 1 || U.cols() < 1) throw InvalidArgument("subspace_distance: empty basis");
  if (orthonormality_defect(Uhat) > 1e-8 || orthonormality_defect(U) > 1e-8) {
    throw InvalidArgument("subspace_distance: columns are not orthonormal");
  }
  const Matrix<S> residual = U - Uhat * (Uhat.adjoint() * U);
  Eigen::JacobiSVD<Matrix<S>> svd(residual);
  return svd.singularValues()(0);
}

#define PHASEFORGE_INSTANTIATE(S)                                                          \
  template double phase_invariant_dist<S>(const Vector<S>&, const Vector<S>&);             \
  template double relative_phase_error<S>(const Vector<S>&, const Vector<S>&);             \
  template double matrix_phase_error<S>(const Matrix<S>&, const Matrix<S>&);               \
  template double subspace_distance<S>(const Matrix<S>&, const Matrix<S>&);                \
  template double orthonormality_defect<S>(const Matrix<S>&);

PHASEFORGE_INSTANTIATE(double)
PHASEFORGE_INSTANTIATE(Complex)

}  // namespace phaseforge
