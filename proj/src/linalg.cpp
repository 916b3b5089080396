#include "phaseforge/linalg.hpp"

#include <algorithm>
#include <string>

#include "phaseforge/errors.hpp"
#include "phaseforge/rng.hpp"

namespace phaseforge {

namespace {

constexpr std::uint64_t kStartBlockSeed = 0x5eed0f0e16e11b0cULL;

template <Scalar S>
Matrix<S> start_block(Index n, Index b) {
  const GaussianStream gauss(kStartBlockSeed, Domain::Internal, static_cast<std::uint64_t>(n));
  Matrix<S> M(n, b);
  std::uint64_t k = 0;
  for (Index j = 0; j < b; ++j) {
    for (Index i = 0; i < n; ++i) {
      if constexpr (std::same_as<S, double>) {
        M(i, j) = gauss.at(k++);
      } else {
        const double re = gauss.at(k++);
        M(i, j) = Complex(re, gauss.at(k++));
      }
    }
  }
  return M;
}

// Rotate each column so its largest-magnitude entry is real and positive.
template <Scalar S>
void canonical_phase(Matrix<S>& V) {
  for (Index j = 0; j < V.cols(); ++j) {
    Index arg = 0;
    V.col(j).cwiseAbs().maxCoeff(&arg);
    const double mag = std::abs(V(arg, j));
    if (mag > 0.0) V.col(j) *= conj_of(V(arg, j)) / mag;
  }
}

}  // namespace

template <Scalar S>
Matrix<S> orthonormalize(const Matrix<S>& M, Matrix<S>* R) {
  const Index n = M.rows();
  const Index r = M.cols();
  if (r > n) throw InvalidArgument("orthonormalize: more columns than rows");
  Eigen::HouseholderQR<Matrix<S>> qr(M);
  Matrix<S> Q = qr.householderQ() * Matrix<S>::Identity(n, r);
  Matrix<S> upper = qr.matrixQR().topRows(r).template triangularView<Eigen::Upper>();
  for (Index j = 0; j < r; ++j) {
    const S d = upper(j, j);
    const double mag = std::abs(d);
    if (mag > 0.0) {
      const S phase = d / mag;
      Q.col(j) *= phase;
      upper.row(j) *= conj_of(phase);
    }
  }
  if (R != nullptr) *R = std::move(upper);
  return Q;
}

template <Scalar S>
EigenResult<S> top_eigenvectors(const BlockOperator<S>& op, Index n, Index r, const EigenOptions& opts) {
  if (r < 1 || r > n) throw InvalidArgument("top_eigenvectors: need 1 <= r <= n");
  const Index b = std::min(n, 2 * r + 2);
  Matrix<S> Q = orthonormalize<S>(start_block<S>(n, b));

  EigenResult<S> result;
  Matrix<S> ritz_vectors;
  RealVector ritz_values;
  for (int it = 1; it <= opts.max_iters; ++it) {
    const Matrix<S> Z = op(Q);
    Matrix<S> H = Q.adjoint() * Z;
    H = (0.5 * (H + H.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Matrix<S>> eig(H);
    // Descending order.
    const Matrix<S> W = eig.eigenvectors().rowwise().reverse();
    ritz_values = eig.eigenvalues().reverse();
    ritz_vectors = Q * W;
    const Matrix<S> ZW = Z * W;

    const double scale = std::abs(ritz_values(0));
    double worst = 0.0;
    for (Index j = 0; j < r; ++j) {
      worst = std::max(worst, (ZW.col(j) - ritz_values(j) * ritz_vectors.col(j)).norm());
    }
    result.iterations = it;
    if (worst <= opts.tol * scale || scale == 0.0) {
      result.converged = true;
      break;
    }
    Q = orthonormalize<S>(ZW);
  }

  result.vectors = ritz_vectors.leftCols(r);
  canonical_phase(result.vectors);
  result.values = ritz_values.head(r);
  result.next_value = b > r ? ritz_values(r) : 0.0;
  const double lead = std::abs(result.values(0));
  if (lead == 0.0) throw DegenerateSpectrum("operator is zero");
  if (r < n && result.values(r - 1) - result.next_value < opts.gap_tol * lead) {
    throw DegenerateSpectrum("eigengap after index " + std::to_string(r) + " is below tolerance");
  }
  return result;
}

#define PHASEFORGE_INSTANTIATE(S)                                  \
  template Matrix<S> orthonormalize<S>(const Matrix<S>&, Matrix<S>*); \
  template EigenResult<S> top_eigenvectors<S>(const BlockOperator<S>&, Index, Index, const EigenOptions&);

PHASEFORGE_INSTANTIATE(double)
PHASEFORGE_INSTANTIATE(Complex)

}  // namespace phaseforge
