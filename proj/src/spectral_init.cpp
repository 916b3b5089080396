#include "phaseforge/spectral_init.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "phaseforge/errors.hpp"

namespace phaseforge {

void TruncationRule::validate() const {
  if (!(c > 0.0)) throw InvalidArgument("truncation constant must be positive");
}

template <Scalar S>
SpectralMatrix<S>::SpectralMatrix(Index n, std::vector<Term> terms, double samples, TruncationRule rule,
                                  Index dense_limit)
    : n_(n), terms_(std::move(terms)), samples_(samples), rule_(rule) {
  if (n_ <= dense_limit) {
    Matrix<S> Y = Matrix<S>::Zero(n_, n_);
    for (const auto& t : terms_) {
      const auto& A = t.ensemble.entries();
      Y.noalias() += A.adjoint() * (t.weights.asDiagonal() * A);
    }
    Y /= samples_;
    dense_ = (0.5 * (Y + Y.adjoint())).eval();
    terms_.clear();
  }
}

template <Scalar S>
Matrix<S> SpectralMatrix<S>::apply(const Matrix<S>& V) const {
  if (V.rows() != n_) throw InvalidArgument("spectral matrix apply: dimension mismatch");
  if (dense_) return *dense_ * V;
  Matrix<S> out = Matrix<S>::Zero(n_, V.cols());
  for (const auto& t : terms_) {
    const auto& A = t.ensemble.entries();
    const Matrix<S> AV = t.weights.asDiagonal() * (A * V);
    out.noalias() += A.adjoint() * AV;
  }
  return out / samples_;
}

template <Scalar S>
Matrix<S> SpectralMatrix<S>::dense() const {
  if (dense_) return *dense_;
  return apply(Matrix<S>::Identity(n_, n_));
}

template <Scalar S>
double SpectralMatrix<S>::trace() const {
  if (dense_) return real_part(dense_->trace());
  double acc = 0.0;
  for (const auto& t : terms_) acc += t.weights.dot(t.ensemble.entries().rowwise().squaredNorm());
  return acc / samples_;
}

template <Scalar S>
BlockOperator<S> SpectralMatrix<S>::op() const {
  return [this](const Matrix<S>& V) { return apply(V); };
}

namespace {

RealVector kept_weights(const RealVector& y, double mean_sq, const TruncationRule& rule, Index& kept) {
  RealVector w(y.size());
  for (Index i = 0; i < y.size(); ++i) {
    const double y2 = y[i] * y[i];
    const bool keep = rule.keeps(y2, mean_sq);
    w[i] = keep ? y2 : 0.0;
    kept += keep ? 1 : 0;
  }
  return w;
}

}  // namespace

template <Scalar S>
SpectralMatrix<S> build_Y0(const SensingEnsemble<S>& A, const Observation& y, const TruncationRule& rule,
                           Index dense_limit) {
  rule.validate();
  if (y.size() != A.rows()) throw InvalidArgument("build_Y0: observation length does not match ensemble rows");
  Index kept = 0;
  RealVector w = kept_weights(y.values(), y.mean_square(), rule, kept);
  if (kept == 0) throw DegenerateInput("build_Y0: every sample was truncated");
  std::vector<typename SpectralMatrix<S>::Term> terms;
  terms.push_back({A, std::move(w)});
  return SpectralMatrix<S>(A.cols(), std::move(terms), static_cast<double>(A.rows()), rule, dense_limit);
}

double norm_estimate(const Observation& y) { return std::sqrt(y.mean_square()); }

template <Scalar S>
Vector<S> spectral_estimate(const SpectralMatrix<S>& Y, double norm, const EigenOptions& opts) {
  if (!(norm > 0.0)) throw InvalidArgument("spectral_estimate: norm estimate must be positive");
  const auto eig = top_eigenvectors<S>(Y.op(), Y.dim(), 1, opts);
  return norm * eig.vectors.col(0);
}

template <Scalar S>
Vector<S> spectral_init(const SensingEnsemble<S>& A, const Observation& y, const TruncationRule& rule) {
  const double norm = norm_estimate(y);
  if (norm == 0.0) throw DegenerateSpectrum("spectral_init: all observations are zero");
  return spectral_estimate(build_Y0(A, y, rule), norm);
}

template <Scalar S>
std::vector<Index> sparse_support_init(const SensingEnsemble<S>& A, const Observation& y, Index s) {
  const Index n = A.cols();
  if (s < 1 || s > n) throw InvalidArgument("sparse_support_init: need 1 <= s <= n");
  if (y.size() != A.rows()) throw InvalidArgument("sparse_support_init: observation length does not match ensemble");
  const RealVector y2 = y.values().cwiseAbs2();
  const RealVector diag = A.entries().cwiseAbs2().transpose() * y2 / static_cast<double>(A.rows());

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return diag[a] > diag[b]; });
  order.resize(static_cast<std::size_t>(s));
  std::sort(order.begin(), order.end());
  return order;
}

template <Scalar S>
SparseInit<S> sparse_spectral_init(const SensingEnsemble<S>& A, const Observation& y, Index s,
                                   const TruncationRule& rule) {
  SparseInit<S> out;
  out.estimate.support = sparse_support_init(A, y, s);
  out.estimate.values = Vector<S>::Zero(A.cols());
  const double norm = norm_estimate(y);
  if (norm == 0.0) {
    out.degenerate = true;
    return out;
  }
  try {
    const auto sub = A.select_columns(out.estimate.support);
    const Vector<S> v = spectral_estimate(build_Y0(sub, y, rule), norm);
    for (std::size_t j = 0; j < out.estimate.support.size(); ++j) {
      out.estimate.values[out.estimate.support[j]] = v[static_cast<Index>(j)];
    }
  } catch (const DegenerateSpectrum&) {
    out.degenerate = true;
  }
  return out;
}

template <Scalar S>
SpectralMatrix<S> build_YU(const ColumnwiseEnsemble<S>& E, const RealMatrix& Ys, const TruncationRule& rule,
                           Index dense_limit) {
  rule.validate();
  if (Ys.rows() != E.rows() || Ys.cols() != E.size()) {
    throw InvalidArgument("build_YU: observation array shape does not match ensembles");
  }
  const double mean_sq = Ys.squaredNorm() / static_cast<double>(Ys.size());
  Index kept = 0;
  std::vector<typename SpectralMatrix<S>::Term> terms;
  terms.reserve(static_cast<std::size_t>(E.size()));
  for (Index k = 0; k < E.size(); ++k) {
    terms.push_back({E[k], kept_weights(Ys.col(k), mean_sq, rule, kept)});
  }
  if (kept == 0) throw DegenerateInput("build_YU: every sample was truncated");
  return SpectralMatrix<S>(E.dim(), std::move(terms), static_cast<double>(Ys.size()), rule, dense_limit);
}

template <Scalar S>
Matrix<S> lowrank_spectral_init(const ColumnwiseEnsemble<S>& E, const RealMatrix& Ys, Index r,
                                const TruncationRule& rule, const EigenOptions& opts) {
  if (r < 1 || r > std::min(E.dim(), E.size())) throw InvalidArgument("lowrank_spectral_init: need 1 <= r <= min(n, q)");
  const auto Y = build_YU(E, Ys, rule);
  return top_eigenvectors<S>(Y.op(), Y.dim(), r, opts).vectors;
}

#define PHASEFORGE_INSTANTIATE(S)                                                                                   \
  template class SpectralMatrix<S>;                                                                                 \
  template SpectralMatrix<S> build_Y0<S>(const SensingEnsemble<S>&, const Observation&, const TruncationRule&, Index); \
  template Vector<S> spectral_estimate<S>(const SpectralMatrix<S>&, double, const EigenOptions&);                   \
  template Vector<S> spectral_init<S>(const SensingEnsemble<S>&, const Observation&, const TruncationRule&);        \
  template std::vector<Index> sparse_support_init<S>(const SensingEnsemble<S>&, const Observation&, Index);         \
  template SparseInit<S> sparse_spectral_init<S>(const SensingEnsemble<S>&, const Observation&, Index,              \
                                                 const TruncationRule&);                                            \
  template SpectralMatrix<S> build_YU<S>(const ColumnwiseEnsemble<S>&, const RealMatrix&, const TruncationRule&,    \
                                         Index);                                                                    \
  template Matrix<S> lowrank_spectral_init<S>(const ColumnwiseEnsemble<S>&, const RealMatrix&, Index,               \
                                              const TruncationRule&, const EigenOptions&);

PHASEFORGE_INSTANTIATE(double)
PHASEFORGE_INSTANTIATE(Complex)

}  // namespace phaseforge
