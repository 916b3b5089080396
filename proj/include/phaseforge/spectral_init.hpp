#pragma once

#include <optional>
#include <vector>

#include "phaseforge/linalg.hpp"
#include "phaseforge/measurement.hpp"
#include "phaseforge/sparse_estimate.hpp"

namespace phaseforge {

/// Keeps sample i when y_i^2 <= c * mean(y^2). Mode None keeps everything.
struct TruncationRule {
  enum class Mode { None, MeanMultiple };

  Mode mode = Mode::MeanMultiple;
  double c = 9.0;

  static TruncationRule none() { return {Mode::None, 9.0}; }
  static TruncationRule mean_multiple(double c) { return {Mode::MeanMultiple, c}; }

  void validate() const;
  bool keeps(double y_squared, double mean_y_squared) const {
    return mode == Mode::None || y_squared <= c * mean_y_squared;
  }
};

/// Above this dimension the spectral matrix is applied matrix-free.
inline constexpr Index kDenseSpectralLimit = 2048;

/// Y = (1/N) sum w_i a_i a_i' over kept samples, held densely or as weighted
/// ensembles depending on n.
template <Scalar S>
class SpectralMatrix {
 public:
  struct Term {
    SensingEnsemble<S> ensemble;
    RealVector weights;  // y_i^2 on kept rows, 0 elsewhere
  };

  SpectralMatrix(Index n, std::vector<Term> terms, double samples, TruncationRule rule, Index dense_limit);

  Index dim() const { return n_; }
  double samples() const { return samples_; }
  const TruncationRule& rule() const { return rule_; }
  bool is_dense() const { return dense_.has_value(); }

  Matrix<S> apply(const Matrix<S>& V) const;
  Matrix<S> dense() const;
  double trace() const;
  BlockOperator<S> op() const;

 private:
  Index n_;
  std::vector<Term> terms_;
  double samples_;
  TruncationRule rule_;
  std::optional<Matrix<S>> dense_;
};

template <Scalar S>
SpectralMatrix<S> build_Y0(const SensingEnsemble<S>& A, const Observation& y, const TruncationRule& rule = {},
                           Index dense_limit = kDenseSpectralLimit);

/// sqrt(mean y^2), the scale of the unit top eigenvector.
double norm_estimate(const Observation& y);

/// Top eigenvector of Y scaled to `norm`. Throws DegenerateSpectrum when the
/// leading eigenvalue is not separated.
template <Scalar S>
Vector<S> spectral_estimate(const SpectralMatrix<S>& Y, double norm, const EigenOptions& opts = {});

/// build_Y0 + spectral_estimate + norm_estimate.
template <Scalar S>
Vector<S> spectral_init(const SensingEnsemble<S>& A, const Observation& y, const TruncationRule& rule = {});

/// The s largest entries of diag(Y0) (untruncated), ties to the lower index; sorted ascending.
template <Scalar S>
std::vector<Index> sparse_support_init(const SensingEnsemble<S>& A, const Observation& y, Index s);

template <Scalar S>
struct SparseInit {
  SparseEstimate<S> estimate;
  bool degenerate = false;  // set when the support submatrix has no eigengap; estimate is then zero
};

template <Scalar S>
SparseInit<S> sparse_spectral_init(const SensingEnsemble<S>& A, const Observation& y, Index s,
                                   const TruncationRule& rule = TruncationRule::none());

/// Y_U = (1/(mq)) sum_{k,i} y_ik^2 a_ik a_ik' over samples kept by the rule,
/// with the mean taken over all mq observations.
template <Scalar S>
SpectralMatrix<S> build_YU(const ColumnwiseEnsemble<S>& E, const RealMatrix& Ys, const TruncationRule& rule = {},
                           Index dense_limit = kDenseSpectralLimit);

template <Scalar S>
Matrix<S> lowrank_spectral_init(const ColumnwiseEnsemble<S>& E, const RealMatrix& Ys, Index r,
                                const TruncationRule& rule = {}, const EigenOptions& opts = {});

}  // namespace phaseforge
