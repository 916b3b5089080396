#include "phaseforge/measurement.hpp"

#include <cmath>
#include <set>
#include <string>

#include "phaseforge/errors.hpp"
#include "phaseforge/rng.hpp"

namespace phaseforge {

std::string_view to_string(ScalarField field) { return field == ScalarField::Real ? "real" : "complex"; }

ScalarField parse_field(std::string_view text) {
  if (text == "real") return ScalarField::Real;
  if (text == "complex") return ScalarField::Complex;
  throw InvalidArgument("unknown scalar field '" + std::string(text) + "'");
}

template <Scalar S>
SensingEnsemble<S> SensingEnsemble<S>::sample(Index n, Index m, std::uint64_t seed, std::uint64_t stream_index) {
  if (n < 1 || m < 1) throw InvalidArgument("sample_ensemble: dimensions must be positive");
  auto entries = std::make_shared<Entries>(m, n);
  const GaussianStream gauss(seed, Domain::Ensemble, stream_index);

  // Fill the raw storage as a flat run of doubles; a complex entry is (re, im).
  constexpr int per_entry = std::same_as<S, double> ? 1 : 2;
  const double scale = std::same_as<S, double> ? 1.0 : std::sqrt(0.5);
  double* out = reinterpret_cast<double*>(entries->data());
  const auto total = static_cast<std::uint64_t>(m * n * per_entry);
  for (std::uint64_t b = 0; 4 * b < total; ++b) {
    const auto normals = gauss.block(b);
    for (std::uint64_t j = 0; j < 4 && 4 * b + j < total; ++j) out[4 * b + j] = scale * normals[j];
  }
  return SensingEnsemble(std::move(entries), StreamAddress{seed, stream_index});
}

template <Scalar S>
SensingEnsemble<S> SensingEnsemble<S>::from_matrix(Entries entries) {
  if (entries.rows() < 1 || entries.cols() < 1) throw InvalidArgument("ensemble: dimensions must be positive");
  return SensingEnsemble(std::make_shared<const Entries>(std::move(entries)), std::nullopt);
}

template <Scalar S>
Vector<S> SensingEnsemble<S>::apply(const Vector<S>& x) const {
  if (x.size() != cols()) throw InvalidArgument("ensemble apply: signal length does not match ensemble columns");
  return *entries_ * x;
}

template <Scalar S>
SensingEnsemble<S> SensingEnsemble<S>::select_columns(std::span<const Index> columns) const {
  Entries sub(rows(), static_cast<Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j] < 0 || columns[j] >= cols()) throw InvalidArgument("select_columns: index out of range");
    sub.col(static_cast<Index>(j)) = entries_->col(columns[j]);
  }
  return SensingEnsemble(std::make_shared<const Entries>(std::move(sub)), std::nullopt);
}

Observation::Observation(RealVector values, std::optional<StreamAddress> origin)
    : values_(std::move(values)), origin_(origin) {
  for (Index i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0.0)) throw InvalidArgument("observation entries must be nonnegative");
  }
}

double Observation::mean_square() const {
  if (values_.size() == 0) return 0.0;
  return values_.squaredNorm() / static_cast<double>(values_.size());
}

template <Scalar S>
Observation forward_phaseless(const SensingEnsemble<S>& A, const Vector<S>& x) {
  if (x.size() != A.cols()) throw InvalidArgument("forward_phaseless: signal length does not match ensemble");
  return Observation(A.apply(x).cwiseAbs(), A.origin());
}

template <Scalar S>
ColumnwiseEnsemble<S> ColumnwiseEnsemble<S>::sample(Index n, Index m, Index q, std::uint64_t seed,
                                                    std::uint64_t first_stream) {
  if (q < 1) throw InvalidArgument("columnwise ensemble: q must be positive");
  std::vector<SensingEnsemble<S>> columns;
  columns.reserve(static_cast<std::size_t>(q));
  for (Index k = 0; k < q; ++k) {
    columns.push_back(SensingEnsemble<S>::sample(n, m, seed, first_stream + static_cast<std::uint64_t>(k)));
  }
  return ColumnwiseEnsemble(std::move(columns));
}

template <Scalar S>
ColumnwiseEnsemble<S>::ColumnwiseEnsemble(std::vector<SensingEnsemble<S>> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw InvalidArgument("columnwise ensemble: no columns");
  std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
  for (const auto& A : columns_) {
    if (A.rows() != columns_.front().rows() || A.cols() != columns_.front().cols()) {
      throw InvalidArgument("columnwise ensemble: column ensembles differ in shape");
    }
    if (A.origin() && !seen.emplace(A.origin()->seed, A.origin()->stream_index).second) {
      throw InvalidArgument("columnwise ensemble: two columns share a sub-stream");
    }
  }
}

template <Scalar S>
RealMatrix forward_columnwise(const ColumnwiseEnsemble<S>& E, const Matrix<S>& X) {
  if (X.rows() != E.dim() || X.cols() != E.size()) {
    throw InvalidArgument("forward_columnwise: signal matrix shape does not match ensembles");
  }
  RealMatrix Y(E.rows(), E.size());
  for (Index k = 0; k < E.size(); ++k) Y.col(k) = (E[k].entries() * X.col(k)).cwiseAbs();
  return Y;
}

template <Scalar S>
EnsembleStream<S>::EnsembleStream(std::uint64_t seed, Index n, Index m) : seed_(seed), n_(n), m_(m) {
  if (n < 1 || m < 1) throw InvalidArgument("ensemble_stream: dimensions must be positive");
}

template <Scalar S>
SensingEnsemble<S> EnsembleStream<S>::next() {
  return at(position_++);
}

template <Scalar S>
SensingEnsemble<S> EnsembleStream<S>::at(std::uint64_t t) const {
  return SensingEnsemble<S>::sample(n_, m_, seed_, t);
}

template <Scalar S>
FixedMeasurements<S>::FixedMeasurements(SensingEnsemble<S> ensemble, Observation observation)
    : measurement_{std::move(ensemble), std::move(observation)} {
  if (measurement_.ensemble.rows() != measurement_.observation.size()) {
    throw InvalidArgument("measurement: observation length does not match ensemble rows");
  }
}

template <Scalar S>
Measurement<S> FixedMeasurements<S>::next() {
  ++consumed_;
  return measurement_;
}

template <Scalar S>
FreshMeasurements<S>::FreshMeasurements(Vector<S> truth, Index m, std::uint64_t seed)
    : truth_(std::move(truth)), stream_(seed, truth_.size(), m) {}

template <Scalar S>
Measurement<S> FreshMeasurements<S>::next() {
  auto A = stream_.next();
  auto y = forward_phaseless(A, truth_);
  return {std::move(A), std::move(y)};
}

template <Scalar S>
FixedColumnwise<S>::FixedColumnwise(ColumnwiseEnsemble<S> ensembles, RealMatrix observations)
    : measurement_{std::move(ensembles), std::move(observations)} {
  const auto& E = measurement_.ensembles;
  if (measurement_.observations.rows() != E.rows() || measurement_.observations.cols() != E.size()) {
    throw InvalidArgument("columnwise measurement: observation shape does not match ensembles");
  }
}

template <Scalar S>
ColumnwiseMeasurement<S> FixedColumnwise<S>::next() {
  ++consumed_;
  return measurement_;
}

template <Scalar S>
FreshColumnwise<S>::FreshColumnwise(Matrix<S> truth, Index m, std::uint64_t seed)
    : truth_(std::move(truth)), m_(m), seed_(seed) {
  if (truth_.rows() < 1 || truth_.cols() < 1 || m < 1) throw InvalidArgument("FreshColumnwise: empty shape");
}

template <Scalar S>
ColumnwiseMeasurement<S> FreshColumnwise<S>::next() {
  const auto q = static_cast<std::uint64_t>(truth_.cols());
  auto E = ColumnwiseEnsemble<S>::sample(truth_.rows(), m_, truth_.cols(), seed_, consumed_ * q);
  ++consumed_;
  RealMatrix Y = forward_columnwise(E, truth_);
  return {std::move(E), std::move(Y)};
}

#define PHASEFORGE_INSTANTIATE(S)                                                            \
  template class SensingEnsemble<S>;                                                         \
  template Observation forward_phaseless<S>(const SensingEnsemble<S>&, const Vector<S>&);    \
  template class ColumnwiseEnsemble<S>;                                                      \
  template RealMatrix forward_columnwise<S>(const ColumnwiseEnsemble<S>&, const Matrix<S>&); \
  template class EnsembleStream<S>;                                                          \
  template class FixedMeasurements<S>;                                                       \
  template class FreshMeasurements<S>;                                                       \
  template class FixedColumnwise<S>;                                                         \
  template class FreshColumnwise<S>;

PHASEFORGE_INSTANTIATE(double)
PHASEFORGE_INSTANTIATE(Complex)

}  // namespace phaseforge
