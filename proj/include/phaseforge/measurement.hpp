#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "phaseforge/types.hpp"

namespace phaseforge {

/// Where a generated ensemble came from; regenerating from the address is bit-identical.
struct StreamAddress {
  std::uint64_t seed = 0;
  std::uint64_t stream_index = 0;

  friend bool operator==(const StreamAddress&, const StreamAddress&) = default;
};

/// An m x n measurement matrix A = [a_1 ... a_m]' stored row-major, so row i is a_i'
/// (the conjugate transpose of a_i in the complex field). Immutable; copies share storage.
template <Scalar S>
class SensingEnsemble {
 public:
  using Entries = RowMajorMatrix<S>;

  /// i.i.d. unit-variance Gaussian entries. Real: N(0,1). Complex: N(0,1/2) + j N(0,1/2).
  static SensingEnsemble sample(Index n, Index m, std::uint64_t seed, std::uint64_t stream_index);

  /// Wraps an explicit matrix (identity ensembles in tests, projected ensembles A_k U).
  static SensingEnsemble from_matrix(Entries entries);

  Index rows() const { return entries_->rows(); }
  Index cols() const { return entries_->cols(); }
  ScalarField field() const { return field_of<S>; }
  const Entries& entries() const { return *entries_; }
  const std::optional<StreamAddress>& origin() const { return origin_; }

  /// A x, i.e. the vector of <a_i, x>.
  Vector<S> apply(const Vector<S>& x) const;

  /// The ensemble seen by a signal supported on `columns`.
  SensingEnsemble select_columns(std::span<const Index> columns) const;

 private:
  SensingEnsemble(std::shared_ptr<const Entries> entries, std::optional<StreamAddress> origin)
      : entries_(std::move(entries)), origin_(origin) {}

  std::shared_ptr<const Entries> entries_;
  std::optional<StreamAddress> origin_;
};

template <Scalar S>
SensingEnsemble<S> sample_ensemble(Index n, Index m, std::uint64_t seed, std::uint64_t stream_index) {
  return SensingEnsemble<S>::sample(n, m, seed, stream_index);
}

/// Nonnegative magnitudes y = |A x|.
class Observation {
 public:
  explicit Observation(RealVector values, std::optional<StreamAddress> origin = std::nullopt);

  const RealVector& values() const { return values_; }
  Index size() const { return values_.size(); }
  const std::optional<StreamAddress>& origin() const { return origin_; }

  /// (1/m) sum y_i^2, an unbiased estimate of ||x||^2 for Gaussian ensembles.
  double mean_square() const;

 private:
  RealVector values_;
  std::optional<StreamAddress> origin_;
};

template <Scalar S>
Observation forward_phaseless(const SensingEnsemble<S>& A, const Vector<S>& x);

/// One independent ensemble A_k per column of an n x q signal matrix.
template <Scalar S>
class ColumnwiseEnsemble {
 public:
  /// Column k uses stream index first_stream + k.
  static ColumnwiseEnsemble sample(Index n, Index m, Index q, std::uint64_t seed, std::uint64_t first_stream = 0);

  explicit ColumnwiseEnsemble(std::vector<SensingEnsemble<S>> columns);

  Index rows() const { return columns_.front().rows(); }
  Index dim() const { return columns_.front().cols(); }
  Index size() const { return static_cast<Index>(columns_.size()); }
  const SensingEnsemble<S>& operator[](Index k) const { return columns_[static_cast<std::size_t>(k)]; }
  const std::vector<SensingEnsemble<S>>& columns() const { return columns_; }

 private:
  std::vector<SensingEnsemble<S>> columns_;
};

/// m x q magnitudes; column k is |A_k x_k|.
template <Scalar S>
RealMatrix forward_columnwise(const ColumnwiseEnsemble<S>& E, const Matrix<S>& X);

/// Sample-splitting stream: item t is sample_ensemble(n, m, seed, t).
template <Scalar S>
class EnsembleStream {
 public:
  EnsembleStream(std::uint64_t seed, Index n, Index m);

  SensingEnsemble<S> next();
  SensingEnsemble<S> at(std::uint64_t t) const;
  std::uint64_t position() const { return position_; }
  void reset() { position_ = 0; }

 private:
  std::uint64_t seed_;
  Index n_;
  Index m_;
  std::uint64_t position_ = 0;
};

template <Scalar S>
EnsembleStream<S> ensemble_stream(std::uint64_t seed, Index n, Index m) {
  return EnsembleStream<S>(seed, n, m);
}

template <Scalar S>
struct Measurement {
  SensingEnsemble<S> ensemble;
  Observation observation;
};

/// Supplies (ensemble, observation) pairs to solvers. With sample splitting a
/// solver draws once per iteration; otherwise it draws once and reuses.
template <Scalar S>
class MeasurementSource {
 public:
  virtual ~MeasurementSource() = default;
  virtual Measurement<S> next() = 0;
  virtual std::uint64_t consumed() const = 0;
};

/// Returns the same measurement on every draw.
template <Scalar S>
class FixedMeasurements final : public MeasurementSource<S> {
 public:
  FixedMeasurements(SensingEnsemble<S> ensemble, Observation observation);

  Measurement<S> next() override;
  std::uint64_t consumed() const override { return consumed_; }

 private:
  Measurement<S> measurement_;
  std::uint64_t consumed_ = 0;
};

/// Fresh ensembles of a known ground truth, one stream item per draw.
template <Scalar S>
class FreshMeasurements final : public MeasurementSource<S> {
 public:
  FreshMeasurements(Vector<S> truth, Index m, std::uint64_t seed);

  Measurement<S> next() override;
  std::uint64_t consumed() const override { return stream_.position(); }

 private:
  Vector<S> truth_;
  EnsembleStream<S> stream_;
};

template <Scalar S>
struct ColumnwiseMeasurement {
  ColumnwiseEnsemble<S> ensembles;
  RealMatrix observations;
};

template <Scalar S>
class ColumnwiseSource {
 public:
  virtual ~ColumnwiseSource() = default;
  virtual ColumnwiseMeasurement<S> next() = 0;
  virtual std::uint64_t consumed() const = 0;
};

template <Scalar S>
class FixedColumnwise final : public ColumnwiseSource<S> {
 public:
  FixedColumnwise(ColumnwiseEnsemble<S> ensembles, RealMatrix observations);

  ColumnwiseMeasurement<S> next() override;
  std::uint64_t consumed() const override { return consumed_; }

 private:
  ColumnwiseMeasurement<S> measurement_;
  std::uint64_t consumed_ = 0;
};

/// Draw t uses stream indices [t q, (t + 1) q), so no two columns or draws share a sub-stream.
template <Scalar S>
class FreshColumnwise final : public ColumnwiseSource<S> {
 public:
  FreshColumnwise(Matrix<S> truth, Index m, std::uint64_t seed);

  ColumnwiseMeasurement<S> next() override;
  std::uint64_t consumed() const override { return consumed_; }

 private:
  Matrix<S> truth_;
  Index m_;
  std::uint64_t seed_;
  std::uint64_t consumed_ = 0;
};

}  // namespace phaseforge
