#pragma once

#include <vector>

#include "phaseforge/solver.hpp"
#include "phaseforge/sparse_estimate.hpp"

namespace phaseforge {

/// Keeps the s largest-magnitude entries; ties go to the lower index.
template <Scalar S>
SparseEstimate<S> hard_threshold(const Vector<S>& x, Index s);

struct CosampConfig {
  int max_iters = 50;
  double stagnation = 1e-6;  // stop when the residual norm changes by less than this, relatively
};

template <Scalar S>
struct CosampResult {
  SparseEstimate<S> estimate;
  int iterations = 0;
  bool degenerate = false;
};

template <Scalar S>
CosampResult<S> cosamp(const SensingEnsemble<S>& A, const Vector<S>& b, Index s, const CosampConfig& cfg = {});

template <Scalar S>
struct SparseSolverReport : SolverReport<S> {
  std::vector<Index> support;
};

/// Defaults for the thresholded gradient iteration: step 0.35, no lower
/// truncation, upper truncation at 2.5 mean(y).
SolverConfig thresh_wf_config();

/// Support from the diagonal of Y0 (fixed afterwards), then alternating
/// phase estimation and least squares on that support. The first draw from
/// `source` feeds the initialization; iterations draw as in altmin_phase.
template <Scalar S>
SparseSolverReport<S> altmin_sparse(MeasurementSource<S>& source, Index s, const SolverConfig& cfg,
                                    const Vector<S>* truth = nullptr);

/// As above with an explicit support and starting point supported on it.
template <Scalar S>
SparseSolverReport<S> altmin_sparse(MeasurementSource<S>& source, const std::vector<Index>& support,
                                    const Vector<S>& x0, const SolverConfig& cfg, const Vector<S>* truth = nullptr);

/// x <- H_s(x - step/||x0||^2 * truncated WF direction), started from sparse_spectral_init.
template <Scalar S>
SparseSolverReport<S> thresh_wf(const SensingEnsemble<S>& A, const Observation& y, Index s, const SolverConfig& cfg,
                                const Vector<S>* truth = nullptr);

template <Scalar S>
SparseSolverReport<S> thresh_wf(const SensingEnsemble<S>& A, const Observation& y, Index s, const Vector<S>& x0,
                                const SolverConfig& cfg, const Vector<S>* truth = nullptr);

/// Phase estimation C = phase(A x) alternated with cosamp(A, C y, s).
template <Scalar S>
SparseSolverReport<S> copram(MeasurementSource<S>& source, Index s, const SolverConfig& cfg,
                             const Vector<S>* truth = nullptr, const CosampConfig& inner = {});

template <Scalar S>
SparseSolverReport<S> copram(MeasurementSource<S>& source, Index s, const Vector<S>& x0, const SolverConfig& cfg,
                             const Vector<S>* truth = nullptr, const CosampConfig& inner = {});

}  // namespace phaseforge
