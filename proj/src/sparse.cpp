#include "phaseforge/sparse.hpp"

#include <algorithm>
#include <numeric>

#include "phaseforge/errors.hpp"
#include "phaseforge/linalg.hpp"
#include "phaseforge/unstructured.hpp"

namespace phaseforge {

namespace {

// Indices of the k largest |v|, ties to the lower index, returned ascending.
template <typename V>
std::vector<Index> top_k(const V& magnitudes, Index k) {
  std::vector<Index> idx(static_cast<std::size_t>(magnitudes.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  k = std::min<Index>(k, magnitudes.size());
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](Index a, Index b) {
    return magnitudes[a] > magnitudes[b] || (magnitudes[a] == magnitudes[b] && a < b);
  });
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

template <Scalar S>
SparseSolverReport<S> with_support(SolverReport<S> base, std::vector<Index> support) {
  SparseSolverReport<S> out;
  static_cast<SolverReport<S>&>(out) = std::move(base);
  out.support = std::move(support);
  return out;
}

template <Scalar S>
SparseSolverReport<S> degenerate_report(Index n, const std::vector<Index>& support) {
  SparseSolverReport<S> out;
  out.estimate = Vector<S>::Zero(n);
  out.trace.push_back(1.0);
  out.elapsed_ms.push_back(0.0);
  out.termination = Termination::Degenerate;
  out.support = support;
  return out;
}

}  // namespace

template <Scalar S>
SparseEstimate<S> hard_threshold(const Vector<S>& x, Index s) {
  if (s < 1 || s > x.size()) throw InvalidArgument("hard_threshold: need 1 <= s <= n");
  SparseEstimate<S> out;
  out.support = top_k(x.cwiseAbs().eval(), s);
  out.values = Vector<S>::Zero(x.size());
  for (Index i : out.support) out.values[i] = x[i];
  return out;
}

template <Scalar S>
CosampResult<S> cosamp(const SensingEnsemble<S>& A, const Vector<S>& b, Index s, const CosampConfig& cfg) {
  const Index n = A.cols();
  if (b.size() != A.rows()) throw InvalidArgument("cosamp: data length does not match ensemble rows");
  if (s < 1 || s > n) throw InvalidArgument("cosamp: need 1 <= s <= n");
  const auto& M = A.entries();

  CosampResult<S> result;
  result.estimate.values = Vector<S>::Zero(n);
  result.estimate.support = top_k(RealVector::Zero(n), s);
  const double b_norm = b.norm();
  if (b_norm == 0.0) return result;

  std::vector<Index> current;
  Vector<S> residual = b;
  double prev = b_norm;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    const RealVector proxy = (M.adjoint() * residual).cwiseAbs();
    std::vector<Index> merged = top_k(proxy, 2 * s);
    merged.insert(merged.end(), current.begin(), current.end());
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

    Matrix<S> sub(M.rows(), static_cast<Index>(merged.size()));
    for (std::size_t j = 0; j < merged.size(); ++j) sub.col(static_cast<Index>(j)) = M.col(merged[j]);
    const Vector<S> z = Eigen::CompleteOrthogonalDecomposition<Matrix<S>>(sub).solve(b);
    result.iterations = it;
    if (!z.allFinite()) {
      result.degenerate = true;
      break;
    }
    Vector<S> wide = Vector<S>::Zero(n);
    for (std::size_t j = 0; j < merged.size(); ++j) wide[merged[j]] = z[static_cast<Index>(j)];
    result.estimate = hard_threshold<S>(wide, s);
    current = result.estimate.support;

    residual = b - M * result.estimate.values;
    const double now = residual.norm();
    if (now <= 1e-14 * b_norm || std::abs(prev - now) < cfg.stagnation * prev) break;
    prev = now;
  }
  return result;
}

SolverConfig thresh_wf_config() {
  SolverConfig cfg;
  cfg.max_iters = 500;
  cfg.step_size = 0.35;
  cfg.gradient = {0.0, 2.5};
  return cfg;
}

template <Scalar S>
SparseSolverReport<S> altmin_sparse(MeasurementSource<S>& source, const std::vector<Index>& support,
                                    const Vector<S>& x0, const SolverConfig& cfg, const Vector<S>* truth) {
  if (support.empty()) throw InvalidArgument("altmin_sparse: empty support");
  if (x0.norm() == 0.0) throw InvalidArgument("altmin_sparse: initial estimate must be nonzero");
  std::optional<SensingEnsemble<S>> restricted;
  std::optional<Observation> observed;
  auto report = detail::iterate<S>(x0, cfg, truth, [&](const Vector<S>& x, int) -> std::optional<Vector<S>> {
    if (!restricted || cfg.sample_splitting) {
      auto meas = source.next();
      if (meas.ensemble.cols() != x.size()) throw InvalidArgument("altmin_sparse: ensemble width mismatch");
      restricted = meas.ensemble.select_columns(support);
      observed = meas.observation;
    }
    const auto& A = restricted->entries();
    if (A.rows() < A.cols()) return std::nullopt;
    Vector<S> xt(A.cols());
    for (std::size_t j = 0; j < support.size(); ++j) xt[static_cast<Index>(j)] = x[support[j]];
    const Vector<S> b = phases<S>(A * xt).cwiseProduct(observed->values().template cast<S>());
    const auto ls = cgls(
        [&](const Vector<S>& v) -> Vector<S> { return A * v; },
        [&](const Vector<S>& r) -> Vector<S> { return A.adjoint() * r; }, b, xt, cfg.ls_tol,
        static_cast<int>(10 * A.cols()));
    if (ls.breakdown && !ls.converged) return std::nullopt;
    Vector<S> next = Vector<S>::Zero(x.size());
    for (std::size_t j = 0; j < support.size(); ++j) next[support[j]] = xt[static_cast<Index>(j)];
    return next;
  });
  return with_support(std::move(report), support);
}

template <Scalar S>
SparseSolverReport<S> altmin_sparse(MeasurementSource<S>& source, Index s, const SolverConfig& cfg,
                                    const Vector<S>* truth) {
  const auto first = source.next();
  const auto init = sparse_spectral_init(first.ensemble, first.observation, s);
  if (init.degenerate) return degenerate_report<S>(first.ensemble.cols(), init.estimate.support);
  if (!cfg.sample_splitting) {
    FixedMeasurements<S> fixed(first.ensemble, first.observation);
    return altmin_sparse(fixed, init.estimate.support, init.estimate.values, cfg, truth);
  }
  return altmin_sparse(source, init.estimate.support, init.estimate.values, cfg, truth);
}

template <Scalar S>
SparseSolverReport<S> thresh_wf(const SensingEnsemble<S>& A, const Observation& y, Index s, const Vector<S>& x0,
                                const SolverConfig& cfg, const Vector<S>* truth) {
  if (x0.size() != A.cols()) throw InvalidArgument("thresh_wf: initial estimate length mismatch");
  const double scale = x0.squaredNorm();
  if (scale == 0.0) throw InvalidArgument("thresh_wf: initial estimate must be nonzero");
  const double mu = cfg.step_size / scale;
  std::vector<Index> support = hard_threshold<S>(x0, s).support;
  auto report = detail::iterate<S>(x0, cfg, truth, [&](const Vector<S>& x, int) -> std::optional<Vector<S>> {
    auto next = hard_threshold<S>(x - mu * wf_direction(A, y, x, cfg.gradient), s);
    support = std::move(next.support);
    return std::move(next.values);
  });
  if (report.termination == Termination::Degenerate) support = hard_threshold<S>(report.estimate, s).support;
  return with_support(std::move(report), std::move(support));
}

template <Scalar S>
SparseSolverReport<S> thresh_wf(const SensingEnsemble<S>& A, const Observation& y, Index s, const SolverConfig& cfg,
                                const Vector<S>* truth) {
  const auto init = sparse_spectral_init(A, y, s);
  if (init.degenerate) return degenerate_report<S>(A.cols(), init.estimate.support);
  return thresh_wf(A, y, s, init.estimate.values, cfg, truth);
}

template <Scalar S>
SparseSolverReport<S> copram(MeasurementSource<S>& source, Index s, const Vector<S>& x0, const SolverConfig& cfg,
                             const Vector<S>* truth, const CosampConfig& inner) {
  if (x0.norm() == 0.0) throw InvalidArgument("copram: initial estimate must be nonzero");
  std::optional<Measurement<S>> current;
  std::vector<Index> support = hard_threshold<S>(x0, s).support;
  auto report = detail::iterate<S>(x0, cfg, truth, [&](const Vector<S>& x, int) -> std::optional<Vector<S>> {
    if (!current || cfg.sample_splitting) current = source.next();
    const auto& A = current->ensemble;
    if (A.cols() != x.size()) throw InvalidArgument("copram: ensemble width mismatch");
    const Vector<S> b = phases<S>(A.apply(x)).cwiseProduct(current->observation.values().template cast<S>());
    auto cs = cosamp(A, b, s, inner);
    if (cs.degenerate) return std::nullopt;
    support = std::move(cs.estimate.support);
    return std::move(cs.estimate.values);
  });
  if (report.termination == Termination::Degenerate) support = hard_threshold<S>(report.estimate, s).support;
  return with_support(std::move(report), std::move(support));
}

template <Scalar S>
SparseSolverReport<S> copram(MeasurementSource<S>& source, Index s, const SolverConfig& cfg, const Vector<S>* truth,
                             const CosampConfig& inner) {
  const auto first = source.next();
  const auto init = sparse_spectral_init(first.ensemble, first.observation, s);
  if (init.degenerate) return degenerate_report<S>(first.ensemble.cols(), init.estimate.support);
  if (!cfg.sample_splitting) {
    FixedMeasurements<S> fixed(first.ensemble, first.observation);
    return copram(fixed, s, init.estimate.values, cfg, truth, inner);
  }
  return copram(source, s, init.estimate.values, cfg, truth, inner);
}

#define PHASEFORGE_INSTANTIATE(S)                                                                                 \
  template SparseEstimate<S> hard_threshold<S>(const Vector<S>&, Index);                                         \
  template CosampResult<S> cosamp<S>(const SensingEnsemble<S>&, const Vector<S>&, Index, const CosampConfig&);   \
  template SparseSolverReport<S> altmin_sparse<S>(MeasurementSource<S>&, Index, const SolverConfig&,             \
                                                  const Vector<S>*);                                             \
  template SparseSolverReport<S> altmin_sparse<S>(MeasurementSource<S>&, const std::vector<Index>&,              \
                                                  const Vector<S>&, const SolverConfig&, const Vector<S>*);      \
  template SparseSolverReport<S> thresh_wf<S>(const SensingEnsemble<S>&, const Observation&, Index,              \
                                              const SolverConfig&, const Vector<S>*);                            \
  template SparseSolverReport<S> thresh_wf<S>(const SensingEnsemble<S>&, const Observation&, Index,              \
                                              const Vector<S>&, const SolverConfig&, const Vector<S>*);          \
  template SparseSolverReport<S> copram<S>(MeasurementSource<S>&, Index, const SolverConfig&, const Vector<S>*,  \
                                           const CosampConfig&);                                                 \
  template SparseSolverReport<S> copram<S>(MeasurementSource<S>&, Index, const Vector<S>&, const SolverConfig&,  \
                                           const Vector<S>*, const CosampConfig&);

PHASEFORGE_INSTANTIATE(double)
PHASEFORGE_INSTANTIATE(Complex)

}  // namespace phaseforge
