#include "phaseforge/lowrank.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "phaseforge/errors.hpp"
#include "phaseforge/rng.hpp"
#include "phaseforge/unstructured.hpp"

namespace phaseforge {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <Scalar S>
Matrix<S> gaussian_block(Index rows, Index cols, std::uint64_t seed, std::uint64_t stream) {
  const GaussianStream gauss(seed, Domain::Signal, stream);
  Matrix<S> M(rows, cols);
  std::uint64_t k = 0;
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      if constexpr (std::same_as<S, double>) {
        M(i, j) = gauss.at(k++);
      } else {
        const double re = gauss.at(k++);
        M(i, j) = std::sqrt(0.5) * Complex(re, gauss.at(k++));
      }
    }
  }
  return M;
}

template <Scalar S>
double error_or_nan(const Matrix<S>& X, const Matrix<S>& truth) {
  return truth.squaredNorm() == 0.0 ? kNaN : matrix_phase_error<S>(X, truth);
}

// Successive change between matrix iterates; infinite when the previous one is zero.
template <Scalar S>
double matrix_change(const Matrix<S>& next, const Matrix<S>& prev) {
  return prev.squaredNorm() == 0.0 ? std::numeric_limits<double>::infinity() : matrix_phase_error<S>(next, prev);
}

template <Scalar S>
void check_truth(const Matrix<S>* truth, Index n, Index q) {
  if (truth != nullptr && (truth->rows() != n || truth->cols() != q)) {
    throw InvalidArgument("truth shape does not match the instance");
  }
}

template <Scalar S>
SensingEnsemble<S> projected(const SensingEnsemble<S>& A, const Matrix<S>& U) {
  return SensingEnsemble<S>::from_matrix(RowMajorMatrix<S>(A.entries() * U));
}

// Per-column r-dimensional truncated spectral estimate; nullopt when it does not exist.
template <Scalar S>
std::optional<Vector<S>> coefficient_init(const SensingEnsemble<S>& M, const Observation& y,
                                          const TruncationRule& rule) {
  try {
    return spectral_init(M, y, rule);
  } catch (const DegenerateSpectrum&) {
    return std::nullopt;
  } catch (const DegenerateInput&) {
    return std::nullopt;
  }
}

template <Scalar S>
Matrix<S> coefficient_step(const ColumnwiseMeasurement<S>& meas, const Matrix<S>& U, const LowRankConfig& cfg,
                           std::vector<Index>& flagged) {
  const Index q = meas.ensembles.size();
  Matrix<S> B = Matrix<S>::Zero(U.cols(), q);
  flagged.clear();
  for (Index k = 0; k < q; ++k) {
    const auto M = projected(meas.ensembles[k], U);
    const Observation y(meas.observations.col(k));
    const auto b0 = coefficient_init(M, y, cfg.truncation);
    if (!b0) {
      flagged.push_back(k);
      continue;
    }
    const auto sub = twf(M, y, *b0, cfg.column);
    if (sub.termination == Termination::Degenerate) flagged.push_back(k);
    B.col(k) = sub.estimate;
  }
  return B;
}

template <Scalar S>
LowRankResult<S> zero_truth_guard(Index n, Index q, Index r) {
  LowRankResult<S> out;
  out.factors.U = Matrix<S>::Identity(n, r);
  out.factors.B = Matrix<S>::Zero(r, q);
  out.report.estimate = Matrix<S>::Zero(n, q);
  out.report.trace.push_back(kNaN);
  out.report.elapsed_ms.push_back(0.0);
  out.report.termination = Termination::Degenerate;
  return out;
}

template <Scalar S>
LowRankResult<S> run_altmin(ColumnwiseSource<S>& source, const ColumnwiseMeasurement<S>& first, Index r,
                            const LowRankConfig& cfg, const Matrix<S>* truth) {
  const detail::Stopwatch clock;
  const Index n = first.ensembles.dim();
  const Index q = first.ensembles.size();
  check_truth(truth, n, q);
  if (r < 1 || r > std::min(n, q)) throw InvalidArgument("altmin_lowrap: need 1 <= r <= min(n, q)");
  if (first.observations.isZero(0.0)) return zero_truth_guard<S>(n, q, r);

  LowRankResult<S> out;
  auto& report = out.report;
  Matrix<S> U;
  try {
    U = lowrank_spectral_init(first.ensembles, first.observations, r, cfg.truncation);
  } catch (const DegenerateSpectrum&) {
    auto guard = zero_truth_guard<S>(n, q, r);
    guard.report.trace = {truth ? error_or_nan<S>(guard.report.estimate, *truth) : 1.0};
    return guard;
  }
  out.factors.U = U;
  out.factors.B = Matrix<S>::Zero(r, q);
  report.estimate = Matrix<S>::Zero(n, q);
  report.trace.push_back(truth ? error_or_nan<S>(report.estimate, *truth) : 1.0);
  report.elapsed_ms.push_back(clock.elapsed_ms());
  report.termination = Termination::MaxIters;

  const int ls_cap = cfg.ls_max_iters > 0 ? cfg.ls_max_iters : static_cast<int>(10 * n * r);
  for (int t = 1; t <= cfg.max_iters; ++t) {
    const ColumnwiseMeasurement<S> meas_b = cfg.sample_splitting ? source.next() : first;
    const Matrix<S> B = coefficient_step(meas_b, U, cfg, report.flagged_columns);
    const ColumnwiseMeasurement<S> meas_u = cfg.sample_splitting && cfg.split_substeps ? source.next() : meas_b;

    Matrix<S> targets(meas_u.observations.rows(), q);
    for (Index k = 0; k < q; ++k) {
      const Vector<S> z = meas_u.ensembles[k].entries() * (U * B.col(k));
      targets.col(k) = phases<S>(z).cwiseProduct(meas_u.observations.col(k).template cast<S>());
    }
    CglsResult ls;
    const Matrix<S> Ut = solve_u_update(meas_u.ensembles, targets, B, U, cfg.ls_tol, ls_cap, &ls);
    if ((ls.breakdown && !ls.converged) || !Ut.allFinite()) {
      report.termination = Termination::Degenerate;
      break;
    }
    Matrix<S> R;
    const Matrix<S> Q = orthonormalize<S>(Ut, &R);
    const RealVector diag = R.diagonal().cwiseAbs();
    if (!(diag.minCoeff() > 1e-12 * diag.maxCoeff())) {
      report.termination = Termination::Degenerate;
      break;
    }
    Matrix<S> X = Ut * B;
    const double change = matrix_change<S>(X, report.estimate);
    U = Q;
    out.factors.U = Q;
    out.factors.B = R * B;
    report.estimate = std::move(X);
    report.iterations = t;
    report.trace.push_back(truth ? error_or_nan<S>(report.estimate, *truth) : change);
    report.elapsed_ms.push_back(clock.elapsed_ms());
    if (change < cfg.tol) {
      report.termination = Termination::Converged;
      break;
    }
  }
  report.wall_ms = clock.elapsed_ms();
  return out;
}

}  // namespace

SolverConfig LowRankConfig::column_defaults() {
  SolverConfig cfg;
  cfg.max_iters = 300;
  cfg.tol = 1e-12;
  cfg.step_size = 0.2;
  cfg.gradient = {0.0, 2.5};
  return cfg;
}

void LowRankConfig::validate() const {
  if (max_iters < 1) throw InvalidArgument("max_iters must be at least 1");
  if (!(tol > 0.0) || !(ls_tol > 0.0)) throw InvalidArgument("tolerances must be positive");
  if (!(step_size > 0.0)) throw InvalidArgument("step_size must be positive");
  if (ls_max_iters < 0) throw InvalidArgument("ls_max_iters must be nonnegative");
  truncation.validate();
  column.validate();
}

template <Scalar S>
Matrix<S> project_rank_r(const Matrix<S>& M, Index r) {
  if (r < 1 || r > std::min(M.rows(), M.cols())) throw InvalidArgument("project_rank_r: need 1 <= r <= min(n, q)");
  Eigen::BDCSVD<Matrix<S>> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU().leftCols(r) * svd.singularValues().head(r).template cast<S>().asDiagonal() *
         svd.matrixV().leftCols(r).adjoint();
}

template <Scalar S>
double right_incoherence(const Matrix<S>& X) {
  const double total = X.squaredNorm();
  if (total == 0.0) throw InvalidArgument("right_incoherence: zero matrix");
  return static_cast<double>(X.cols()) * X.colwise().squaredNorm().maxCoeff() / total;
}

template <Scalar S>
LrprProblem<S> generate_lrpr_instance(Index n, Index q, Index r, Index m, double condition, std::uint64_t seed) {
  if (n < 1 || q < 1 || m < 1) throw InvalidArgument("generate_lrpr_instance: dimensions must be positive");
  if (r < 1 || r > std::min(n, q)) throw InvalidArgument("generate_lrpr_instance: need 1 <= r <= min(n, q)");
  if (!(condition >= 1.0)) throw InvalidArgument("generate_lrpr_instance: condition ratio must be >= 1");

  LrprProblem<S> out{.truth = {}, .U = {}, .singular_values = {}, .incoherence = 0.0,
                     .instance = {ColumnwiseEnsemble<S>::sample(n, m, q, seed, 0), RealMatrix(), r}};
  out.U = orthonormalize<S>(gaussian_block<S>(n, r, seed, 0));
  // LinSpaced with one point yields the upper end, so r = 1 is spelled out.
  out.singular_values = RealVector::Ones(r);
  if (r > 1) out.singular_values = RealVector::LinSpaced(r, 1.0, 1.0 / condition);
  double measured = 0.0;
  for (int attempt = 0; attempt < kMaxIncoherenceRejections; ++attempt) {
    Matrix<S> G = gaussian_block<S>(q, r, seed, 1 + static_cast<std::uint64_t>(attempt));
    for (Index k = 0; k < q; ++k) {
      const double norm = G.row(k).norm();
      if (norm > 0.0) G.row(k) /= norm;
    }
    const Matrix<S> V = orthonormalize<S>(G);
    // U has orthonormal columns, so ||x_k||^2 = sum_j s_j^2 |V_kj|^2.
    const RealVector energy = V.cwiseAbs2() * out.singular_values.cwiseAbs2();
    measured = static_cast<double>(q) * energy.maxCoeff() / energy.sum();
    if (measured <= kIncoherenceBound) {
      out.truth = out.U * out.singular_values.template cast<S>().asDiagonal() * V.adjoint();
      out.incoherence = right_incoherence<S>(out.truth);
      out.instance.observations = forward_columnwise(out.instance.ensembles, out.truth);
      return out;
    }
  }
  throw GenerationError("right incoherence bound " + std::to_string(kIncoherenceBound) + " not met after " +
                        std::to_string(kMaxIncoherenceRejections) + " draws (last " + std::to_string(measured) + ")");
}

template <Scalar S>
Matrix<S> solve_u_update(const ColumnwiseEnsemble<S>& E, const Matrix<S>& targets, const Matrix<S>& B,
                         Matrix<S> start, double tol, int max_iters, CglsResult* info) {
  const Index q = E.size();
  if (targets.rows() != E.rows() || targets.cols() != q || B.cols() != q || start.rows() != E.dim() ||
      start.cols() != B.rows()) {
    throw InvalidArgument("solve_u_update: shape mismatch");
  }
  auto forward = [&](const Matrix<S>& V) -> Matrix<S> {
    Matrix<S> out(E.rows(), q);
    for (Index k = 0; k < q; ++k) out.col(k) = E[k].entries() * (V * B.col(k));
    return out;
  };
  auto adjoint = [&](const Matrix<S>& R) -> Matrix<S> {
    Matrix<S> out = Matrix<S>::Zero(E.dim(), B.rows());
    for (Index k = 0; k < q; ++k) out.noalias() += (E[k].entries().adjoint() * R.col(k)) * B.col(k).adjoint();
    return out;
  };
  const CglsResult result = cgls(forward, adjoint, targets, start, tol, max_iters);
  if (info != nullptr) *info = result;
  return start;
}

template <Scalar S>
LowRankResult<S> altmin_lowrap(ColumnwiseSource<S>& source, Index r, const LowRankConfig& cfg,
                               const Matrix<S>* truth) {
  cfg.validate();
  const auto first = source.next();
  return run_altmin(source, first, r, cfg, truth);
}

template <Scalar S>
LowRankResult<S> altmin_lowrap(const LrprInstance<S>& inst, const LowRankConfig& cfg, const Matrix<S>* truth) {
  FixedColumnwise<S> source(inst.ensembles, inst.observations);
  return altmin_lowrap(source, inst.r, cfg, truth);
}

template <Scalar S>
MatrixSolverReport<S> lrpr1_projected_gd(const LrprInstance<S>& inst, const LowRankConfig& cfg,
                                         const Matrix<S>* truth) {
  cfg.validate();
  const detail::Stopwatch clock;
  const auto& E = inst.ensembles;
  const Index n = E.dim();
  const Index q = E.size();
  const Index r = inst.r;
  check_truth(truth, n, q);
  if (r < 1 || r > std::min(n, q)) throw InvalidArgument("lrpr1_projected_gd: need 1 <= r <= min(n, q)");

  MatrixSolverReport<S> report;
  report.estimate = Matrix<S>::Zero(n, q);
  if (inst.observations.isZero(0.0)) {
    report.trace.push_back(kNaN);
    report.elapsed_ms.push_back(clock.elapsed_ms());
    report.termination = Termination::Degenerate;
    return report;
  }

  Matrix<S> U;
  try {
    U = lowrank_spectral_init(E, inst.observations, r, cfg.truncation);
  } catch (const DegenerateSpectrum&) {
    report.trace.push_back(truth ? error_or_nan<S>(report.estimate, *truth) : 1.0);
    report.elapsed_ms.push_back(clock.elapsed_ms());
    report.termination = Termination::Degenerate;
    return report;
  }
  std::vector<Observation> ys;
  ys.reserve(static_cast<std::size_t>(q));
  for (Index k = 0; k < q; ++k) ys.emplace_back(inst.observations.col(k));

  Matrix<S> X(n, q);
  for (Index k = 0; k < q; ++k) {
    const auto b0 = coefficient_init(projected(E[k], U), ys[static_cast<std::size_t>(k)], cfg.truncation);
    if (!b0) report.flagged_columns.push_back(k);
    X.col(k) = b0 ? Vector<S>(U * *b0) : Vector<S>::Zero(n);
  }
  const double fallback = X.squaredNorm() / static_cast<double>(q);
  RealVector mu(q);
  for (Index k = 0; k < q; ++k) {
    const double scale = X.col(k).squaredNorm();
    mu[k] = cfg.step_size / (scale > 0.0 ? scale : fallback);
  }

  report.estimate = X;
  report.trace.push_back(truth ? error_or_nan<S>(X, *truth) : 1.0);
  report.elapsed_ms.push_back(clock.elapsed_ms());
  report.termination = Termination::MaxIters;
  for (int t = 1; t <= cfg.max_iters; ++t) {
    Matrix<S> G(n, q);
    for (Index k = 0; k < q; ++k) {
      const Vector<S> xk = report.estimate.col(k);
      G.col(k) = xk - mu[k] * wf_direction(E[k], ys[static_cast<std::size_t>(k)], xk, cfg.gradient);
    }
    if (!G.allFinite()) {
      report.termination = Termination::Degenerate;
      break;
    }
    Matrix<S> next = project_rank_r<S>(G, r);
    if (!next.allFinite()) {
      report.termination = Termination::Degenerate;
      break;
    }
    const double change = matrix_change<S>(next, report.estimate);
    report.estimate = std::move(next);
    report.iterations = t;
    report.trace.push_back(truth ? error_or_nan<S>(report.estimate, *truth) : change);
    report.elapsed_ms.push_back(clock.elapsed_ms());
    if (change == 0.0 || change < cfg.tol) {
      report.termination = Termination::Converged;
      break;
    }
  }
  report.wall_ms = clock.elapsed_ms();
  return report;
}

template <Scalar S>
MatrixSolverReport<S> twf_columns(const LrprInstance<S>& inst, const SolverConfig& cfg, const Matrix<S>* truth) {
  cfg.validate();
  const detail::Stopwatch clock;
  const auto& E = inst.ensembles;
  const Index n = E.dim();
  const Index q = E.size();
  check_truth(truth, n, q);

  // One sweep over the columns counts as a single iteration.
  MatrixSolverReport<S> report;
  report.estimate = Matrix<S>::Zero(n, q);
  report.termination = Termination::Converged;
  report.iterations = 1;
  Matrix<S> start = Matrix<S>::Zero(n, q);
  for (Index k = 0; k < q; ++k) {
    const Observation y(inst.observations.col(k));
    const auto x0 = coefficient_init(E[k], y, cfg.truncation);
    if (!x0) {
      report.flagged_columns.push_back(k);
      continue;
    }
    start.col(k) = *x0;
    const auto sub = twf(E[k], y, *x0, cfg);
    report.estimate.col(k) = sub.estimate;
    if (sub.termination == Termination::Degenerate) {
      report.flagged_columns.push_back(k);
      report.termination = Termination::Degenerate;
    } else if (sub.termination == Termination::MaxIters && report.termination == Termination::Converged) {
      report.termination = Termination::MaxIters;
    }
  }
  if (truth) {
    report.trace = {error_or_nan<S>(start, *truth), error_or_nan<S>(report.estimate, *truth)};
  } else {
    report.trace = {1.0, matrix_change<S>(report.estimate, start)};
  }
  report.elapsed_ms = {0.0, clock.elapsed_ms()};
  report.wall_ms = clock.elapsed_ms();
  return report;
}

#define PHASEFORGE_INSTANTIATE(S)                                                                                  \
  template Matrix<S> project_rank_r<S>(const Matrix<S>&, Index);                                                  \
  template double right_incoherence<S>(const Matrix<S>&);                                                         \
  template LrprProblem<S> generate_lrpr_instance<S>(Index, Index, Index, Index, double, std::uint64_t);           \
  template Matrix<S> solve_u_update<S>(const ColumnwiseEnsemble<S>&, const Matrix<S>&, const Matrix<S>&,          \
                                       Matrix<S>, double, int, CglsResult*);                                      \
  template LowRankResult<S> altmin_lowrap<S>(ColumnwiseSource<S>&, Index, const LowRankConfig&, const Matrix<S>*); \
  template LowRankResult<S> altmin_lowrap<S>(const LrprInstance<S>&, const LowRankConfig&, const Matrix<S>*);     \
  template MatrixSolverReport<S> lrpr1_projected_gd<S>(const LrprInstance<S>&, const LowRankConfig&,              \
                                                       const Matrix<S>*);                                         \
  template MatrixSolverReport<S> twf_columns<S>(const LrprInstance<S>&, const SolverConfig&, const Matrix<S>*);

PHASEFORGE_INSTANTIATE(double)
PHASEFORGE_INSTANTIATE(Complex)

}  // namespace phaseforge
