#pragma once

#include <vector>

#include "phaseforge/solver.hpp"

namespace phaseforge {

/// X = U B with U n x r orthonormal and B r x q. (U R, R' B) is the same estimate
/// for any r x r unitary R, so compare X or span(U), never the factors.
template <Scalar S>
struct LowRankEstimate {
  Matrix<S> U;
  Matrix<S> B;

  Matrix<S> matrix() const { return U * B; }
};

template <Scalar S>
struct LrprInstance {
  ColumnwiseEnsemble<S> ensembles;
  RealMatrix observations;  // m x q
  Index r = 1;
};

/// A generated ground truth with its measurements.
template <Scalar S>
struct LrprProblem {
  Matrix<S> truth;       // n x q
  Matrix<S> U;           // n x r orthonormal basis of the column space
  RealVector singular_values;
  double incoherence = 0.0;
  LrprInstance<S> instance;
};

/// Best rank-r approximation by truncated SVD.
template <Scalar S>
Matrix<S> project_rank_r(const Matrix<S>& M, Index r);

/// q max_k ||x_k||^2 / ||X||_F^2; equals 1 for perfectly flat column energies.
template <Scalar S>
double right_incoherence(const Matrix<S>& X);

inline constexpr double kIncoherenceBound = 3.0;
inline constexpr int kMaxIncoherenceRejections = 10;

/// X = U diag(s) V' with s linearly spaced from 1 down to 1/condition. U is an
/// orthonormalized Gaussian block. V orthonormalizes a block whose rows are
/// normalized Gaussian rows (uniform directions), which keeps column energies
/// within r s_1^2 / sum s^2 of flat before orthonormalization. Gaussian rows
/// themselves almost never meet the bound once q >> r. V is redrawn while
/// right_incoherence(X) > 3; GenerationError after kMaxIncoherenceRejections
/// draws. Column k is measured with ensemble stream k.
template <Scalar S>
LrprProblem<S> generate_lrpr_instance(Index n, Index q, Index r, Index m, double condition, std::uint64_t seed);

struct LowRankConfig {
  int max_iters = 100;
  double tol = 1e-10;  // on matrix_phase_error between successive estimates
  bool sample_splitting = false;
  bool split_substeps = false;  // fresh ensembles for the U-update as well
  TruncationRule truncation;    // Y_U and per-column initializations
  SolverConfig column = column_defaults();  // r-dimensional coefficient sub-solver
  double ls_tol = 1e-10;
  int ls_max_iters = 0;  // 0 means 10 n r
  double step_size = 0.35;  // projected gradient step
  GradientTruncation gradient{0.0, 2.5};

  static SolverConfig column_defaults();
  void validate() const;
};

template <Scalar S>
struct MatrixSolverReport {
  Matrix<S> estimate;
  std::vector<double> trace;  // matrix_phase_error to the truth, or the successive change
  std::vector<double> elapsed_ms;
  int iterations = 0;
  Termination termination = Termination::MaxIters;
  double wall_ms = 0.0;
  std::vector<Index> flagged_columns;  // columns whose coefficient problem degenerated
};

template <Scalar S>
struct LowRankResult {
  LowRankEstimate<S> factors;
  MatrixSolverReport<S> report;
};

/// Alternating minimization over the subspace U, coefficients b_k and phases
/// C_k. Coefficients come from an r-dimensional truncated WF per column, cold
/// started from its own spectral estimate; U from the joint least-squares fit
/// min sum_k ||C_k y_k - A_k U b_k|| followed by QR.
template <Scalar S>
LowRankResult<S> altmin_lowrap(const LrprInstance<S>& inst, const LowRankConfig& cfg,
                               const Matrix<S>* truth = nullptr);

template <Scalar S>
LowRankResult<S> altmin_lowrap(ColumnwiseSource<S>& source, Index r, const LowRankConfig& cfg,
                               const Matrix<S>* truth = nullptr);

/// One truncated-WF step per column followed by projection onto rank r.
template <Scalar S>
MatrixSolverReport<S> lrpr1_projected_gd(const LrprInstance<S>& inst, const LowRankConfig& cfg,
                                         const Matrix<S>* truth = nullptr);

/// Baseline without rank sharing: twf on every column independently.
template <Scalar S>
MatrixSolverReport<S> twf_columns(const LrprInstance<S>& inst, const SolverConfig& cfg,
                                  const Matrix<S>* truth = nullptr);

/// argmin_U sum_k ||targets_k - A_k U b_k||^2 by matrix-free CGLS from `start`.
template <Scalar S>
Matrix<S> solve_u_update(const ColumnwiseEnsemble<S>& E, const Matrix<S>& targets, const Matrix<S>& B,
                         Matrix<S> start, double tol, int max_iters, CglsResult* info = nullptr);

}  // namespace phaseforge
