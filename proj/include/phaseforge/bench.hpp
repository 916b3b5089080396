#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "phaseforge/lowrank.hpp"
#include "phaseforge/sparse.hpp"

namespace phaseforge::bench {

enum class Problem { Unstructured, Sparse, LowRank };

std::string_view to_string(Problem p);
Problem parse_problem(std::string_view text);

/// Solvers available for each problem class.
std::vector<std::string_view> solver_names(Problem p);

/// Optional per-solver settings; unset fields keep the solver's own defaults.
struct SolverOverrides {
  std::optional<int> max_iters;
  std::optional<double> tol;
  std::optional<double> step_size;
  std::optional<bool> sample_splitting;
  std::optional<TruncationRule> truncation;
  std::optional<double> alpha_lb;
  std::optional<double> alpha_ub;
  std::optional<double> ls_tol;
  std::optional<int> ls_max_iters;
  std::optional<bool> split_substeps;
  std::optional<int> column_max_iters;
  std::optional<double> column_step_size;
  std::optional<int> cosamp_max_iters;
};

struct ExperimentConfig {
  Problem problem = Problem::Unstructured;
  std::string solver = "twf";
  ScalarField field = ScalarField::Real;
  Index n = 32;
  Index q = 1;
  Index r = 1;
  Index s = 1;
  std::vector<Index> m_grid;
  int trials = 10;
  std::uint64_t seed = 0;
  double threshold = 1e-4;
  double condition = 2.0;  // low-rank singular value spread
  SolverOverrides overrides;
  std::string output;  // empty writes to stdout
  bool timing = false;  // off keeps the CSV a pure function of the config
  int threads = 1;
  Index trace_m = 0;  // 0 means the first grid entry
  int trace_trial = 0;

  /// Throws ConfigError.
  void validate() const;
};

/// Builds a config from TOML text, then applies `key=value` overrides. Dotted
/// keys address tables ("solver.step_size=0.2"); values parse as TOML and fall
/// back to a bare string. Unknown keys and solver names raise ConfigError.
ExperimentConfig load_config(std::string_view toml_text, const std::vector<std::string>& sets = {});
ExperimentConfig load_config_file(const std::string& path, const std::vector<std::string>& sets = {});

/// mix64(base ^ mix64((m << 32) ^ trial)).
std::uint64_t trial_seed(std::uint64_t base, Index m, int trial);

struct TrialResult {
  double error = 1.0;
  int iterations = 0;
  double ms = 0.0;
  Termination termination = Termination::MaxIters;
  bool init_failed = false;
  std::vector<double> trace;
  std::vector<double> elapsed_ms;
};

/// One seeded instance of the configured problem at m measurements.
TrialResult run_trial(const ExperimentConfig& cfg, Index m, int trial);

struct CellResult {
  Index m = 0;
  Index n = 0;
  Index q = 0;
  Index r = 0;
  Index s = 0;
  int successes = 0;
  int trials = 0;
  double mean_err = 0.0;
  double median_err = 0.0;
  double mean_iters = 0.0;
  double mean_ms = 0.0;
};

std::vector<CellResult> run_phase_transition(const ExperimentConfig& cfg);

void write_phase_transition_csv(std::ostream& out, const ExperimentConfig& cfg, const std::vector<CellResult>& cells);
void write_trace_csv(std::ostream& out, const ExperimentConfig& cfg, const TrialResult& trial);

inline constexpr std::string_view kPhaseTransitionHeader =
    "problem,solver,n,q,r,s,m,trials,successes,mean_err,median_err,mean_iters,mean_ms";
inline constexpr std::string_view kTraceHeader = "iter,err,ms";

/// Instance material for `gen`: the same draws a trial of (m, trial) uses.
template <Scalar S>
struct VectorInstance {
  Vector<S> truth;
  SensingEnsemble<S> ensemble;
  Observation observation;
};

template <Scalar S>
VectorInstance<S> make_vector_instance(const ExperimentConfig& cfg, Index m, std::uint64_t seed);

/// Runs a vector solver on given data. Throws DegenerateSpectrum or
/// DegenerateInput if the initialization does not exist.
template <Scalar S>
SparseSolverReport<S> solve_vector(const ExperimentConfig& cfg, const SensingEnsemble<S>& A, const Observation& y,
                                   const Vector<S>* truth);

}  // namespace phaseforge::bench
