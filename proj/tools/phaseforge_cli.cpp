#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "phaseforge/bench.hpp"
#include "phaseforge/errors.hpp"
#include "phaseforge/io.hpp"

namespace fs = std::filesystem;
namespace pb = phaseforge::bench;
using namespace phaseforge;

namespace {

enum Exit { kOk = 0, kFailure = 1, kUsage = 2, kConfig = 3, kDegenerate = 4 };

struct Common {
  std::string config_path;
  std::string out;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  bool timing = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "TOML experiment file")->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "output path (default: stdout)");
  cmd->add_option("--threads", c.threads, "worker threads (fallback: PHASEFORGE_THREADS)")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", c.seed, "base seed");
  cmd->add_option("--set", c.sets, "override, e.g. params.step_size=0.2")->take_all();
  cmd->add_flag("--timing", c.timing, "report wall times (makes output run-dependent)");
}

std::optional<int> env_threads() {
  const char* raw = std::getenv("PHASEFORGE_THREADS");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  try {
    const int k = std::stoi(raw);
    if (k >= 1) return k;
  } catch (const std::exception&) {
  }
  throw ConfigError(std::string("PHASEFORGE_THREADS must be a positive integer, got '") + raw + "'");
}

pb::ExperimentConfig load(const Common& c, std::vector<std::string> extra_sets = {}) {
  std::vector<std::string> sets = c.sets;
  sets.insert(sets.end(), extra_sets.begin(), extra_sets.end());
  if (!c.threads) {
    if (auto k = env_threads()) sets.push_back("threads=" + std::to_string(*k));
  }
  auto cfg = c.config_path.empty() ? pb::load_config("", sets) : pb::load_config_file(c.config_path, sets);
  if (c.threads) cfg.threads = *c.threads;
  if (c.seed) cfg.seed = *c.seed;
  if (!c.out.empty()) cfg.output = c.out;
  if (c.timing) cfg.timing = true;
  cfg.validate();
  return cfg;
}

template <typename Writer>
void emit(const std::string& path, Writer&& write) {
  if (path.empty()) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file '" + path + "'");
  write(out);
}

int run_phase_transition(const Common& c) {
  const auto cfg = load(c);
  const auto cells = pb::run_phase_transition(cfg);
  emit(cfg.output, [&](std::ostream& out) { pb::write_phase_transition_csv(out, cfg, cells); });
  return kOk;
}

int run_trace(const Common& c) {
  const auto cfg = load(c);
  const Index m = cfg.trace_m > 0 ? cfg.trace_m : cfg.m_grid.front();
  const auto trial = pb::run_trial(cfg, m, cfg.trace_trial);
  emit(cfg.output, [&](std::ostream& out) { pb::write_trace_csv(out, cfg, trial); });
  if (trial.init_failed) std::cerr << "initialization failed; no iterate produced\n";
  return trial.termination == Termination::Degenerate ? kDegenerate : kOk;
}

struct SolveArgs {
  std::string solver;
  std::string ensemble;
  std::string observations;
  std::string truth;
  Index s = 0;
};

RealVector as_observations(const io::AnyMatrix& any) {
  const RealMatrix y = io::as<double>(any);
  if (y.cols() != 1 && y.rows() != 1) throw InvalidArgument("observations must be a single row or column");
  return Eigen::Map<const RealVector>(y.data(), y.size());
}

template <Scalar S>
int solve_in(const pb::ExperimentConfig& cfg, const io::AnyMatrix& ensemble, const RealVector& y,
             const std::string& truth_path) {
  auto A = SensingEnsemble<S>::from_matrix(RowMajorMatrix<S>(io::as<S>(ensemble)));
  if (A.rows() != y.size()) throw InvalidArgument("ensemble rows do not match the observation count");
  std::optional<Vector<S>> truth;
  if (!truth_path.empty()) {
    const Matrix<S> t = io::as<S>(io::read_matrix(truth_path));
    if (t.cols() != 1 || t.rows() != A.cols()) throw InvalidArgument("truth must be an n x 1 column");
    truth = t.col(0);
  }
  const auto report = pb::solve_vector<S>(cfg, A, Observation(y), truth ? &*truth : nullptr);
  io::write_matrix(cfg.output, io::AnyMatrix(Matrix<S>(report.estimate)));
  std::cout << "termination " << to_string(report.termination) << ", iterations " << report.iterations << '\n';
  if (truth) std::cout << "relative error " << io::format_real(relative_phase_error<S>(report.estimate, *truth)) << '\n';
  return report.termination == Termination::Degenerate ? kDegenerate : kOk;
}

int run_solve(const Common& c, const SolveArgs& a) {
  const auto ensemble = io::read_matrix(a.ensemble);
  const RealVector y = as_observations(io::read_matrix(a.observations));
  const auto dims = std::visit([](const auto& m) { return std::pair<Index, Index>(m.rows(), m.cols()); }, ensemble);

  bool sparse = false;
  for (auto name : pb::solver_names(pb::Problem::Sparse)) sparse = sparse || name == a.solver;
  std::vector<std::string> sets = {"solver=\"" + a.solver + "\"",
                                   std::string("problem=") + (sparse ? "\"sparse\"" : "\"unstructured\""),
                                   "n=" + std::to_string(dims.second), "m=[" + std::to_string(dims.first) + "]"};
  if (a.s > 0) sets.push_back("s=" + std::to_string(a.s));
  const auto cfg = load(c, sets);
  if (cfg.output.empty()) throw ConfigError("solve needs --out");
  if (io::field_of_matrix(ensemble) == ScalarField::Real) return solve_in<double>(cfg, ensemble, y, a.truth);
  return solve_in<Complex>(cfg, ensemble, y, a.truth);
}

struct GenArgs {
  std::string dir;
  Index m = 0;
  int trial = 0;
  std::string format = "csv";
};

template <Scalar S>
void gen_in(const pb::ExperimentConfig& cfg, const GenArgs& g) {
  const fs::path dir(g.dir);
  fs::create_directories(dir);
  const std::string ext = g.format == "csv" ? ".csv" : ".bin";
  const std::uint64_t seed = pb::trial_seed(cfg.seed, g.m, g.trial);
  if (cfg.problem == pb::Problem::LowRank) {
    const auto p = generate_lrpr_instance<S>(cfg.n, cfg.q, cfg.r, g.m, cfg.condition, seed);
    io::write_matrix(dir / ("truth" + ext), io::AnyMatrix(p.truth));
    for (Index k = 0; k < p.instance.ensembles.size(); ++k) {
      const Matrix<S> Ak = p.instance.ensembles[k].entries();
      io::write_matrix(dir / ("ensemble_" + std::to_string(k) + ext), io::AnyMatrix(Ak));
    }
    io::write_matrix(dir / ("observations" + ext), io::AnyMatrix(p.instance.observations));
    return;
  }
  const auto inst = pb::make_vector_instance<S>(cfg, g.m, seed);
  io::write_matrix(dir / ("truth" + ext), io::AnyMatrix(Matrix<S>(inst.truth)));
  io::write_matrix(dir / ("ensemble" + ext), io::AnyMatrix(Matrix<S>(inst.ensemble.entries())));
  io::write_matrix(dir / ("observations" + ext), io::AnyMatrix(RealMatrix(inst.observation.values())));
}

int run_gen(const Common& c, GenArgs g) {
  const auto cfg = load(c, {"m=[" + std::to_string(g.m) + "]"});
  if (cfg.field == ScalarField::Real) {
    gen_in<double>(cfg, g);
  } else {
    gen_in<Complex>(cfg, g);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured phase retrieval solvers and benchmarks"};
  app.require_subcommand(1);

  Common pt_opts, trace_opts, solve_opts, gen_opts;
  auto* pt = app.add_subcommand("phase-transition", "success rate over an m grid");
  add_common(pt, pt_opts);
  auto* trace = app.add_subcommand("trace", "per-iteration error of one trial");
  add_common(trace, trace_opts);

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "run a vector solver on ensemble/observation files");
  add_common(solve, solve_opts);
  solve->add_option("--solver", solve_args.solver, "solver name")->required();
  solve->add_option("--ensemble", solve_args.ensemble, "m x n ensemble file")->required()->check(CLI::ExistingFile);
  solve->add_option("--observations", solve_args.observations, "magnitudes, one per row")
      ->required()
      ->check(CLI::ExistingFile);
  solve->add_option("--truth", solve_args.truth, "ground truth for the error report")->check(CLI::ExistingFile);
  solve->add_option("--s", solve_args.s, "sparsity for sparse solvers")->check(CLI::PositiveNumber);

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "write one generated instance to files");
  add_common(gen, gen_opts);
  gen->add_option("--dir", gen_args.dir, "output directory")->required();
  gen->add_option("--m", gen_args.m, "measurements per signal")->required()->check(CLI::PositiveNumber);
  gen->add_option("--trial", gen_args.trial, "trial index")->check(CLI::NonNegativeNumber);
  gen->add_option("--format", gen_args.format, "csv or bin")->check(CLI::IsMember({"csv", "bin"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*pt) return run_phase_transition(pt_opts);
    if (*trace) return run_trace(trace_opts);
    if (*solve) return run_solve(solve_opts, solve_args);
    if (*gen) return run_gen(gen_opts, gen_args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfig;
  } catch (const DegenerateSpectrum& e) {
    std::cerr << "degenerate: " << e.what() << '\n';
    return kDegenerate;
  } catch (const DegenerateInput& e) {
    std::cerr << "degenerate: " << e.what() << '\n';
    return kDegenerate;
  } catch (const GenerationError& e) {
    std::cerr << "generation failed: " << e.what() << '\n';
    return kDegenerate;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
