#include "phaseforge/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <toml.hpp>

#include "phaseforge/errors.hpp"
#include "phaseforge/io.hpp"
#include "phaseforge/rng.hpp"
#include "phaseforge/unstructured.hpp"

namespace phaseforge::bench {

namespace {

constexpr std::string_view kUnstructuredSolvers[] = {"wf", "twf", "altmin_phase"};
constexpr std::string_view kSparseSolvers[] = {"thresh_wf", "copram", "altmin_sparse"};
constexpr std::string_view kLowRankSolvers[] = {"altmin_lowrap", "lrpr1", "twf_columns"};

// Solvers that consume a measurement source and so can draw fresh samples.
bool supports_splitting(std::string_view solver) {
  return solver == "altmin_phase" || solver == "copram" || solver == "altmin_sparse" || solver == "altmin_lowrap";
}

// ---- TOML plumbing ---------------------------------------------------------

[[noreturn]] void config_error(const std::string& what) { throw ConfigError(what); }

std::int64_t get_int(const toml::node& node, const std::string& key) {
  if (auto v = node.value_exact<std::int64_t>()) return *v;
  config_error("'" + key + "' must be an integer");
}

double get_double(const toml::node& node, const std::string& key) {
  if (auto v = node.value_exact<double>()) return *v;
  if (auto v = node.value_exact<std::int64_t>()) return static_cast<double>(*v);
  config_error("'" + key + "' must be a number");
}

bool get_bool(const toml::node& node, const std::string& key) {
  if (auto v = node.value_exact<bool>()) return *v;
  config_error("'" + key + "' must be a boolean");
}

std::string get_string(const toml::node& node, const std::string& key) {
  if (auto v = node.value_exact<std::string>()) return *v;
  config_error("'" + key + "' must be a string");
}

Index get_dim(const toml::node& node, const std::string& key) {
  const auto v = get_int(node, key);
  if (v < 1) config_error("'" + key + "' must be at least 1");
  return static_cast<Index>(v);
}

const toml::table& get_table(const toml::node& node, const std::string& key) {
  if (const auto* t = node.as_table()) return *t;
  config_error("'" + key + "' must be a table");
}

// "key=value": value parsed as a TOML value, else taken as a bare string.
void apply_set(toml::table& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) config_error("--set expects key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);

  std::vector<std::string> path;
  std::stringstream ss(key);
  for (std::string part; std::getline(ss, part, '.');) {
    if (part.empty()) config_error("malformed key '" + key + "'");
    path.push_back(part);
  }

  toml::table* where = &root;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    auto [it, inserted] = where->emplace(path[i], toml::table{});
    where = it->second.as_table();
    if (where == nullptr) config_error("'" + path[i] + "' is not a table");
  }

  toml::table parsed;
  try {
    parsed = toml::parse("v = " + text);
  } catch (const toml::parse_error&) {
    parsed.insert_or_assign("v", text);
  }
  where->insert_or_assign(path.back(), *parsed.get("v"));
}

TruncationRule parse_truncation(const toml::node& node) {
  if (auto text = node.value_exact<std::string>()) {
    if (*text == "none") return TruncationRule::none();
    config_error("params.truncation must be \"none\" or a positive number");
  }
  const double c = get_double(node, "params.truncation");
  if (!(c > 0.0)) config_error("params.truncation must be positive");
  return TruncationRule::mean_multiple(c);
}

SolverOverrides parse_overrides(const toml::table& t) {
  SolverOverrides o;
  for (const auto& [k, node] : t) {
    const std::string key(k.str());
    const std::string full = "params." + key;
    if (key == "max_iters") o.max_iters = static_cast<int>(get_dim(node, full));
    else if (key == "tol") o.tol = get_double(node, full);
    else if (key == "step_size") o.step_size = get_double(node, full);
    else if (key == "sample_splitting") o.sample_splitting = get_bool(node, full);
    else if (key == "truncation") o.truncation = parse_truncation(node);
    else if (key == "alpha_lb") o.alpha_lb = get_double(node, full);
    else if (key == "alpha_ub") o.alpha_ub = get_double(node, full);
    else if (key == "ls_tol") o.ls_tol = get_double(node, full);
    else if (key == "ls_max_iters") o.ls_max_iters = static_cast<int>(get_int(node, full));
    else if (key == "split_substeps") o.split_substeps = get_bool(node, full);
    else if (key == "column_max_iters") o.column_max_iters = static_cast<int>(get_dim(node, full));
    else if (key == "column_step_size") o.column_step_size = get_double(node, full);
    else if (key == "cosamp_max_iters") o.cosamp_max_iters = static_cast<int>(get_dim(node, full));
    else config_error("unknown key '" + full + "'");
  }
  return o;
}

// ---- solver configuration --------------------------------------------------

SolverConfig vector_config(const ExperimentConfig& cfg) {
  SolverConfig c;
  if (cfg.solver == "twf" || cfg.solver == "twf_columns") c = twf_config();
  if (cfg.solver == "thresh_wf") c = thresh_wf_config();
  const auto& o = cfg.overrides;
  if (o.max_iters) c.max_iters = *o.max_iters;
  if (o.tol) c.tol = *o.tol;
  if (o.step_size) c.step_size = *o.step_size;
  if (o.sample_splitting) c.sample_splitting = *o.sample_splitting;
  if (o.truncation) c.truncation = *o.truncation;
  if (o.alpha_lb) c.gradient.alpha_lb = *o.alpha_lb;
  if (o.alpha_ub) c.gradient.alpha_ub = *o.alpha_ub;
  if (o.ls_tol) c.ls_tol = *o.ls_tol;
  return c;
}

LowRankConfig lowrank_config(const ExperimentConfig& cfg) {
  LowRankConfig c;
  const auto& o = cfg.overrides;
  if (o.max_iters) c.max_iters = *o.max_iters;
  if (o.tol) c.tol = *o.tol;
  if (o.step_size) c.step_size = *o.step_size;
  if (o.sample_splitting) c.sample_splitting = *o.sample_splitting;
  if (o.split_substeps) c.split_substeps = *o.split_substeps;
  if (o.truncation) c.truncation = *o.truncation;
  if (o.alpha_lb) c.gradient.alpha_lb = *o.alpha_lb;
  if (o.alpha_ub) c.gradient.alpha_ub = *o.alpha_ub;
  if (o.ls_tol) c.ls_tol = *o.ls_tol;
  if (o.ls_max_iters) c.ls_max_iters = *o.ls_max_iters;
  if (o.column_max_iters) c.column.max_iters = *o.column_max_iters;
  if (o.column_step_size) c.column.step_size = *o.column_step_size;
  return c;
}

CosampConfig cosamp_config(const ExperimentConfig& cfg) {
  CosampConfig c;
  if (cfg.overrides.cosamp_max_iters) c.max_iters = *cfg.overrides.cosamp_max_iters;
  return c;
}

void check_applicable(const ExperimentConfig& cfg) {
  const auto& o = cfg.overrides;
  const bool lowrank = cfg.problem == Problem::LowRank && cfg.solver != "twf_columns";
  auto reject = [&](bool present, std::string_view key) {
    if (present) config_error("params." + std::string(key) + " does not apply to solver " + cfg.solver);
  };
  reject(o.sample_splitting.value_or(false) && !supports_splitting(cfg.solver), "sample_splitting");
  reject(o.split_substeps.has_value() && cfg.solver != "altmin_lowrap", "split_substeps");
  reject((o.ls_max_iters || o.column_max_iters || o.column_step_size) && !lowrank, "ls_max_iters/column_*");
  reject(o.cosamp_max_iters.has_value() && cfg.solver != "copram", "cosamp_max_iters");
  reject(o.truncation.has_value() && cfg.problem == Problem::Sparse, "truncation");
  try {
    if (lowrank) {
      lowrank_config(cfg).validate();
    } else {
      vector_config(cfg).validate();
    }
  } catch (const InvalidArgument& e) {
    config_error(std::string("params: ") + e.what());
  }
}

// ---- instances -------------------------------------------------------------

template <Scalar S>
Vector<S> gaussian_vector(Index n, std::uint64_t seed, std::uint64_t stream) {
  const GaussianStream gauss(seed, Domain::Signal, stream);
  Vector<S> x(n);
  for (Index i = 0; i < n; ++i) {
    if constexpr (std::same_as<S, double>) {
      x[i] = gauss.at(static_cast<std::uint64_t>(i));
    } else {
      x[i] = std::sqrt(0.5) * Complex(gauss.at(2 * static_cast<std::uint64_t>(i)),
                                      gauss.at(2 * static_cast<std::uint64_t>(i) + 1));
    }
  }
  return x;
}

// Uniform s-subset by partial Fisher-Yates, Gaussian values on it.
template <Scalar S>
Vector<S> sparse_vector(Index n, Index s, std::uint64_t seed) {
  const GaussianStream uniforms(seed, Domain::Signal, 1);
  std::vector<Index> perm(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  for (Index i = 0; i < s; ++i) {
    const auto span = static_cast<double>(n - i);
    const Index j = i + std::min<Index>(static_cast<Index>(uniforms.uniform_at(static_cast<std::uint64_t>(i)) * span),
                                        n - i - 1);
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  const Vector<S> values = gaussian_vector<S>(s, seed, 0);
  Vector<S> x = Vector<S>::Zero(n);
  for (Index i = 0; i < s; ++i) x[perm[static_cast<std::size_t>(i)]] = values[i];
  return x;
}

template <Scalar S>
TrialResult from_report(const SolverReport<S>& report, double error) {
  TrialResult out;
  out.error = error;
  out.iterations = report.iterations;
  out.ms = report.wall_ms;
  out.termination = report.termination;
  out.trace = report.trace;
  out.elapsed_ms = report.elapsed_ms;
  return out;
}

TrialResult init_failure() {
  TrialResult out;
  out.error = 1.0;  // the zero estimate
  out.termination = Termination::Degenerate;
  out.init_failed = true;
  out.trace = {1.0};
  out.elapsed_ms = {0.0};
  return out;
}

template <Scalar S>
SparseSolverReport<S> dispatch_vector(const ExperimentConfig& cfg, const SensingEnsemble<S>& A, const Observation& y,
                                      MeasurementSource<S>* fresh, const Vector<S>* truth) {
  const SolverConfig sc = vector_config(cfg);
  auto wrap = [](SolverReport<S> r) {
    SparseSolverReport<S> out;
    static_cast<SolverReport<S>&>(out) = std::move(r);
    return out;
  };
  FixedMeasurements<S> fixed(A, y);
  MeasurementSource<S>& source = sc.sample_splitting && fresh != nullptr ? *fresh : fixed;
  if (sc.sample_splitting && fresh == nullptr) config_error("sample splitting needs a generated instance");

  const std::string& name = cfg.solver;
  if (name == "wf" || name == "twf" || name == "altmin_phase") {
    if (sc.sample_splitting) source.next();  // the init draw
    const Vector<S> x0 = spectral_init(A, y, sc.truncation);
    if (name == "wf") return wrap(wf(A, y, x0, sc, truth));
    if (name == "twf") return wrap(twf(A, y, x0, sc, truth));
    return wrap(altmin_phase(source, x0, sc, truth));
  }
  if (name == "thresh_wf") return thresh_wf(A, y, cfg.s, sc, truth);
  if (name == "copram") return copram(source, cfg.s, sc, truth, cosamp_config(cfg));
  if (name == "altmin_sparse") return altmin_sparse(source, cfg.s, sc, truth);
  config_error("unknown solver '" + name + "'");
}

template <Scalar S>
TrialResult run_vector_trial(const ExperimentConfig& cfg, Index m, std::uint64_t seed) {
  auto inst = make_vector_instance<S>(cfg, m, seed);
  FreshMeasurements<S> fresh(inst.truth, m, seed);
  try {
    const auto report = dispatch_vector<S>(cfg, inst.ensemble, inst.observation, &fresh, &inst.truth);
    return from_report<S>(report, relative_phase_error<S>(report.estimate, inst.truth));
  } catch (const DegenerateSpectrum&) {
    return init_failure();
  } catch (const DegenerateInput&) {
    return init_failure();
  }
}

template <Scalar S>
TrialResult from_matrix_report(const MatrixSolverReport<S>& report, double error) {
  TrialResult out;
  out.error = error;
  out.iterations = report.iterations;
  out.ms = report.wall_ms;
  out.termination = report.termination;
  out.trace = report.trace;
  out.elapsed_ms = report.elapsed_ms;
  return out;
}

template <Scalar S>
TrialResult run_lowrank_trial(const ExperimentConfig& cfg, Index m, std::uint64_t seed) {
  const auto problem = generate_lrpr_instance<S>(cfg.n, cfg.q, cfg.r, m, cfg.condition, seed);
  const auto& inst = problem.instance;
  const Matrix<S>* truth = &problem.truth;
  MatrixSolverReport<S> report;
  if (cfg.solver == "altmin_lowrap") {
    const LowRankConfig lc = lowrank_config(cfg);
    if (lc.sample_splitting) {
      // Draw 0 reproduces the instance; later draws are fresh.
      FreshColumnwise<S> fresh(problem.truth, m, seed);
      report = altmin_lowrap(fresh, cfg.r, lc, truth).report;
    } else {
      report = altmin_lowrap(inst, lc, truth).report;
    }
  } else if (cfg.solver == "lrpr1") {
    report = lrpr1_projected_gd(inst, lowrank_config(cfg), truth);
  } else {
    report = twf_columns(inst, vector_config(cfg), truth);
  }
  return from_matrix_report<S>(report, matrix_phase_error<S>(report.estimate, problem.truth));
}

template <Scalar S>
TrialResult run_trial_in(const ExperimentConfig& cfg, Index m, int trial) {
  const std::uint64_t seed = trial_seed(cfg.seed, m, trial);
  if (cfg.problem == Problem::LowRank) {
    try {
      return run_lowrank_trial<S>(cfg, m, seed);
    } catch (const DegenerateSpectrum&) {
      return init_failure();
    }
  }
  return run_vector_trial<S>(cfg, m, seed);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 == 1 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

}  // namespace

std::string_view to_string(Problem p) {
  switch (p) {
    case Problem::Unstructured:
      return "unstructured";
    case Problem::Sparse:
      return "sparse";
    case Problem::LowRank:
      return "lowrank";
  }
  return "unknown";
}

Problem parse_problem(std::string_view text) {
  if (text == "unstructured") return Problem::Unstructured;
  if (text == "sparse") return Problem::Sparse;
  if (text == "lowrank") return Problem::LowRank;
  throw ConfigError("unknown problem '" + std::string(text) + "'");
}

std::vector<std::string_view> solver_names(Problem p) {
  switch (p) {
    case Problem::Unstructured:
      return {std::begin(kUnstructuredSolvers), std::end(kUnstructuredSolvers)};
    case Problem::Sparse:
      return {std::begin(kSparseSolvers), std::end(kSparseSolvers)};
    case Problem::LowRank:
      return {std::begin(kLowRankSolvers), std::end(kLowRankSolvers)};
  }
  return {};
}

void ExperimentConfig::validate() const {
  const auto names = solver_names(problem);
  if (std::find(names.begin(), names.end(), solver) == names.end()) {
    config_error("unknown solver '" + solver + "' for problem " + std::string(to_string(problem)));
  }
  if (n < 1) config_error("n must be at least 1");
  if (m_grid.empty()) config_error("m grid is empty");
  for (Index m : m_grid) {
    if (m < 1) config_error("every m must be at least 1");
  }
  if (trials < 1) config_error("trials must be at least 1");
  if (!(threshold > 0.0 && threshold < 1.0)) config_error("threshold must lie in (0, 1)");
  if (threads < 1) config_error("threads must be at least 1");
  if (problem == Problem::Sparse && (s < 1 || s > n)) config_error("need 1 <= s <= n");
  if (problem == Problem::LowRank) {
    if (q < 1) config_error("q must be at least 1");
    if (r < 1 || r > std::min(n, q)) config_error("need 1 <= r <= min(n, q)");
    if (!(condition >= 1.0)) config_error("condition must be at least 1");
  }
  if (trace_m < 0 || trace_trial < 0) config_error("trace m and trial must be nonnegative");
  check_applicable(*this);
}

ExperimentConfig load_config(std::string_view toml_text, const std::vector<std::string>& sets) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "config parse error: " << e.description() << " at line " << e.source().begin.line;
    config_error(msg.str());
  }
  for (const auto& s : sets) apply_set(root, s);

  ExperimentConfig cfg;
  std::optional<std::vector<double>> multiples;
  for (const auto& [k, node] : root) {
    const std::string key(k.str());
    if (key == "problem") cfg.problem = parse_problem(get_string(node, key));
    else if (key == "solver") cfg.solver = get_string(node, key);
    else if (key == "field") {
      try {
        cfg.field = parse_field(get_string(node, key));
      } catch (const InvalidArgument& e) {
        config_error(e.what());
      }
    }
    else if (key == "n") cfg.n = get_dim(node, key);
    else if (key == "q") cfg.q = get_dim(node, key);
    else if (key == "r") cfg.r = get_dim(node, key);
    else if (key == "s") cfg.s = get_dim(node, key);
    else if (key == "m" || key == "m_multiples") {
      const auto* arr = node.as_array();
      if (arr == nullptr) config_error("'" + key + "' must be an array");
      std::vector<double> values;
      for (const auto& item : *arr) values.push_back(key == "m" ? static_cast<double>(get_dim(item, key))
                                                                : get_double(item, key));
      if (key == "m") {
        cfg.m_grid.clear();
        for (double v : values) cfg.m_grid.push_back(static_cast<Index>(v));
      } else {
        multiples = values;
      }
    }
    else if (key == "trials") cfg.trials = static_cast<int>(get_dim(node, key));
    else if (key == "seed") {
      const auto v = get_int(node, key);
      if (v < 0) config_error("seed must be nonnegative");
      cfg.seed = static_cast<std::uint64_t>(v);
    }
    else if (key == "threshold") cfg.threshold = get_double(node, key);
    else if (key == "condition") cfg.condition = get_double(node, key);
    else if (key == "output") cfg.output = get_string(node, key);
    else if (key == "timing") cfg.timing = get_bool(node, key);
    else if (key == "threads") cfg.threads = static_cast<int>(get_dim(node, key));
    else if (key == "params") cfg.overrides = parse_overrides(get_table(node, key));
    else if (key == "trace") {
      for (const auto& [tk, tnode] : get_table(node, key)) {
        const std::string tkey(tk.str());
        if (tkey == "m") cfg.trace_m = get_dim(tnode, "trace.m");
        else if (tkey == "trial") cfg.trace_trial = static_cast<int>(get_int(tnode, "trace.trial"));
        else config_error("unknown key 'trace." + tkey + "'");
      }
    }
    else config_error("unknown key '" + key + "'");
  }
  if (root.contains("m") && multiples) config_error("give either m or m_multiples, not both");
  if (multiples) {
    cfg.m_grid.clear();
    for (double f : *multiples) {
      if (!(f > 0.0)) config_error("m_multiples must be positive");
      cfg.m_grid.push_back(std::max<Index>(1, static_cast<Index>(std::llround(f * static_cast<double>(cfg.n)))));
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path, const std::vector<std::string>& sets) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return load_config(text.str(), sets);
}

std::uint64_t trial_seed(std::uint64_t base, Index m, int trial) {
  return mix64(base ^ mix64((static_cast<std::uint64_t>(m) << 32) ^ static_cast<std::uint64_t>(trial)));
}

template <Scalar S>
VectorInstance<S> make_vector_instance(const ExperimentConfig& cfg, Index m, std::uint64_t seed) {
  Vector<S> x = cfg.problem == Problem::Sparse ? sparse_vector<S>(cfg.n, cfg.s, seed) : gaussian_vector<S>(cfg.n, seed, 0);
  auto A = SensingEnsemble<S>::sample(cfg.n, m, seed, 0);
  Observation y = forward_phaseless(A, x);
  return {std::move(x), std::move(A), std::move(y)};
}

template <Scalar S>
SparseSolverReport<S> solve_vector(const ExperimentConfig& cfg, const SensingEnsemble<S>& A, const Observation& y,
                                   const Vector<S>* truth) {
  if (cfg.problem == Problem::LowRank) config_error("solve handles vector problems only");
  return dispatch_vector<S>(cfg, A, y, nullptr, truth);
}

TrialResult run_trial(const ExperimentConfig& cfg, Index m, int trial) {
  return cfg.field == ScalarField::Real ? run_trial_in<double>(cfg, m, trial) : run_trial_in<Complex>(cfg, m, trial);
}

std::vector<CellResult> run_phase_transition(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t cells = cfg.m_grid.size();
  const std::size_t trials = static_cast<std::size_t>(cfg.trials);
  const std::size_t total = cells * trials;
  std::vector<TrialResult> results(total);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t job = next.fetch_add(1); job < total; job = next.fetch_add(1)) {
      try {
        results[job] = run_trial(cfg, cfg.m_grid[job / trials], static_cast<int>(job % trials));
        results[job].trace.clear();
        results[job].elapsed_ms.clear();
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(total);
      }
    }
  };
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), total);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<CellResult> out;
  for (std::size_t c = 0; c < cells; ++c) {
    CellResult cell;
    cell.m = cfg.m_grid[c];
    cell.n = cfg.n;
    cell.q = cfg.q;
    cell.r = cfg.r;
    cell.s = cfg.s;
    cell.trials = cfg.trials;
    std::vector<double> errors;
    double err_sum = 0.0, iter_sum = 0.0, ms_sum = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const auto& res = results[c * trials + t];
      if (res.error < cfg.threshold) ++cell.successes;
      errors.push_back(res.error);
      err_sum += res.error;
      iter_sum += res.iterations;
      ms_sum += res.ms;
    }
    const double count = static_cast<double>(trials);
    cell.mean_err = err_sum / count;
    cell.median_err = median(errors);
    cell.mean_iters = iter_sum / count;
    cell.mean_ms = cfg.timing ? ms_sum / count : std::nan("");
    out.push_back(cell);
  }
  return out;
}

void write_phase_transition_csv(std::ostream& out, const ExperimentConfig& cfg, const std::vector<CellResult>& cells) {
  out << kPhaseTransitionHeader << '\n';
  for (const auto& c : cells) {
    out << to_string(cfg.problem) << ',' << cfg.solver << ',' << c.n << ',' << c.q << ',' << c.r << ',' << c.s << ','
        << c.m << ',' << c.trials << ',' << c.successes << ',' << io::format_real(c.mean_err) << ','
        << io::format_real(c.median_err) << ',' << io::format_real(c.mean_iters) << ','
        << io::format_real(c.mean_ms) << '\n';
  }
}

void write_trace_csv(std::ostream& out, const ExperimentConfig& cfg, const TrialResult& trial) {
  out << kTraceHeader << '\n';
  for (std::size_t i = 0; i < trial.trace.size(); ++i) {
    const double ms = cfg.timing && i < trial.elapsed_ms.size() ? trial.elapsed_ms[i] : std::nan("");
    out << i << ',' << io::format_real(trial.trace[i]) << ',' << io::format_real(ms) << '\n';
  }
}

template VectorInstance<double> make_vector_instance<double>(const ExperimentConfig&, Index, std::uint64_t);
template VectorInstance<Complex> make_vector_instance<Complex>(const ExperimentConfig&, Index, std::uint64_t);
template SparseSolverReport<double> solve_vector<double>(const ExperimentConfig&, const SensingEnsemble<double>&,
                                                         const Observation&, const Vector<double>*);
template SparseSolverReport<Complex> solve_vector<Complex>(const ExperimentConfig&, const SensingEnsemble<Complex>&,
                                                           const Observation&, const Vector<Complex>*);

}  // namespace phaseforge::bench
