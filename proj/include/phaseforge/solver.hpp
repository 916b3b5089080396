#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "phaseforge/errors.hpp"
#include "phaseforge/metrics.hpp"
#include "phaseforge/spectral_init.hpp"

namespace phaseforge {

enum class Termination { Converged, MaxIters, Degenerate };

std::string_view to_string(Termination t);

/// Gradient term i is kept when |<a_i, x>| >= alpha_lb ||x|| and y_i <= alpha_ub mean(y).
struct GradientTruncation {
  double alpha_lb = 0.1;
  double alpha_ub = 2.5;

  static GradientTruncation none() { return {0.0, std::numeric_limits<double>::infinity()}; }
};

struct SolverConfig {
  int max_iters = 1000;
  double tol = 1e-10;      // on the successive phase-invariant change, relative to ||x||
  double step_size = 0.2;
  bool sample_splitting = false;
  TruncationRule truncation;  // spectral initialization
  GradientTruncation gradient;  // twf and its relatives
  double ls_tol = 1e-10;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Defaults tuned for truncated WF: step 0.35, 500 iterations.
SolverConfig twf_config();

template <Scalar S>
struct SolverReport {
  Vector<S> estimate;
  /// trace[t]: relative error to the truth when one was supplied, else the
  /// relative change from iterate t - 1 (trace[0] = 1).
  std::vector<double> trace;
  std::vector<double> elapsed_ms;  // wall time since start at each trace entry
  int iterations = 0;
  Termination termination = Termination::MaxIters;
  double wall_ms = 0.0;
};

/// z / |z|, with phase_of(0) = 1.
inline double phase_of(double z) { return z < 0.0 ? -1.0 : 1.0; }
inline Complex phase_of(const Complex& z) {
  const double mag = std::abs(z);
  return mag == 0.0 ? Complex(1.0, 0.0) : z / mag;
}

template <Scalar S>
Vector<S> phases(const Vector<S>& z) {
  Vector<S> out(z.size());
  for (Index i = 0; i < z.size(); ++i) out[i] = phase_of(z[i]);
  return out;
}

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Shared driver: repeatedly calls step(x, t) for t = 1..max_iters. A step
/// returns nullopt (or a non-finite vector) to signal degeneracy, in which
/// case the last finite iterate is kept.
template <Scalar S, typename Step>
SolverReport<S> iterate(Vector<S> x, const SolverConfig& cfg, const Vector<S>* truth, Step&& step) {
  cfg.validate();
  const Stopwatch clock;
  SolverReport<S> report;
  double truth_norm = 0.0;
  if (truth != nullptr) {
    if (truth->size() != x.size()) throw InvalidArgument("truth length does not match the estimate");
    truth_norm = truth->norm();
    if (truth_norm == 0.0) throw InvalidArgument("truth is zero; relative error undefined");
  }
  report.trace.push_back(truth ? phase_invariant_dist<S>(x, *truth) / truth_norm : 1.0);
  report.elapsed_ms.push_back(clock.elapsed_ms());
  report.termination = Termination::MaxIters;
  for (int t = 1; t <= cfg.max_iters; ++t) {
    std::optional<Vector<S>> next = step(static_cast<const Vector<S>&>(x), t);
    if (!next || !next->allFinite()) {
      report.termination = Termination::Degenerate;
      break;
    }
    const double change = phase_invariant_dist<S>(*next, x);
    x = std::move(*next);
    const double scale = x.norm();
    report.iterations = t;
    report.trace.push_back(truth ? phase_invariant_dist<S>(x, *truth) / truth_norm
                                 : (scale > 0.0 ? change / scale : change));
    report.elapsed_ms.push_back(clock.elapsed_ms());
    if (change == 0.0 || change < cfg.tol * scale) {
      report.termination = Termination::Converged;
      break;
    }
  }
  report.estimate = std::move(x);
  report.wall_ms = clock.elapsed_ms();
  return report;
}

}  // namespace detail

}  // namespace phaseforge
