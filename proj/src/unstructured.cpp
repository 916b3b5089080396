#include "phaseforge/unstructured.hpp"

#include <cmath>

#include "phaseforge/errors.hpp"
#include "phaseforge/linalg.hpp"

namespace phaseforge {

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::Converged:
      return "converged";
    case Termination::MaxIters:
      return "max_iters";
    case Termination::Degenerate:
      return "degenerate";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  if (max_iters < 1) throw InvalidArgument("max_iters must be at least 1");
  if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
  if (!(step_size > 0.0)) throw InvalidArgument("step_size must be positive");
  if (!(ls_tol > 0.0)) throw InvalidArgument("ls_tol must be positive");
  if (gradient.alpha_lb < 0.0 || !(gradient.alpha_ub > 0.0)) throw InvalidArgument("invalid gradient truncation");
  truncation.validate();
}

SolverConfig twf_config() {
  SolverConfig cfg;
  cfg.max_iters = 500;
  cfg.step_size = 0.35;
  return cfg;
}

template <Scalar S>
double wf_objective(const SensingEnsemble<S>& A, const Observation& y, const Vector<S>& x) {
  if (y.size() != A.rows()) throw InvalidArgument("wf_objective: observation length mismatch");
  const RealVector z2 = A.apply(x).cwiseAbs2();
  return (y.values().cwiseAbs2() - z2).squaredNorm() / static_cast<double>(A.rows());
}

template <Scalar S>
Vector<S> wf_direction(const SensingEnsemble<S>& A, const Observation& y, const Vector<S>& x,
                       const GradientTruncation& trunc) {
  if (y.size() != A.rows()) throw InvalidArgument("wf_direction: observation length mismatch");
  const Vector<S> z = A.apply(x);
  const RealVector& yv = y.values();
  const double lower = trunc.alpha_lb * x.norm();
  const double upper = trunc.alpha_ub * yv.mean();
  Vector<S> w(z.size());
  for (Index i = 0; i < z.size(); ++i) {
    const double mag = std::abs(z[i]);
    const bool keep = mag >= lower && yv[i] <= upper;
    w[i] = keep ? (mag * mag - yv[i] * yv[i]) * z[i] : S(0.0);
  }
  return A.entries().adjoint() * w / static_cast<double>(A.rows());
}

template <Scalar S>
Vector<S> wf_gradient(const SensingEnsemble<S>& A, const Observation& y, const Vector<S>& x) {
  const double factor = std::same_as<S, double> ? 4.0 : 2.0;
  return factor * wf_direction(A, y, x, GradientTruncation::none());
}

namespace {

template <Scalar S>
SolverReport<S> gradient_flow(const SensingEnsemble<S>& A, const Observation& y, const Vector<S>& x0,
                              const SolverConfig& cfg, const GradientTruncation& trunc, const Vector<S>* truth) {
  if (x0.size() != A.cols()) throw InvalidArgument("initial estimate length does not match ensemble");
  const double scale = x0.squaredNorm();
  if (scale == 0.0) throw InvalidArgument("initial estimate must be nonzero");
  const double mu = cfg.step_size / scale;
  return detail::iterate<S>(x0, cfg, truth, [&](const Vector<S>& x, int) -> std::optional<Vector<S>> {
    return x - mu * wf_direction(A, y, x, trunc);
  });
}

}  // namespace

template <Scalar S>
SolverReport<S> wf(const SensingEnsemble<S>& A, const Observation& y, const Vector<S>& x0, const SolverConfig& cfg,
                   const Vector<S>* truth) {
  return gradient_flow(A, y, x0, cfg, GradientTruncation::none(), truth);
}

template <Scalar S>
SolverReport<S> twf(const SensingEnsemble<S>& A, const Observation& y, const Vector<S>& x0, const SolverConfig& cfg,
                    const Vector<S>* truth) {
  return gradient_flow(A, y, x0, cfg, cfg.gradient, truth);
}

template <Scalar S>
SolverReport<S> altmin_phase(MeasurementSource<S>& source, const Vector<S>& x0, const SolverConfig& cfg,
                             const Vector<S>* truth) {
  if (x0.norm() == 0.0) throw InvalidArgument("altmin_phase: initial estimate must be nonzero");
  std::optional<Measurement<S>> current;
  return detail::iterate<S>(x0, cfg, truth, [&](const Vector<S>& x, int) -> std::optional<Vector<S>> {
    if (!current || cfg.sample_splitting) current = source.next();
    const auto& A = current->ensemble.entries();
    if (A.cols() != x.size()) throw InvalidArgument("altmin_phase: ensemble width does not match estimate");
    if (A.rows() < A.cols()) return std::nullopt;
    const Vector<S> b = phases<S>(A * x).cwiseProduct(current->observation.values().template cast<S>());
    Vector<S> next = x;
    const auto ls = cgls(
        [&](const Vector<S>& v) -> Vector<S> { return A * v; },
        [&](const Vector<S>& r) -> Vector<S> { return A.adjoint() * r; }, b, next, cfg.ls_tol,
        static_cast<int>(10 * A.cols()));
    if (ls.breakdown && !ls.converged) return std::nullopt;
    return next;
  });
}

template <Scalar S>
SolverReport<S> altmin_phase(const SensingEnsemble<S>& A, const Observation& y, const Vector<S>& x0,
                             const SolverConfig& cfg, const Vector<S>* truth) {
  FixedMeasurements<S> source(A, y);
  return altmin_phase(source, x0, cfg, truth);
}

#define PHASEFORGE_INSTANTIATE(S)                                                                                  \
  template double wf_objective<S>(const SensingEnsemble<S>&, const Observation&, const Vector<S>&);                \
  template Vector<S> wf_gradient<S>(const SensingEnsemble<S>&, const Observation&, const Vector<S>&);              \
  template Vector<S> wf_direction<S>(const SensingEnsemble<S>&, const Observation&, const Vector<S>&,              \
                                     const GradientTruncation&);                                                   \
  template SolverReport<S> altmin_phase<S>(MeasurementSource<S>&, const Vector<S>&, const SolverConfig&,           \
                                           const Vector<S>*);                                                      \
  template SolverReport<S> altmin_phase<S>(const SensingEnsemble<S>&, const Observation&, const Vector<S>&,        \
                                           const SolverConfig&, const Vector<S>*);                                 \
  template SolverReport<S> wf<S>(const SensingEnsemble<S>&, const Observation&, const Vector<S>&,                  \
                                 const SolverConfig&, const Vector<S>*);                                           \
  template SolverReport<S> twf<S>(const SensingEnsemble<S>&, const Observation&, const Vector<S>&,                 \
                                  const SolverConfig&, const Vector<S>*);

PHASEFORGE_INSTANTIATE(double)
PHASEFORGE_INSTANTIATE(Complex)

}  // namespace phaseforge
