#pragma once

#include "phaseforge/solver.hpp"

namespace phaseforge {

/// f(x) = (1/m) sum (y_i^2 - |<a_i, x>|^2)^2
template <Scalar S>
double wf_objective(const SensingEnsemble<S>& A, const Observation& y, const Vector<S>& x);

/// Gradient of f: (4/m) sum (|z_i|^2 - y_i^2) z_i a_i for real data; the
/// Wirtinger derivative df/d(conj x) = (2/m) sum (...) for complex data.
template <Scalar S>
Vector<S> wf_gradient(const SensingEnsemble<S>& A, const Observation& y, const Vector<S>& x);

/// (1/m) sum_{i kept} (|z_i|^2 - y_i^2) z_i a_i, the direction both wf and twf
/// step along. GradientTruncation::none() keeps every term.
template <Scalar S>
Vector<S> wf_direction(const SensingEnsemble<S>& A, const Observation& y, const Vector<S>& x,
                       const GradientTruncation& trunc);

/// Alternates measurement phases C = phase(A x) with the least-squares fit
/// min ||C y - A x|| (CGLS, warm-started). With cfg.sample_splitting the source
/// is drawn once per iteration; otherwise once in total. m < n ends as Degenerate.
template <Scalar S>
SolverReport<S> altmin_phase(MeasurementSource<S>& source, const Vector<S>& x0, const SolverConfig& cfg,
                             const Vector<S>* truth = nullptr);

template <Scalar S>
SolverReport<S> altmin_phase(const SensingEnsemble<S>& A, const Observation& y, const Vector<S>& x0,
                             const SolverConfig& cfg, const Vector<S>* truth = nullptr);

/// x <- x - (step / ||x0||^2) * wf_direction(x) with no truncation.
template <Scalar S>
SolverReport<S> wf(const SensingEnsemble<S>& A, const Observation& y, const Vector<S>& x0, const SolverConfig& cfg,
                   const Vector<S>* truth = nullptr);

/// wf with the gradient truncation in cfg.gradient.
template <Scalar S>
SolverReport<S> twf(const SensingEnsemble<S>& A, const Observation& y, const Vector<S>& x0, const SolverConfig& cfg,
                    const Vector<S>* truth = nullptr);

}  // namespace phaseforge
