#pragma once

#include <cmath>
#include <functional>

#include "phaseforge/types.hpp"

namespace phaseforge {

/// Thin QR of M (n x r, n >= r) with R's diagonal real and nonnegative, so the
/// factor pair is unique for full-rank input. Returns Q; stores R if requested.
template <Scalar S>
Matrix<S> orthonormalize(const Matrix<S>& M, Matrix<S>* R = nullptr);

/// v -> Y v applied to a block of column vectors.
template <Scalar S>
using BlockOperator = std::function<Matrix<S>(const Matrix<S>&)>;

struct EigenOptions {
  double tol = 1e-8;        // ||Y v - lambda v|| <= tol * |lambda_1| for each returned pair
  int max_iters = 1000;
  double gap_tol = 1e-12;   // relative to |lambda_1|
};

template <Scalar S>
struct EigenResult {
  Matrix<S> vectors;   // n x r, orthonormal, descending eigenvalue order
  RealVector values;   // r leading eigenvalues
  double next_value = 0.0;  // estimate of eigenvalue r + 1 (0 when r = n)
  int iterations = 0;
  bool converged = false;
};

/// Leading r eigenpairs of a Hermitian PSD operator by block orthogonal
/// iteration with Rayleigh-Ritz extraction. The block carries a few extra
/// columns so that the gap after index r can be measured.
///
/// Throws DegenerateSpectrum when lambda_r - lambda_{r+1} < gap_tol |lambda_1|
/// and for the zero operator. The gap is not checked when r = n.
template <Scalar S>
EigenResult<S> top_eigenvectors(const BlockOperator<S>& op, Index n, Index r, const EigenOptions& opts = {});

template <typename T>
double squared_norm(const T& v) {
  return v.squaredNorm();
}

struct CglsResult {
  int iterations = 0;
  double normal_residual = 0.0;  // ||A'(b - Ax)|| / ||A'b||
  bool converged = false;
  bool breakdown = false;
};

/// Conjugate gradients on the normal equations A'A x = A'b (CGLS), started
/// from the incoming x. `forward` maps unknowns to data, `adjoint` maps back;
/// both may act on vectors or matrices.
template <typename Unknown, typename Data, typename Forward, typename Adjoint>
CglsResult cgls(const Forward& forward, const Adjoint& adjoint, const Data& b, Unknown& x, double tol,
                int max_iters) {
  CglsResult result;
  Data r = b - forward(x);
  Unknown s = adjoint(r);
  const double reference = std::sqrt(squared_norm(adjoint(b)));
  double gamma = squared_norm(s);
  if (reference == 0.0 || std::sqrt(gamma) <= tol * reference) {
    result.converged = true;
    result.normal_residual = reference == 0.0 ? 0.0 : std::sqrt(gamma) / reference;
    return result;
  }
  Unknown p = s;
  for (int it = 1; it <= max_iters; ++it) {
    const Data q = forward(p);
    const double delta = squared_norm(q);
    if (!(delta > 0.0) || !std::isfinite(delta)) {
      result.breakdown = true;
      break;
    }
    const double alpha = gamma / delta;
    x += alpha * p;
    r -= alpha * q;
    s = adjoint(r);
    const double gamma_next = squared_norm(s);
    result.iterations = it;
    result.normal_residual = std::sqrt(gamma_next) / reference;
    if (result.normal_residual <= tol) {
      result.converged = true;
      break;
    }
    p = s + (gamma_next / gamma) * p;
    gamma = gamma_next;
  }
  return result;
}

}  // namespace phaseforge
