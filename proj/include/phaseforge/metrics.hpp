#pragma once

#include "phaseforge/types.hpp"

namespace phaseforge {

/// min over theta of ||x e^{j theta} - xhat||. For real signals this is
/// min(||xhat - x||, ||xhat + x||).
template <Scalar S>
double phase_invariant_dist(const Vector<S>& xhat, const Vector<S>& x);

/// dist(xhat, x) / ||x||. Throws InvalidArgument for x = 0.
template <Scalar S>
double relative_phase_error(const Vector<S>& xhat, const Vector<S>& x);

/// sqrt(sum_k dist^2(xhat_k, x_k) / ||X||_F^2). Throws InvalidArgument for X = 0.
template <Scalar S>
double matrix_phase_error(const Matrix<S>& Xhat, const Matrix<S>& X);

/// ||(I - Uhat Uhat') U||_2, the sine of the largest principal angle.
/// Both arguments must have orthonormal columns to 1e-8.
template <Scalar S>
double subspace_distance(const Matrix<S>& Uhat, const Matrix<S>& U);

/// max_k |U'U - I|_{jk} as a check for orthonormal columns.
template <Scalar S>
double orthonormality_defect(const Matrix<S>& U);

}  // namespace phaseforge
