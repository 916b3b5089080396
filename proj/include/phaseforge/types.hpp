#pragma once

#include <complex>
#include <concepts>
#include <string_view>

#include <Eigen/Dense>

namespace phaseforge {

using Index = Eigen::Index;
using Complex = std::complex<double>;

template <typename S>
concept Scalar = std::same_as<S, double> || std::same_as<S, Complex>;

template <typename S>
using Vector = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <typename S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using RowMajorMatrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using RealVector = Vector<double>;
using RealMatrix = Matrix<double>;

enum class ScalarField { Real, Complex };

template <Scalar S>
inline constexpr ScalarField field_of = std::same_as<S, double> ? ScalarField::Real : ScalarField::Complex;

std::string_view to_string(ScalarField field);
ScalarField parse_field(std::string_view text);

/// Real part of an inner product; the identity for real scalars.
inline double real_part(double v) { return v; }
inline double real_part(const Complex& v) { return v.real(); }

/// Conjugate that stays real for real scalars (std::conj promotes to complex).
inline double conj_of(double v) { return v; }
inline Complex conj_of(const Complex& v) { return std::conj(v); }

}  // namespace phaseforge
