#pragma once

// Hand-rolled generators for property tests. They draw from std::mt19937_64 so
// the oracles never share a code path with the library's own sampler.

#include <cmath>
#include <random>

#include "phaseforge/measurement.hpp"

namespace pf_test {

using phaseforge::Complex;
using phaseforge::Index;
using phaseforge::Matrix;
using phaseforge::Vector;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}

  double normal() { return norm_(eng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  Index index(Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(eng_); }

  template <typename S>
  S scalar() {
    if constexpr (std::is_same_v<S, double>) {
      return normal();
    } else {
      return Complex(normal(), normal()) * std::sqrt(0.5);
    }
  }

  template <typename S>
  Vector<S> vector(Index n) {
    Vector<S> v(n);
    for (Index i = 0; i < n; ++i) v[i] = scalar<S>();
    return v;
  }

  template <typename S>
  Matrix<S> matrix(Index rows, Index cols) {
    Matrix<S> M(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) M(i, j) = scalar<S>();
    return M;
  }

  /// A unit-modulus scalar: a sign for real data, e^{j theta} otherwise.
  template <typename S>
  S phase() {
    if constexpr (std::is_same_v<S, double>) {
      return uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0;
    } else {
      return std::polar(1.0, uniform(0.0, 6.283185307179586));
    }
  }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> norm_;
};

template <typename S>
phaseforge::SensingEnsemble<S> wrap(const Matrix<S>& A) {
  return phaseforge::SensingEnsemble<S>::from_matrix(phaseforge::RowMajorMatrix<S>(A));
}

}  // namespace pf_test
