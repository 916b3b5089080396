#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance binary.

#include <limits>
#include <vector>

#include "phaseforge/unstructured.hpp"

namespace pf_test {

using phaseforge::Index;
using phaseforge::Vector;

/// Central differences in real coordinates. For complex data the conjugate
/// Wirtinger derivative along x = a + jb is (df/da + j df/db) / 2.
template <typename S>
Vector<S> numeric_wf_gradient(const phaseforge::SensingEnsemble<S>& A, const phaseforge::Observation& y,
                              const Vector<S>& x, double h) {
  Vector<S> g(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    auto partial = [&](S dir) {
      Vector<S> p = x, q = x;
      p[i] += h * dir;
      q[i] -= h * dir;
      return (phaseforge::wf_objective(A, y, p) - phaseforge::wf_objective(A, y, q)) / (2 * h);
    };
    if constexpr (std::is_same_v<S, double>) {
      g[i] = partial(1.0);
    } else {
      g[i] = phaseforge::Complex(partial({1, 0}), partial({0, 1})) / 2.0;
    }
  }
  return g;
}

/// Visits every s-subset of {0..n-1} in lexicographic order.
template <typename F>
void for_each_subset(Index n, Index s, F&& visit) {
  std::vector<Index> idx(static_cast<std::size_t>(s));
  for (Index i = 0; i < s; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    visit(static_cast<const std::vector<Index>&>(idx));
    Index k = s - 1;
    while (k >= 0 && idx[static_cast<std::size_t>(k)] == n - s + k) --k;
    if (k < 0) return;
    ++idx[static_cast<std::size_t>(k)];
    for (Index j = k + 1; j < s; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

/// Lexicographically first support minimizing ||x - x_T|| over |T| = s.
inline std::vector<Index> brute_projection_support(const Vector<double>& x, Index s) {
  std::vector<Index> best;
  double best_res = std::numeric_limits<double>::infinity();
  for_each_subset(x.size(), s, [&](const std::vector<Index>& T) {
    double kept = 0.0;
    for (Index i : T) kept += x[i] * x[i];
    const double res = x.squaredNorm() - kept;
    if (res < best_res) {
      best_res = res;
      best = T;
    }
  });
  return best;
}

}  // namespace pf_test
