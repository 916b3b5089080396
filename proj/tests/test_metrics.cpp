#include <gtest/gtest.h>

#include <numbers>

#include "phaseforge/errors.hpp"
#include "phaseforge/metrics.hpp"
#include "support.hpp"

using namespace phaseforge;

namespace {

// Brute-force min over a theta grid (sign pair for real data).
double grid_dist(const Vector<Complex>& xhat, const Vector<Complex>& x, int points = 10000) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < points; ++k) {
    const Complex c = std::polar(1.0, 2.0 * std::numbers::pi * k / points);
    best = std::min(best, (c * x - xhat).norm());
  }
  return best;
}

Matrix<double> rotation(double a) {
  Matrix<double> R(2, 2);
  R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return R;
}

}  // namespace

TEST(PhaseInvariantDist, IdentityAndSignFlip) {
  const Vector<double> x{{1.0, -2.0, 0.5}};
  EXPECT_EQ(phase_invariant_dist<double>(x, x), 0.0);
  EXPECT_EQ(phase_invariant_dist<double>(-x, x), 0.0);
}

TEST(PhaseInvariantDist, OrthogonalUnitVectors) {
  const Vector<double> x{{1.0, 0.0}}, xhat{{0.0, 1.0}};
  EXPECT_NEAR(phase_invariant_dist<double>(xhat, x), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(grid_dist(xhat.cast<Complex>(), x.cast<Complex>()), std::sqrt(2.0), 1e-3);
}

TEST(PhaseInvariantDist, MatchesThetaGrid) {
  pf_test::Gen gen(21);
  for (int t = 0; t < 20; ++t) {
    const Vector<Complex> x = gen.vector<Complex>(5), xhat = gen.vector<Complex>(5);
    const double d = phase_invariant_dist<Complex>(xhat, x);
    EXPECT_LE(d, grid_dist(xhat, x) + 1e-12);
    EXPECT_NEAR(d, grid_dist(xhat, x), 1e-3);
  }
}

TEST(PhaseInvariantDist, RealEqualsMinOfSigns) {
  pf_test::Gen gen(22);
  for (int t = 0; t < 50; ++t) {
    const Vector<double> x = gen.vector<double>(6), xhat = gen.vector<double>(6);
    EXPECT_NEAR(phase_invariant_dist<double>(xhat, x), std::min((xhat - x).norm(), (xhat + x).norm()), 1e-12);
  }
}

TEST(PhaseInvariantDist, LengthMismatch) {
  EXPECT_THROW(phase_invariant_dist<double>(Vector<double>::Zero(2), Vector<double>::Zero(3)), InvalidArgument);
}

template <typename S>
void check_dist_properties(std::uint64_t seed) {
  pf_test::Gen gen(seed);
  for (int t = 0; t < 100; ++t) {
    const Index n = gen.index(1, 10);
    const Vector<S> a = gen.vector<S>(n), b = gen.vector<S>(n);
    const double d = phase_invariant_dist<S>(a, b);
    const double scale = 1e-14 * (1 + a.norm() + b.norm());
    EXPECT_GE(d, 0.0);
    EXPECT_NEAR(d, phase_invariant_dist<S>(b, a), scale);
    EXPECT_NEAR(d, phase_invariant_dist<S>(Vector<S>(gen.phase<S>() * a), Vector<S>(gen.phase<S>() * b)), scale);
    EXPECT_LE(d, (a - b).norm() + scale);
  }
}

TEST(PhaseInvariantDist, PropertiesReal) { check_dist_properties<double>(31); }
TEST(PhaseInvariantDist, PropertiesComplex) { check_dist_properties<Complex>(32); }

TEST(MatrixPhaseError, Examples) {
  const Matrix<double> I = Matrix<double>::Identity(2, 2);
  EXPECT_EQ(matrix_phase_error<double>(I, I), 0.0);
  Matrix<double> flipped = I;
  flipped.col(1) *= -1.0;
  EXPECT_EQ(matrix_phase_error<double>(flipped, I), 0.0);
  EXPECT_NEAR(matrix_phase_error<double>(Matrix<double>::Zero(2, 2), I), 1.0, 1e-15);
  EXPECT_THROW(matrix_phase_error<double>(I, Matrix<double>::Zero(2, 2)), InvalidArgument);
}

TEST(MatrixPhaseError, PerColumnPhaseInvariance) {
  pf_test::Gen gen(33);
  const Matrix<Complex> X = gen.matrix<Complex>(6, 5), Xhat = gen.matrix<Complex>(6, 5);
  Matrix<Complex> rotated = Xhat;
  for (Index k = 0; k < 5; ++k) rotated.col(k) *= gen.phase<Complex>();
  EXPECT_NEAR(matrix_phase_error<Complex>(rotated, X), matrix_phase_error<Complex>(Xhat, X), 1e-13);
}

TEST(SubspaceDistance, Examples) {
  const Matrix<double> e1 = Matrix<double>::Identity(2, 1);
  Matrix<double> e2(2, 1);
  e2 << 0.0, 1.0;
  EXPECT_NEAR(subspace_distance<double>(e1, e1), 0.0, 1e-15);
  EXPECT_NEAR(subspace_distance<double>(e2, e1), 1.0, 1e-15);
  Matrix<double> tilted(2, 1);
  tilted << std::cos(0.3), std::sin(0.3);
  EXPECT_NEAR(subspace_distance<double>(tilted, e1), std::sin(0.3), 1e-12);
  EXPECT_NEAR(subspace_distance<double>(tilted, e1), ((Matrix<double>::Identity(2, 2) - tilted * tilted.transpose()) * e1).norm(), 1e-14);
}

TEST(SubspaceDistance, RejectsNonOrthonormal) {
  EXPECT_THROW(subspace_distance<double>(2.0 * Matrix<double>::Identity(3, 1), Matrix<double>::Identity(3, 1)),
               InvalidArgument);
}

TEST(SubspaceDistance, InvariantUnderRightRotation) {
  pf_test::Gen gen(34);
  for (int t = 0; t < 20; ++t) {
    const Matrix<double> U = Eigen::HouseholderQR<Matrix<double>>(gen.matrix<double>(7, 2)).householderQ() *
                             Matrix<double>::Identity(7, 2);
    const Matrix<double> V = Eigen::HouseholderQR<Matrix<double>>(gen.matrix<double>(7, 2)).householderQ() *
                             Matrix<double>::Identity(7, 2);
    const Matrix<double> R = rotation(gen.uniform(0, 6.28));
    EXPECT_NEAR(subspace_distance<double>(U * R, V), subspace_distance<double>(U, V), 1e-12);
    EXPECT_NEAR(subspace_distance<double>(U, V * R), subspace_distance<double>(U, V), 1e-12);
  }
}
