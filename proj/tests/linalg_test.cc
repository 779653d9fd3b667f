#include "cascade_stab/linalg.h"

#include <gtest/gtest.h>

#include <random>

#include "cascade_stab/error.h"
#include "test_util.h"

namespace cascade_stab {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd random_stable(std::mt19937& rng, int n) {
  std::normal_distribution<double> g;
  MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = g(rng);
  A.diagonal().array() -= spectral_abscissa(A) + 1.0;
  return A;
}

TEST(Lyapunov, ScalarCase) {
  MatrixXd A = MatrixXd::Constant(1, 1, -1.0);
  MatrixXd C = MatrixXd::Identity(1, 1);
  EXPECT_NEAR(solve_lyapunov(A, C)(0, 0), 0.5, 1e-15);
}

TEST(Lyapunov, KroneckerAndBartelsStewartAgree) {
  std::mt19937 rng(testing::base_seed());
  for (int n : {1, 2, 3, 5, 9, 14}) {
    const MatrixXd A = random_stable(rng, n);
    const MatrixXd C = MatrixXd::Identity(n, n);
    const MatrixXd X1 = solve_lyapunov_kronecker(A, C);
    const MatrixXd X2 = solve_lyapunov_bartels_stewart(A, C);
    const MatrixXd X = solve_lyapunov(A, C);
    const double scale = X1.cwiseAbs().maxCoeff();
    EXPECT_LE((X1 - X2).cwiseAbs().maxCoeff(), 1e-9 * scale) << n;
    EXPECT_LE((A.transpose() * X + X * A + C).cwiseAbs().maxCoeff(), 1e-8 * std::max(1.0, scale));
    EXPECT_GT(min_eigenvalue_symmetric(X), 0.0);
  }
}

TEST(Riccati, ReferenceExample) {
  MatrixXd A(2, 2), B(2, 1), Q(2, 2), R(1, 1);
  A << -3, 2, 1, 1;
  B << 0, 1;
  Q << 3, 0, 0, 3;
  R << 3;
  const MatrixXd X = solve_care(A, B, Q, R);
  EXPECT_LE((X - X.transpose()).cwiseAbs().maxCoeff(), 1e-10);
  const MatrixXd Y = A.transpose() * X + X * A - X * B * R.inverse() * B.transpose() * X + Q;
  EXPECT_LE(Y.cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(spectral_abscissa(A - B * R.inverse() * B.transpose() * X), 0.0);
}

TEST(Riccati, ScalarClosedForm) {
  // a x 2 - x^2 + 1 = 0 with a = 2: x = 2 + sqrt(5).
  const MatrixXd X = solve_care(MatrixXd::Constant(1, 1, 2.0), MatrixXd::Identity(1, 1),
                                MatrixXd::Identity(1, 1), MatrixXd::Identity(1, 1));
  EXPECT_NEAR(X(0, 0), 2.0 + std::sqrt(5.0), 1e-12);
}

TEST(Riccati, RandomUnstableSystems) {
  std::mt19937 rng(testing::base_seed() + 7);
  std::normal_distribution<double> g;
  for (int n : {2, 4, 8, 16}) {
    MatrixXd A(n, n), B(n, 2);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) A(i, j) = g(rng);
      B(i, 0) = g(rng);
      B(i, 1) = g(rng);
    }
    const MatrixXd Q = MatrixXd::Identity(n, n);
    const MatrixXd R = MatrixXd::Identity(2, 2);
    const MatrixXd X = solve_care(A, B, Q, R);
    const MatrixXd Y = A.transpose() * X + X * A - X * B * B.transpose() * X + Q;
    EXPECT_LE(Y.cwiseAbs().maxCoeff(), 1e-8 * std::max(1.0, X.cwiseAbs().maxCoeff())) << n;
    EXPECT_LT(spectral_abscissa(A - B * B.transpose() * X), 0.0);
  }
}

TEST(OrderedSchur, StableBlockFirst) {
  std::mt19937 rng(testing::base_seed() + 3);
  std::normal_distribution<double> g;
  MatrixXd H(7, 7);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) H(i, j) = g(rng);
  const OrderedSchur s = ordered_schur_stable_first(H);
  EXPECT_LE((s.U * s.T * s.U.adjoint() - H.cast<std::complex<double>>()).cwiseAbs().maxCoeff(),
            1e-12 * H.norm());
  for (int k = 0; k < 7; ++k) EXPECT_EQ(s.T(k, k).real() < 0.0, k < s.stable_count);
}

TEST(Ackermann, SecondOrderExample) {
  // Companion form of s^2 - 1 placed at {-2, -3}: s^2 + 5 s + 6.
  MatrixXd A(2, 2);
  A << 0, 1, 1, 0;
  const VectorXd b = VectorXd::Unit(2, 0);
  const Eigen::RowVectorXd K = place_poles_ackermann(A, b, Eigen::Vector2d(-2, -3));
  const MatrixXd closed = A + b * K;
  // Characteristic polynomial s^2 - tr s + det.
  EXPECT_NEAR(-closed.trace(), 5.0, 1e-10);
  EXPECT_NEAR(closed.determinant(), 6.0, 1e-10);
  EXPECT_NEAR(K(0), -5.0, 1e-12);
  EXPECT_NEAR(K(1), -7.0, 1e-12);
}

TEST(Ackermann, ScalarExample) {
  const Eigen::RowVectorXd K = place_poles_ackermann(MatrixXd::Constant(1, 1, 2.0),
                                                     VectorXd::Ones(1), VectorXd::Constant(1, -4));
  EXPECT_NEAR(K(0), -6.0, 1e-14);
}

TEST(Ackermann, Uncontrollable) {
  MatrixXd A = MatrixXd::Identity(2, 2);
  try {
    place_poles_ackermann(A, VectorXd::Unit(2, 0), Eigen::Vector2d(-1, -2));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPolePlacementSingular);
  }
}

TEST(MatrixExponential, Examples) {
  EXPECT_NEAR(matrix_exponential(MatrixXd::Constant(1, 1, -1.0))(0, 0), std::exp(-1.0), 1e-15);
  MatrixXd N(2, 2);
  N << 0, 1, 0, 0;
  const MatrixXd E = matrix_exponential(N);
  EXPECT_EQ(E(0, 0), 1.0);
  EXPECT_EQ(E(0, 1), 1.0);
  EXPECT_EQ(E(1, 0), 0.0);
  EXPECT_EQ(E(1, 1), 1.0);
}

TEST(Norms, Basics) {
  MatrixXd A(2, 2);
  A << 3, 0, 0, -0.5;
  EXPECT_NEAR(spectral_norm(A), 3.0, 1e-14);
  EXPECT_NEAR(condition_number(A), 6.0, 1e-13);
  EXPECT_NEAR(spectral_abscissa(A), 3.0, 1e-14);
  MatrixXd S(2, 2);
  S << 2, 1, 1, 2;
  EXPECT_NEAR(max_eigenvalue_symmetric(S), 3.0, 1e-14);
  EXPECT_NEAR(min_eigenvalue_symmetric(S), 1.0, 1e-14);
  EXPECT_TRUE(std::isinf(condition_number(MatrixXd::Zero(2, 2))));
}

}  // namespace
}  // namespace cascade_stab
