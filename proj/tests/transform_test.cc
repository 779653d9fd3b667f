#include "cascade_stab/transform.h"

#include <gtest/gtest.h>

#include <random>

#include "cascade_stab/error.h"
#include "cascade_stab/spectral.h"
#include "test_util.h"

namespace cascade_stab {
namespace {

using Eigen::MatrixXd;
using testing::example_plant;
using testing::kPi;

// (I - e1 e1^T)(Q X - X Q + prev (D - d_m I)), written out independently.
MatrixXd residual(const PlantSpec& spec, const MatrixXd& X, const MatrixXd& prev) {
  const int m = spec.m;
  MatrixXd shift = spec.D.asDiagonal();
  shift.diagonal().array() -= spec.D(m - 1);
  MatrixXd r = spec.Q * X - X * spec.Q + prev * shift;
  r.row(0).setZero();
  return r;
}

// Solves every masked equation by least squares over the support entries.
std::vector<MatrixXd> least_squares_family(const PlantSpec& spec, int sigma_bar) {
  const int m = spec.m;
  std::vector<MatrixXd> family;
  MatrixXd prev = MatrixXd::Identity(m, m);
  for (int i = 1; i <= sigma_bar; ++i) {
    std::vector<std::pair<int, int>> unknowns;
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c)
        if (in_support(m, i, r, c)) unknowns.push_back({r, c});
    const MatrixXd forcing = residual(spec, MatrixXd::Zero(m, m), prev);
    MatrixXd A(m * m, unknowns.size());
    for (std::size_t u = 0; u < unknowns.size(); ++u) {
      MatrixXd X = MatrixXd::Zero(m, m);
      X(unknowns[u].first, unknowns[u].second) = 1.0;
      const MatrixXd col = residual(spec, X, prev) - forcing;
      A.col(u) = Eigen::Map<const Eigen::VectorXd>(col.data(), m * m);
    }
    const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(forcing.data(), m * m);
    const Eigen::VectorXd x = A.completeOrthogonalDecomposition().solve(rhs);
    MatrixXd T = MatrixXd::Zero(m, m);
    for (std::size_t u = 0; u < unknowns.size(); ++u) T(unknowns[u].first, unknowns[u].second) = x(u);
    family.push_back(T);
    prev = T;
  }
  return family;
}

double max_abs(const MatrixXd& A) { return A.size() ? A.cwiseAbs().maxCoeff() : 0.0; }

TEST(Support, Pattern) {
  // m = 4, i = 1 (c = 1): rows 0..1, columns row+1..3.
  EXPECT_TRUE(in_support(4, 1, 0, 1));
  EXPECT_TRUE(in_support(4, 1, 1, 3));
  EXPECT_FALSE(in_support(4, 1, 2, 3));
  EXPECT_FALSE(in_support(4, 1, 1, 1));
  // i = 3 (c = 2): row 0, columns 2..3.
  EXPECT_TRUE(in_support(4, 3, 0, 2));
  EXPECT_TRUE(in_support(4, 3, 0, 3));
  EXPECT_FALSE(in_support(4, 3, 0, 1));
  EXPECT_FALSE(in_support(4, 3, 1, 3));
}

TEST(TransformFamily, ExamplePlant) {
  const ValidatedPlant plant = example_plant();
  const TransformFamily family = solve_transform_family(plant);
  ASSERT_EQ(family.sigma_bar, 2);
  ASSERT_EQ(family.Tbar.size(), 2u);
  // Row 2 of the i = 1 equation: q21 kappa + (d2 - d3) = 0, so kappa = (d3 - d2)/q21 = 1.
  MatrixXd E12 = MatrixXd::Zero(3, 3);
  E12(0, 1) = 1.0;
  EXPECT_LE(max_abs(family.Tbar[0] - E12), 1e-15);
  EXPECT_LE(max_abs(family.Tbar[1]), 1e-15);
  for (const auto& check : check_sylvester(plant, family)) EXPECT_TRUE(check.ok()) << check.i;
}

TEST(TransformFamily, OppositeSignIsNotASolution) {
  const ValidatedPlant plant = example_plant();
  MatrixXd minus_E12 = MatrixXd::Zero(3, 3);
  minus_E12(0, 1) = -1.0;
  const MatrixXd r = residual(plant.spec(), minus_E12, MatrixXd::Identity(3, 3));
  EXPECT_NEAR(r(1, 1), -2.0, 1e-15);
}

TEST(TransformFamily, EqualDiffusionsGiveEmptyFamily) {
  PlantSpec spec = testing::example_spec();
  spec.D = Eigen::Vector3d(2, 2, 2);
  const TransformFamily family = solve_transform_family(validate_plant(spec));
  EXPECT_EQ(family.sigma_bar, 0);
  EXPECT_TRUE(family.Tbar.empty());

  PlantSpec two = testing::example_spec();
  two.m = 2;
  two.D = Eigen::Vector2d(2, 1);
  two.Q = MatrixXd::Identity(2, 2);
  two.Q(1, 0) = 0.7;
  two.shapes.clear();
  EXPECT_TRUE(solve_transform_family(validate_plant(two)).Tbar.empty());
}

TEST(TransformFamily, RandomPlantsMatchLeastSquaresOracle) {
  std::mt19937 rng(testing::base_seed() + 11);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 2 + trial % 5;
    const PlantSpec spec = testing::random_spec(rng, m);
    const ValidatedPlant plant = validate_plant(spec);
    const TransformFamily family = solve_transform_family(plant);
    const auto oracle = least_squares_family(spec, plant.indices().sigma_bar);
    ASSERT_EQ(family.Tbar.size(), oracle.size());
    MatrixXd prev = MatrixXd::Identity(m, m);
    for (std::size_t i = 0; i < oracle.size(); ++i) {
      const double scale = std::max(1.0, max_abs(oracle[i]));
      EXPECT_LE(max_abs(family.Tbar[i] - oracle[i]), 1e-9 * scale)
          << "trial " << trial << " i " << i + 1;
      EXPECT_LE(max_abs(residual(spec, family.Tbar[i], prev)),
                1e-9 * std::max(1.0, max_abs(spec.Q) * max_abs(family.Tbar[i])));
      for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c)
          if (!in_support(m, static_cast<int>(i) + 1, r, c)) EXPECT_EQ(family.Tbar[i](r, c), 0.0);
      prev = family.Tbar[i];
    }
    for (const auto& check : check_sylvester(plant, family))
      EXPECT_TRUE(check.ok()) << "trial " << trial << " i " << check.i;
  }
}

TEST(ClosedForm, ExampleEntry) {
  const ValidatedPlant plant = example_plant();
  const double kappa =
      kappa_closed_form(plant, 1, 1, 2, MatrixXd::Zero(3, 3), MatrixXd::Identity(3, 3));
  EXPECT_NEAR(kappa, 1.0, 1e-15);
}

TEST(ClosedForm, EqualDiffusionsGiveZero) {
  PlantSpec spec = testing::example_spec();
  spec.D = Eigen::Vector3d(3, 3, 3);
  const ValidatedPlant plant = validate_plant(spec);
  for (int k = 2; k <= 3; ++k)
    EXPECT_EQ(kappa_closed_form(plant, 1, 1, k, MatrixXd::Zero(3, 3), MatrixXd::Identity(3, 3)),
              0.0);
}

TEST(ClosedForm, OutOfSupport) {
  const ValidatedPlant plant = example_plant();
  try {
    kappa_closed_form(plant, 1, 2, 2, MatrixXd::Zero(3, 3), MatrixXd::Identity(3, 3));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIndexOutOfSupport);
  }
}

TEST(ClosedForm, AgreesWithEliminationOnRandomPlants) {
  std::mt19937 rng(testing::base_seed() + 17);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = trial < 50 ? 4 : 2 + trial % 5;
    const ValidatedPlant plant = validate_plant(testing::random_spec(rng, m));
    const TransformFamily a = solve_transform_family(plant);
    const TransformFamily b = solve_transform_family_closed_form(plant);
    ASSERT_EQ(a.Tbar.size(), b.Tbar.size());
    for (std::size_t i = 0; i < a.Tbar.size(); ++i)
      for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c)
          EXPECT_NEAR(a.Tbar[i](r, c), b.Tbar[i](r, c),
                      1e-10 * std::max(1.0, std::abs(a.Tbar[i](r, c))))
              << "trial " << trial;
  }
}

TEST(ModalTransform, Example) {
  const TransformFamily family = solve_transform_family(example_plant());
  const ModalTransform T1 = assemble_Tn(family, 0.25, 0, 3);
  MatrixXd expected = MatrixXd::Identity(3, 3);
  expected(0, 1) = 0.25;
  EXPECT_LE(max_abs(T1.T - expected), 1e-15);
  EXPECT_TRUE(assemble_Tn(family, 12.25, 3, 3).T.isIdentity(0.0));
  EXPECT_TRUE(assemble_Tn(family, 0.0, 0, 3).T.isIdentity(0.0));
}

TEST(ModalTransform, DeterminantInverseAndCancellation) {
  std::mt19937 rng(testing::base_seed() + 23);
  const SpectralBasis basis = build_basis(kPi, 1.0, 0.0, 3);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 2 + trial % 5;
    const ValidatedPlant plant = validate_plant(testing::random_spec(rng, m));
    const TransformFamily family = solve_transform_family(plant);
    const MatrixXd I = MatrixXd::Identity(m, m);
    for (int k = 0; k < basis.size(); ++k) {
      const double lambda = basis.lambda(k);
      const ModalTransform Tn = assemble_Tn(family, lambda, k, basis.size());
      const double t_scale = max_abs(Tn.T) * max_abs(Tn.T_inv);
      EXPECT_NEAR(Tn.T.determinant(), 1.0, 1e-10 * std::max(1.0, std::pow(max_abs(Tn.T), m - 1)));
      EXPECT_LE(max_abs(Tn.T * Tn.T_inv - I), 1e-12 * std::max(1.0, t_scale));
      const double scale =
          std::max(1.0, (max_abs(plant.Q()) + lambda * plant.D().maxCoeff()) * max_abs(Tn.T));
      EXPECT_LE(full_cancellation_residual(plant, family, lambda, Tn), 1e-9 * scale)
          << "trial " << trial << " mode " << k;
    }
  }
}

TEST(Gn, SigmaTwoPlant) {
  PlantSpec spec;
  spec.m = 2;
  spec.D = Eigen::Vector2d(2, 1);
  spec.Q.resize(2, 2);
  spec.Q << 0.3, 1.0, 0.8, -0.2;
  spec.L = kPi;
  const ValidatedPlant plant = validate_plant(spec);
  const TransformFamily family = solve_transform_family(plant);
  for (double lambda : {0.25, 2.25, 6.25}) {
    const ModalTransform Tn = assemble_Tn(family, lambda, 0, 1);
    const Eigen::RowVectorXd G = compute_Gn(plant, family, lambda, Tn);
    EXPECT_NEAR(G(0), lambda * (1.0 - 2.0), 1e-14);
    EXPECT_NEAR(G(1), 0.0, 1e-14);
  }
}

TEST(Gn, EqualDiffusionsGiveZero) {
  PlantSpec spec = testing::example_spec();
  spec.D = Eigen::Vector3d(5, 5, 5);
  const ValidatedPlant plant = validate_plant(spec);
  const TransformFamily family = solve_transform_family(plant);
  const ModalTransform Tn = assemble_Tn(family, 2.25, 0, 1);
  EXPECT_TRUE(compute_Gn(plant, family, 2.25, Tn).isZero(0.0));
}

TEST(Gn, ExampleFullCancellation) {
  const ValidatedPlant plant = example_plant();
  const TransformFamily family = solve_transform_family(plant);
  const ModalTransform T1 = assemble_Tn(family, 0.25, 0, 3);
  EXPECT_LE(full_cancellation_residual(plant, family, 0.25, T1), 1e-9);
}

TEST(Sylvester, CorruptedEntryIsLocated) {
  const ValidatedPlant plant = example_plant();
  TransformFamily family = solve_transform_family(plant);
  family.Tbar[0](0, 2) += 0.5;
  const auto checks = check_sylvester(plant, family);
  ASSERT_FALSE(checks.empty());
  EXPECT_FALSE(checks[0].ok());
  // Q X - X Q with X = 0.5 E13 is 0.5 (Q e1 e3^T - e1 e3^T Q); row 2 of it is 0.5 q21 e3^T.
  EXPECT_EQ(checks[0].row, 1);
  EXPECT_EQ(checks[0].col, 2);
  EXPECT_NEAR(checks[0].residual, 0.5, 1e-15);
}

}  // namespace
}  // namespace cascade_stab
