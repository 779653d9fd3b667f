#include "cascade_stab/simulator.h"

#include <gtest/gtest.h>

#include <cmath>

#include "cascade_stab/error.h"
#include "cascade_stab/io.h"
#include "cascade_stab/linalg.h"
#include "test_util.h"

namespace cascade_stab {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using testing::example_plant;
using testing::kPi;

std::vector<ShapeFunction> example_initial() {
  return initial_from_json(read_json_file(testing::data_path("example_initial.json")));
}

Controller example_controller(const ValidatedPlant& plant, const SpectralBasis& basis) {
  SynthesisOptions options;
  options.N = 3;
  return build_controller(plant, basis, 9.0, options);
}

VectorXd stacked(const MatrixXd& coeffs) {
  return Eigen::Map<const VectorXd>(coeffs.data(), coeffs.size());
}

TEST(ProjectInitial, ExampleSecondComponent) {
  const SpectralBasis basis = build_basis(kPi, 1.0, 0.0, 30);
  const MatrixXd coeffs = project_initial(example_initial(), basis, 30);
  ASSERT_EQ(coeffs.rows(), 3);
  ASSERT_EQ(coeffs.cols(), 30);
  // <6 cos(x/2) + 3, sqrt(2/pi) cos(x/2)> = sqrt(2/pi) (3 pi + 6).
  const double exact = std::sqrt(2.0 / kPi) * (3.0 * kPi + 6.0);
  EXPECT_NEAR(coeffs(1, 0), exact, 1e-13);
  const std::vector<std::function<double(double)>> fns = {
      [](double x) { return std::cos(x) + 1.0; },
      [](double x) { return 6.0 * std::cos(0.5 * x) + 3.0; },
      [](double x) { return -std::cos(0.5 * x) - 0.5; }};
  const MatrixXd quad = project_initial(fns, basis, 30);
  EXPECT_LE((quad - coeffs).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(ProjectInitial, PureModeAndZero) {
  const SpectralBasis basis = build_basis(kPi, 1.0, 0.0, 6);
  const ShapeFunction phi2{CosineSeries{{{basis.eigen()[1].c, basis.eigen()[1].s}}}};
  const ShapeFunction zero{Polynomial{{0.0}}};
  const MatrixXd coeffs = project_initial(std::vector<ShapeFunction>{phi2, zero}, basis, 6);
  MatrixXd expected = MatrixXd::Zero(2, 6);
  expected(0, 1) = 1.0;
  EXPECT_LE((coeffs - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ClosedLoop, ZeroGainIsBlockDiagonal) {
  const ValidatedPlant plant = example_plant();
  const SpectralBasis basis = build_basis(kPi, 1.0, 0.0, 5);
  const MatrixXd A = assemble_closed_loop(plant, basis, MatrixXd::Zero(3, 9), 3, 5);
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) {
      MatrixXd expected = MatrixXd::Zero(3, 3);
      if (a == b) expected = -basis.lambda(a) * MatrixXd(plant.D().asDiagonal()) + plant.Q();
      EXPECT_EQ(A.block(3 * a, 3 * b, 3, 3), expected);
    }
}

TEST(ClosedLoop, ScalarSingleMode) {
  PlantSpec spec;
  spec.m = 1;
  spec.D = VectorXd::Constant(1, 2.0);
  spec.Q = MatrixXd::Constant(1, 1, 3.0);
  spec.L = kPi;
  spec.shapes = {{Indicator{0.0, 1.0}}};
  const ValidatedPlant plant = validate_plant(spec);
  const SpectralBasis basis = build_basis(kPi, 1.0, 0.0, 1);
  const MatrixXd A = assemble_closed_loop(plant, basis, MatrixXd::Constant(1, 1, -4.0), 1, 1);
  const double b11 = project(spec.shapes[0], basis, 0);
  EXPECT_NEAR(A(0, 0), -0.25 * 2.0 + 3.0 + b11 * -4.0, 1e-15);
}

TEST(ClosedLoop, ExampleIsStable) {
  const ValidatedPlant plant = example_plant();
  const SpectralBasis basis = build_basis(kPi, 1.0, 0.0, 30);
  const Controller c = example_controller(plant, basis);
  const MatrixXd A = assemble_closed_loop(plant, c, basis, 30);
  EXPECT_EQ(A.rows(), 90);
  EXPECT_LT(spectral_abscissa(A), 0.0);
}

TEST(Integrate, ScalarDecay) {
  const Trajectory t = integrate(MatrixXd::Constant(1, 1, -1.0), VectorXd::Ones(1), 1, 1.0, 0.1);
  ASSERT_EQ(t.times.size(), 11u);
  EXPECT_NEAR(t.states.back()(0), std::exp(-1.0), 1e-10);
}

TEST(Integrate, Nilpotent) {
  MatrixXd N(2, 2);
  N << 0, 1, 0, 0;
  const Trajectory t = integrate(N, VectorXd::Unit(2, 1), 2, 1.0, 1.0);
  EXPECT_EQ(t.states.back()(0), 1.0);
  EXPECT_EQ(t.states.back()(1), 1.0);
}

TEST(Integrate, ZeroInitialData) {
  const ValidatedPlant plant = example_plant();
  const SpectralBasis basis = build_basis(kPi, 1.0, 0.0, 30);
  const Controller c = example_controller(plant, basis);
  const MatrixXd A = assemble_closed_loop(plant, c, basis, 30);
  const Trajectory t = integrate(A, VectorXd::Zero(90), 3, 1.0, 0.01);
  for (const auto& z : t.states) EXPECT_TRUE(z.isZero(0.0));
  EXPECT_THROW(estimate_decay(t, 0.2, 1.0), Error);
}

TEST(EstimateDecay, Exponential) {
  const Trajectory t = integrate(MatrixXd::Constant(1, 1, -2.0), VectorXd::Ones(1), 1, 1.0, 0.0025);
  EXPECT_NEAR(estimate_decay(t, 0.2, 1.0), 2.0, 1e-8);
}

TEST(EstimateDecay, PureUncontrolledMode) {
  const ValidatedPlant plant = example_plant();
  const SpectralBasis basis = build_basis(kPi, 1.0, 0.0, 30);
  const Controller c = example_controller(plant, basis);
  const MatrixXd A = assemble_closed_loop(plant, c, basis, 30);
  VectorXd z0 = VectorXd::Zero(90);
  z0.segment(9, 3) = Eigen::Vector3d(1.0, 0.5, 0.25);  // mode 4
  const Trajectory t = integrate(A, z0, 3, 1.0, 0.0025);
  const MatrixXd block = -basis.lambda(3) * MatrixXd(plant.D().asDiagonal()) + plant.Q();
  const double slowest = -spectral_abscissa(block);
  EXPECT_NEAR(estimate_decay(t, 0.2, 1.0), slowest, 0.03 * slowest);
}

TEST(Simulation, ExampleBoundAndTruncation) {
  const ValidatedPlant plant = example_plant();
  const SpectralBasis basis = build_basis(kPi, 1.0, 0.0, 60);
  const Controller c = example_controller(plant, basis);
  const Certificate cert = certificate(plant, c, solve_transform_family(plant), basis, 30);

  double decay[2];
  int idx = 0;
  for (int modes : {30, 60}) {
    const VectorXd z0 = stacked(project_initial(example_initial(), basis, modes));
    const MatrixXd A = assemble_closed_loop(plant, c, basis, modes);
    Trajectory t = integrate(A, z0, 3, 1.0, 0.0025);
    attach_bound(t, cert.M, 9.0);
    EXPECT_TRUE(t.overshoot_ok) << modes;
    decay[idx++] = estimate_decay(t, 0.2, 1.0);
  }
  EXPECT_NEAR(decay[0], decay[1], 0.01 * decay[1]);
}

TEST(Simulation, OpenLoopGrows) {
  const ValidatedPlant plant = example_plant();
  const SpectralBasis basis = build_basis(kPi, 1.0, 0.0, 30);
  const MatrixXd block = -basis.lambda(0) * MatrixXd(plant.D().asDiagonal()) + plant.Q();
  EXPECT_GT(spectral_abscissa(block), 0.0);
  const VectorXd z0 = stacked(project_initial(example_initial(), basis, 30));
  const MatrixXd A = assemble_closed_loop(plant, basis, MatrixXd::Zero(3, 9), 3, 30);
  const Trajectory t = integrate(A, z0, 3, 1.0, 0.0025);
  EXPECT_GT(t.l2_norm.back(), t.l2_norm.front());
}

TEST(Simulation, ParsevalAgainstFieldQuadrature) {
  const SpectralBasis basis = build_basis(kPi, 1.0, 0.0, 8);
  MatrixXd coeffs = MatrixXd::Zero(2, 8);
  coeffs(0, 0) = 1.0;
  coeffs(0, 3) = -0.5;
  coeffs(1, 1) = 0.7;
  coeffs(1, 7) = 0.2;
  const Trajectory t = integrate(MatrixXd::Zero(16, 16), stacked(coeffs), 2, 1.0, 1.0);
  const std::vector<double> grid = uniform_grid(kPi, 2001);
  const MatrixXd field = reconstruct_field(t, basis, grid).front();
  // Trapezoid rule on the reconstructed field.
  double energy = 0.0;
  for (std::size_t g = 0; g + 1 < grid.size(); ++g) {
    const double h = grid[g + 1] - grid[g];
    energy += 0.5 * h * (field.col(g).squaredNorm() + field.col(g + 1).squaredNorm());
  }
  EXPECT_NEAR(std::sqrt(energy), t.l2_norm.front(), 1e-4);
  EXPECT_NEAR(t.l2_norm.front(), coeffs.norm(), 1e-12);
}

TEST(TargetCoordinates, ExampleAndPerturbation) {
  const ValidatedPlant plant = example_plant();
  const SpectralBasis basis = build_basis(kPi, 1.0, 0.0, 30);
  const Controller c = example_controller(plant, basis);
  const TransformFamily family = solve_transform_family(plant);
  const VectorXd z0 = stacked(project_initial(example_initial(), basis, 30));
  const MatrixXd A = assemble_closed_loop(plant, c, basis, 30);
  const Trajectory t = integrate(A, z0, 3, 1.0, 0.0025);
  const TargetResidual exact = target_coordinates(t, A, plant, family, c, basis);
  EXPECT_LE(exact.relative, 1e-6);

  Controller perturbed = c;
  perturbed.K *= 1.1;
  const MatrixXd Ap = assemble_closed_loop(plant, perturbed, basis, 30);
  const Trajectory tp = integrate(Ap, z0, 3, 1.0, 0.0025);
  const TargetResidual off = target_coordinates(tp, Ap, plant, family, perturbed, basis);
  EXPECT_GT(off.relative, exact.relative);
  EXPECT_GT(off.relative, 1e-3);
}

TEST(TargetCoordinates, IdentityTransforms) {
  PlantSpec spec = testing::example_spec();
  spec.D = Eigen::Vector3d(4, 4, 4);
  const ValidatedPlant plant = validate_plant(spec);
  const SpectralBasis basis = build_basis(kPi, 1.0, 0.0, 30);
  const Controller c = build_controller(plant, basis, 9.0);
  const TransformFamily family = solve_transform_family(plant);
  const VectorXd z0 = stacked(project_initial(example_initial(), basis, 30));
  const MatrixXd A = assemble_closed_loop(plant, c, basis, 30);
  const Trajectory t = integrate(A, z0, 3, 1.0, 0.01);
  // With T_n = I the target residual is the plain z-coordinate mismatch
  // between A z and diag(H_n) z on the controlled modes.
  double direct = 0.0;
  for (const auto& z : t.states) {
    const VectorXd zd = A * z;
    double sq = 0.0;
    for (int k = 0; k < c.N; ++k) {
      const MatrixXd H = target_block(plant, c.K_Q, basis.lambda(k));
      sq += (zd.segment(3 * k, 3) - H * z.segment(3 * k, 3)).squaredNorm();
    }
    direct = std::max(direct, std::sqrt(sq));
  }
  const TargetResidual r = target_coordinates(t, A, plant, family, c, basis);
  EXPECT_NEAR(r.absolute, direct, 1e-12 * std::max(1.0, direct));
  EXPECT_LE(r.relative, 1e-8);
}

TEST(Config, Validation) {
  SimConfig config;
  EXPECT_NO_THROW(validate_config(config, 3));
  config.modes = 3;
  EXPECT_THROW(validate_config(config, 3), Error);
  config = SimConfig{};
  config.t_final = 0.0;
  EXPECT_THROW(validate_config(config, 3), Error);
  config = SimConfig{};
  config.fit_begin = 0.9;
  config.fit_end = 0.5;
  EXPECT_THROW(validate_config(config, 3), Error);
  EXPECT_DOUBLE_EQ(SimConfig{}.output_step(), 1.0 / 400.0);
}

}  // namespace
}  // namespace cascade_stab
