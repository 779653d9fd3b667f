#include "cascade_stab/simulator.h"

#include <cmath>
#include <sstream>

#include "cascade_stab/error.h"
#include "cascade_stab/linalg.h"

namespace cascade_stab {

void validate_config(const SimConfig& config, int N) {
  if (config.modes <= N) {
    std::ostringstream os;
    os << "simulation needs more modes than N = " << N << ", got " << config.modes;
    throw Error(ErrorCode::kBadInput, os.str());
  }
  if (!(config.t_final > 0.0)) throw Error(ErrorCode::kBadInput, "t_final must be positive");
  if (config.dt_out < 0.0) throw Error(ErrorCode::kBadInput, "dt_out must be positive");
  if (config.grid_points < 2) throw Error(ErrorCode::kBadInput, "need at least two grid points");
  if (!(0.0 <= config.fit_begin && config.fit_begin < config.fit_end && config.fit_end <= 1.0))
    throw Error(ErrorCode::kBadInput, "fit window must satisfy 0 <= begin < end <= 1");
}

Eigen::MatrixXd project_initial(const std::vector<ShapeFunction>& z0, const SpectralBasis& basis,
                                int modes) {
  const SpectralBasis working = extend_basis(basis, modes);
  Eigen::MatrixXd coeffs(z0.size(), modes);
  for (std::size_t i = 0; i < z0.size(); ++i)
    for (int k = 0; k < modes; ++k) coeffs(i, k) = project(z0[i], working, k);
  return coeffs;
}

Eigen::MatrixXd project_initial(const std::vector<std::function<double(double)>>& z0,
                                const SpectralBasis& basis, int modes) {
  const SpectralBasis working = extend_basis(basis, modes);
  Eigen::MatrixXd coeffs(z0.size(), modes);
  for (std::size_t i = 0; i < z0.size(); ++i)
    for (int k = 0; k < modes; ++k) coeffs(i, k) = project(z0[i], working, k);
  return coeffs;
}

Eigen::MatrixXd assemble_closed_loop(const ValidatedPlant& plant, const SpectralBasis& basis,
                                     const Eigen::MatrixXd& K, int N, int modes) {
  const int m = plant.m();
  const SpectralBasis working = extend_basis(basis, modes);
  const Eigen::MatrixXd D = plant.D().asDiagonal();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m * modes, m * modes);
  for (int k = 0; k < modes; ++k)
    A.block(k * m, k * m, m, m) = -working.lambda(k) * D + plant.Q();
  if (N == 0) return A;

  const auto& shapes = plant.spec().shapes;
  const std::vector<ShapeFunction> used(shapes.begin(), shapes.begin() + N);
  for (int k = 0; k < modes; ++k) {
    const Eigen::RowVectorXd coupling = input_projection_row(used, working, k) * K;
    A.block(k * m, 0, 1, m * N) += coupling;
  }
  return A;
}

Eigen::MatrixXd assemble_closed_loop(const ValidatedPlant& plant, const Controller& controller,
                                     const SpectralBasis& basis, int modes) {
  return assemble_closed_loop(plant, basis, controller.K, controller.N, modes);
}

Trajectory integrate(const Eigen::MatrixXd& system, const Eigen::VectorXd& z0, int m,
                     double t_final, double dt_out) {
  if (!(dt_out > 0.0) || !(t_final > 0.0))
    throw Error(ErrorCode::kBadInput, "t_final and dt_out must be positive");
  const long steps = std::max(1L, std::lround(t_final / dt_out));
  const Eigen::MatrixXd propagator = matrix_exponential(dt_out * system);

  Trajectory out;
  out.m = m;
  out.modes = static_cast<int>(z0.size() / m);
  out.times.reserve(steps + 1);
  out.states.reserve(steps + 1);
  Eigen::VectorXd z = z0;
  for (long s = 0; s <= steps; ++s) {
    if (s > 0) z = propagator * z;
    out.times.push_back(static_cast<double>(s) * dt_out);
    out.states.push_back(z);
    out.l2_norm.push_back(z.norm());
  }
  return out;
}

double estimate_decay(const Trajectory& trajectory, double fit_begin, double fit_end) {
  const double t_final = trajectory.times.back();
  const double lo = fit_begin * t_final, hi = fit_end * t_final;
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
    const double t = trajectory.times[i];
    const double norm = trajectory.l2_norm[i];
    if (t < lo - 1e-12 || t > hi + 1e-12) continue;
    if (!(norm > 1e-300)) break;  // window ends where the norm underflows
    const double y = std::log(norm);
    n += 1;
    sx += t;
    sy += y;
    sxx += t * t;
    sxy += t * y;
  }
  if (n < 2) throw Error(ErrorCode::kZeroNorm, "fewer than two samples with nonzero norm");
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return -slope;
}

TargetResidual target_coordinates(const Trajectory& trajectory, const Eigen::MatrixXd& system,
                                  const ValidatedPlant& plant, const TransformFamily& family,
                                  const Controller& controller, const SpectralBasis& basis) {
  const int m = plant.m();
  const int N = controller.N;
  std::vector<ModalTransform> transforms;
  std::vector<Eigen::MatrixXd> blocks;
  for (int k = 0; k < N; ++k) {
    transforms.push_back(assemble_Tn(family, basis.lambda(k), k, N));
    blocks.push_back(target_block(plant, controller.K_Q, basis.lambda(k)));
  }
  TargetResidual out;
  double scale = 0.0;
  for (const auto& z : trajectory.states) {
    const Eigen::VectorXd z_dot = system * z;
    double mismatch_sq = 0.0, reference_sq = 0.0;
    for (int k = 0; k < N; ++k) {
      const Eigen::VectorXd y = transforms[k].T * z.segment(k * m, m);
      const Eigen::VectorXd y_dot = transforms[k].T * z_dot.segment(k * m, m);
      const Eigen::VectorXd target = blocks[k] * y;
      mismatch_sq += (y_dot - target).squaredNorm();
      reference_sq += target.squaredNorm();
    }
    out.absolute = std::max(out.absolute, std::sqrt(mismatch_sq));
    scale = std::max(scale, std::sqrt(reference_sq));
  }
  out.relative = scale > 0.0 ? out.absolute / scale : out.absolute;
  return out;
}

std::vector<Eigen::MatrixXd> reconstruct_field(const Trajectory& trajectory,
                                               const SpectralBasis& basis,
                                               const std::vector<double>& grid) {
  std::vector<Eigen::MatrixXd> fields;
  fields.reserve(trajectory.states.size());
  for (const auto& z : trajectory.states) {
    const Eigen::Map<const Eigen::MatrixXd> coeffs(z.data(), trajectory.m, trajectory.modes);
    fields.push_back(expand(coeffs, basis, grid));
  }
  return fields;
}

std::vector<double> uniform_grid(double L, int points) {
  std::vector<double> grid(points);
  for (int g = 0; g < points; ++g) grid[g] = L * g / (points - 1);
  return grid;
}

void attach_bound(Trajectory& trajectory, double M, double delta) {
  const double initial = trajectory.l2_norm.front();
  trajectory.bound.clear();
  trajectory.overshoot_ok = true;
  for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
    const double bound = M * std::exp(-delta * trajectory.times[i]) * initial;
    trajectory.bound.push_back(bound);
    if (trajectory.l2_norm[i] > bound * (1.0 + 1e-12)) trajectory.overshoot_ok = false;
  }
}

}  // namespace cascade_stab
