#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "cascade_stab/model.h"
#include "cascade_stab/spectral.h"
#include "cascade_stab/synthesis.h"
#include "cascade_stab/transform.h"

namespace cascade_stab {

struct SimConfig {
  int modes = 30;
  double t_final = 1.0;
  double dt_out = 0.0;  // 0 selects t_final / 400
  int grid_points = 101;
  double fit_begin = 0.2;  // fractions of t_final
  double fit_end = 1.0;

  double output_step() const { return dt_out > 0.0 ? dt_out : t_final / 400.0; }
};

/// Throws Error(kBadInput) unless modes > N, t_final > 0 and dt_out >= 0.
void validate_config(const SimConfig& config, int N);

/// Modal states over time. State vectors stack z_1 .. z_modes, each of length m.
struct Trajectory {
  int m = 0;
  int modes = 0;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<double> l2_norm;  // Parseval: Euclidean norm of the stacked state
  std::optional<double> fitted_decay;
  std::vector<double> bound;  // M e^{-delta t} |z(0)| when a certificate is attached
  bool overshoot_ok = true;

  /// z_n(t_index) as an m-vector (zero-based mode).
  Eigen::VectorXd mode(std::size_t t_index, int k) const {
    return states[t_index].segment(static_cast<Eigen::Index>(k) * m, m);
  }
};

/// Coefficients <z0_i, phi_k> as an m x modes matrix, exact for shape kinds.
Eigen::MatrixXd project_initial(const std::vector<ShapeFunction>& z0, const SpectralBasis& basis,
                                int modes);

/// Same for arbitrary components, by adaptive quadrature.
Eigen::MatrixXd project_initial(const std::vector<std::function<double(double)>>& z0,
                                const SpectralBasis& basis, int modes);

/// Closed-loop modal matrix of size (m modes)^2: for each mode
/// z_n' = (-lambda_n D + Q) z_n + B Bcal_n K z^N with Bcal_n the projections of
/// the first N plant shapes on mode n. A zero-row K gives the open loop.
Eigen::MatrixXd assemble_closed_loop(const ValidatedPlant& plant, const SpectralBasis& basis,
                                     const Eigen::MatrixXd& K, int N, int modes);

Eigen::MatrixXd assemble_closed_loop(const ValidatedPlant& plant, const Controller& controller,
                                     const SpectralBasis& basis, int modes);

/// Exact LTI propagation: z(t + dt) = exp(dt A) z(t), recorded every dt_out.
Trajectory integrate(const Eigen::MatrixXd& system, const Eigen::VectorXd& z0, int m,
                     double t_final, double dt_out);

/// Least-squares slope of ln|z(t)| over [begin, end] * t_final, sign flipped.
/// Samples whose norm has reached numerical zero are dropped; throws
/// Error(kZeroNorm) if fewer than two usable samples remain.
double estimate_decay(const Trajectory& trajectory, double fit_begin, double fit_end);

struct TargetResidual {
  double absolute = 0.0;  // max_t |y^N' - H y^N|
  double relative = 0.0;  // divided by max_t |H y^N|
};

/// y_n = T_n z_n for n < N with y' taken from the exact derivative
/// T_n (system z)_n, compared against the target dynamics H_n y_n.
TargetResidual target_coordinates(const Trajectory& trajectory, const Eigen::MatrixXd& system,
                                  const ValidatedPlant& plant, const TransformFamily& family,
                                  const Controller& controller, const SpectralBasis& basis);

/// Fields z_i(t, x) on `grid` for every recorded time: one m x grid matrix each.
std::vector<Eigen::MatrixXd> reconstruct_field(const Trajectory& trajectory,
                                               const SpectralBasis& basis,
                                               const std::vector<double>& grid);

/// Uniform grid of `points` samples on [0, L].
std::vector<double> uniform_grid(double L, int points);

/// Attaches the certificate bound and checks it at every sample.
void attach_bound(Trajectory& trajectory, double M, double delta);

}  // namespace cascade_stab
