#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "cascade_stab/model.h"
#include "cascade_stab/spectral.h"
#include "cascade_stab/transform.h"

namespace cascade_stab {

/// lambda_max(-lambda D + Sym(Q) + delta I). Negative means every mode with
/// this eigenvalue (or a larger one) already decays at rate delta.
double n_selection_margin(const ValidatedPlant& plant, double lambda, double delta);

/// Smallest N >= 0 with n_selection_margin(lambda_{N+1}) < 0. The basis is
/// extended internally when it is too short.
int select_N(const ValidatedPlant& plant, const SpectralBasis& basis, double delta);

struct QStabilization {
  Eigen::RowVectorXd K_Q;
  Eigen::MatrixXd P;  // solves Abar^T P + P Abar = -I
};

/// Places the poles of Q + B K_Q at -(delta - lambda1 d_m) - offset_k and
/// certifies Abar = Q + B K_Q + (delta - lambda1 d_m) I with a Lyapunov
/// matrix P. Offsets default to 1, ..., m and must be distinct and positive.
QStabilization stabilize_Q(const ValidatedPlant& plant, double delta, double lambda1,
                           const std::vector<double>& pole_offsets = {});

/// Kbar_n = B^T((Q - lambda_n d_m I) T_n + T_n (lambda_n D - Q)) + K_Q T_n.
Eigen::RowVectorXd modal_gain(const ValidatedPlant& plant, const ModalTransform& Tn,
                              double lambda, const Eigen::RowVectorXd& K_Q);

/// (-G_n + K_Q) T_n, the second route to the same gain.
Eigen::RowVectorXd modal_gain_via_Gn(const ValidatedPlant& plant,
                                     const TransformFamily& family, const ModalTransform& Tn,
                                     double lambda, const Eigen::RowVectorXd& K_Q);

/// Kbar_1 .. Kbar_N.
std::vector<Eigen::RowVectorXd> modal_gains(const ValidatedPlant& plant,
                                            const TransformFamily& family,
                                            const SpectralBasis& basis,
                                            const Eigen::RowVectorXd& K_Q, int N);

struct InputMatrix {
  Eigen::MatrixXd B;  // entry (n, j) = <b_j, phi_n>
  double condition = 0.0;
};

/// Projections of the first N shapes on the first N modes. Throws
/// Error(kHypothesisHViolated) when the condition number exceeds 1e12.
InputMatrix input_matrix(const std::vector<ShapeFunction>& shapes, const SpectralBasis& basis,
                         int N);

/// K = Bmat^{-1} diag-rows{Kbar_1, ..., Kbar_N}, an N x mN matrix.
Eigen::MatrixXd assemble_gain_matrix(const std::vector<Eigen::RowVectorXd>& Kbar,
                                     const Eigen::MatrixXd& Bmat);

struct Controller {
  double delta = 0.0;
  int N = 0;
  int N_min = 0;
  std::vector<double> pole_offsets;
  Eigen::RowVectorXd K_Q;
  Eigen::MatrixXd P;
  std::vector<Eigen::RowVectorXd> Kbar;
  Eigen::MatrixXd Bmat;
  double Bmat_condition = 1.0;
  Eigen::MatrixXd K;
};

struct SynthesisOptions {
  std::optional<int> N;
  std::vector<double> pole_offsets;  // empty: 1, ..., m
};

/// The modal pieces of a controller for a fixed N and input matrix: the
/// transform family, K_Q, the modal gains and K. This is the part timed
/// against the direct baseline.
struct ModalSynthesis {
  TransformFamily family;
  QStabilization q;
  std::vector<Eigen::RowVectorXd> Kbar;
  Eigen::MatrixXd K;
};
ModalSynthesis modal_synthesis(const ValidatedPlant& plant, const SpectralBasis& basis,
                               const Eigen::MatrixXd& Bmat, double delta, int N,
                               const std::vector<double>& pole_offsets = {});

/// Full controller: N selection (or validation of a forced N against N_min),
/// K_Q, transform family, modal gains, input matrix and K. Uses the first N
/// shapes of the plant.
Controller build_controller(const ValidatedPlant& plant, const SpectralBasis& basis,
                            double delta, const SynthesisOptions& options = {});

/// H_n = -lambda_n d_m I + Q + B K_Q, the closed-loop block of mode n in
/// target coordinates.
Eigen::MatrixXd target_block(const ValidatedPlant& plant, const Eigen::RowVectorXd& K_Q,
                             double lambda);

struct Certificate {
  double rho = 0.0;
  double rho_bar = 0.0;
  double beta = 0.0;
  double rho0 = 0.0;
  double c_lower = 0.0;
  double c_upper = 0.0;
  double M = 0.0;
  double K_norm = 0.0;
  double gamma_margin = 0.0;          // max eigenvalue over the blocks of Gamma
  std::vector<double> omega_margins;  // max eigenvalue of Omega_n, n = N+1 .. modes
};

/// Lyapunov certificate constants of the closed loop and the sign conditions
/// Gamma < 0 and Omega_n < 0 for n = N+1 .. modes. Throws
/// Error(kCertificateViolation) if any sign condition fails.
Certificate certificate(const ValidatedPlant& plant, const Controller& controller,
                        const TransformFamily& family, const SpectralBasis& basis, int modes);

/// ρ0 = 2 / (ρ ρ̄ β |K|^2).
double certificate_rho0(double rho, double rho_bar, double beta, double K_norm);

/// A = diag{-lambda_n D + Q} and Btilde = col{B Bmat.row(n)} for n < N.
struct ModalOpenLoop {
  Eigen::MatrixXd A;
  Eigen::MatrixXd Btilde;
};
ModalOpenLoop assemble_open_loop(const ValidatedPlant& plant, const SpectralBasis& basis,
                                 const Eigen::MatrixXd& Bmat, int N);

/// K = -Btilde^T X with X the stabilizing Riccati solution for
/// (A + delta I, Btilde) and unit weights.
Eigen::MatrixXd direct_riccati_gain(const ModalOpenLoop& open_loop, double delta);

struct DirectBaseline {
  Eigen::MatrixXd K;
  double seconds = 0.0;
};

/// Synthesizes a gain for the whole mN-dimensional modal system at once and
/// reports the wall time of that synthesis.
DirectBaseline direct_baseline(const ValidatedPlant& plant, const SpectralBasis& basis,
                               double delta, int N);

}  // namespace cascade_stab
