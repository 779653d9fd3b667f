#include "cascade_stab/synthesis.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "cascade_stab/error.h"
#include "cascade_stab/linalg.h"

namespace cascade_stab {
namespace {

constexpr int kMaxModes = 100000;
constexpr double kConditionLimit = 1e12;

std::vector<double> default_offsets(int m) {
  std::vector<double> offsets(m);
  for (int k = 0; k < m; ++k) offsets[k] = k + 1.0;
  return offsets;
}

Eigen::MatrixXd identity(int m) { return Eigen::MatrixXd::Identity(m, m); }

}  // namespace

double n_selection_margin(const ValidatedPlant& plant, double lambda, double delta) {
  Eigen::MatrixXd M = sym(plant.Q());
  M.diagonal() += (delta - lambda * plant.D().array()).matrix();
  return max_eigenvalue_symmetric(M);
}

int select_N(const ValidatedPlant& plant, const SpectralBasis& basis, double delta) {
  if (!(delta > 0.0)) throw Error(ErrorCode::kBadInput, "decay rate must be positive");
  SpectralBasis working = basis;
  for (int N = 0; N < kMaxModes; ++N) {
    if (N >= working.size())
      working = extend_basis(working, std::max(2 * working.size(), N + 1));
    if (n_selection_margin(plant, working.lambda(N), delta) < 0.0) return N;
  }
  throw Error(ErrorCode::kBasisExhausted, "no N found below the mode limit");
}

QStabilization stabilize_Q(const ValidatedPlant& plant, double delta, double lambda1,
                           const std::vector<double>& pole_offsets) {
  const int m = plant.m();
  const std::vector<double> offsets = pole_offsets.empty() ? default_offsets(m) : pole_offsets;
  if (static_cast<int>(offsets.size()) != m)
    throw Error(ErrorCode::kBadInput, "need exactly m pole offsets");
  for (std::size_t a = 0; a < offsets.size(); ++a) {
    if (!(offsets[a] > 0.0)) throw Error(ErrorCode::kBadInput, "pole offsets must be positive");
    for (std::size_t b = 0; b < a; ++b)
      if (offsets[a] == offsets[b])
        throw Error(ErrorCode::kBadInput, "pole offsets must be distinct");
  }

  const double shift = delta - lambda1 * plant.d_last();
  Eigen::VectorXd poles(m);
  for (int k = 0; k < m; ++k) poles(k) = -shift - offsets[k];
  const Eigen::VectorXd b = Eigen::VectorXd::Unit(m, 0);

  QStabilization out;
  out.K_Q = place_poles_ackermann(plant.Q(), b, poles);
  Eigen::MatrixXd Abar = plant.Q();
  Abar.row(0) += out.K_Q;
  Abar.diagonal().array() += shift;
  out.P = solve_lyapunov(Abar, identity(m));
  return out;
}

Eigen::RowVectorXd modal_gain(const ValidatedPlant& plant, const ModalTransform& Tn,
                              double lambda, const Eigen::RowVectorXd& K_Q) {
  const int m = plant.m();
  const Eigen::MatrixXd& Q = plant.Q();
  const Eigen::MatrixXd D = plant.D().asDiagonal();
  const Eigen::MatrixXd inner =
      (Q - lambda * plant.d_last() * identity(m)) * Tn.T + Tn.T * (lambda * D - Q);
  return inner.row(0) + K_Q * Tn.T;
}

Eigen::RowVectorXd modal_gain_via_Gn(const ValidatedPlant& plant,
                                     const TransformFamily& family, const ModalTransform& Tn,
                                     double lambda, const Eigen::RowVectorXd& K_Q) {
  return (K_Q - compute_Gn(plant, family, lambda, Tn)) * Tn.T;
}

std::vector<Eigen::RowVectorXd> modal_gains(const ValidatedPlant& plant,
                                            const TransformFamily& family,
                                            const SpectralBasis& basis,
                                            const Eigen::RowVectorXd& K_Q, int N) {
  std::vector<Eigen::RowVectorXd> gains;
  gains.reserve(N);
  for (int k = 0; k < N; ++k) {
    const double lambda = basis.lambda(k);
    gains.push_back(modal_gain(plant, assemble_Tn(family, lambda, k, N), lambda, K_Q));
  }
  return gains;
}

InputMatrix input_matrix(const std::vector<ShapeFunction>& shapes, const SpectralBasis& basis,
                         int N) {
  if (static_cast<int>(shapes.size()) != N) {
    std::ostringstream os;
    os << "hypothesis (H) needs exactly N = " << N << " shapes, got " << shapes.size();
    throw Error(ErrorCode::kBadShape, os.str());
  }
  InputMatrix out;
  out.B.resize(N, N);
  for (int k = 0; k < N; ++k) out.B.row(k) = input_projection_row(shapes, basis, k);
  out.condition = N == 0 ? 1.0 : condition_number(out.B);
  if (!(out.condition <= kConditionLimit)) {
    std::ostringstream os;
    os << "input projection matrix has condition number " << out.condition;
    throw Error(ErrorCode::kHypothesisHViolated, os.str());
  }
  return out;
}

Eigen::MatrixXd assemble_gain_matrix(const std::vector<Eigen::RowVectorXd>& Kbar,
                                     const Eigen::MatrixXd& Bmat) {
  const int N = static_cast<int>(Kbar.size());
  if (N == 0) return Eigen::MatrixXd(0, 0);
  const int m = static_cast<int>(Kbar.front().size());
  Eigen::MatrixXd diag_rows = Eigen::MatrixXd::Zero(N, m * N);
  for (int k = 0; k < N; ++k) diag_rows.block(k, k * m, 1, m) = Kbar[k];
  return Bmat.fullPivLu().solve(diag_rows);
}

ModalSynthesis modal_synthesis(const ValidatedPlant& plant, const SpectralBasis& basis,
                               const Eigen::MatrixXd& Bmat, double delta, int N,
                               const std::vector<double>& pole_offsets) {
  ModalSynthesis out;
  out.family = solve_transform_family(plant);
  out.q = stabilize_Q(plant, delta, basis.lambda(0), pole_offsets);
  out.Kbar = modal_gains(plant, out.family, basis, out.q.K_Q, N);
  out.K = assemble_gain_matrix(out.Kbar, Bmat);
  return out;
}

Controller build_controller(const ValidatedPlant& plant, const SpectralBasis& basis,
                            double delta, const SynthesisOptions& options) {
  const int N_min = select_N(plant, basis, delta);
  int N = N_min;
  if (options.N) {
    if (*options.N < N_min) {
      std::ostringstream os;
      os << "N = " << *options.N << " is below the smallest admissible N = " << N_min;
      throw Error(ErrorCode::kBadInput, os.str());
    }
    N = *options.N;
  }
  const SpectralBasis working = extend_basis(basis, N + 1);
  const auto& shapes = plant.spec().shapes;
  if (static_cast<int>(shapes.size()) < N) {
    std::ostringstream os;
    os << "N = " << N << " needs at least " << N << " shape functions, the plant has "
       << shapes.size();
    throw Error(ErrorCode::kBadShape, os.str());
  }
  const std::vector<ShapeFunction> used(shapes.begin(), shapes.begin() + N);
  const InputMatrix input = input_matrix(used, working, N);

  const ModalSynthesis modal =
      modal_synthesis(plant, working, input.B, delta, N, options.pole_offsets);

  Controller c;
  c.delta = delta;
  c.N = N;
  c.N_min = N_min;
  c.pole_offsets = options.pole_offsets.empty() ? default_offsets(plant.m())
                                                : options.pole_offsets;
  c.K_Q = modal.q.K_Q;
  c.P = modal.q.P;
  c.Kbar = modal.Kbar;
  c.Bmat = input.B;
  c.Bmat_condition = input.condition;
  c.K = modal.K;
  return c;
}

Eigen::MatrixXd target_block(const ValidatedPlant& plant, const Eigen::RowVectorXd& K_Q,
                             double lambda) {
  Eigen::MatrixXd H = plant.Q();
  H.row(0) += K_Q;
  H.diagonal().array() -= lambda * plant.d_last();
  return H;
}

double certificate_rho0(double rho, double rho_bar, double beta, double K_norm) {
  return 2.0 / (rho * rho_bar * beta * K_norm * K_norm);
}

Certificate certificate(const ValidatedPlant& plant, const Controller& controller,
                        const TransformFamily& family, const SpectralBasis& basis, int modes) {
  const int N = controller.N;
  const double delta = controller.delta;
  const SpectralBasis working = extend_basis(basis, std::max(modes, N + 1));

  Certificate cert;
  const double mu = -n_selection_margin(plant, working.lambda(N), delta);
  if (!(mu > 0.0)) throw Error(ErrorCode::kCertificateViolation, "N-selection condition fails");
  // Factor-2 slack over the Schur-complement minimum 1/(2 mu).
  cert.rho = 1.0 / mu;
  // Sym(P Abar) = -I/2, so the Schur complement needs rho_bar > 2; same slack.
  cert.rho_bar = 4.0;

  double max_inv_sq = 1.0, max_fwd_sq = 1.0, max_inv_sq_controlled = 0.0;
  for (int k = 0; k < N; ++k) {
    const ModalTransform Tn = assemble_Tn(family, working.lambda(k), k, N);
    const double inv = spectral_norm(Tn.T_inv);
    const double fwd = spectral_norm(Tn.T);
    max_inv_sq = std::max(max_inv_sq, inv * inv);
    max_fwd_sq = std::max(max_fwd_sq, fwd * fwd);
    max_inv_sq_controlled = std::max(max_inv_sq_controlled, inv * inv);
  }
  cert.c_lower = 1.0 / max_inv_sq;
  cert.c_upper = max_fwd_sq;

  double shape_energy = 0.0;
  for (int j = 0; j < N; ++j) shape_energy += plant.spec().shapes[j].l2_norm_squared(plant.spec().L);
  cert.beta = max_inv_sq_controlled * shape_energy;
  cert.K_norm = spectral_norm(controller.K);

  const double p_max = N > 0 ? max_eigenvalue_symmetric(controller.P) : 1.0;
  const double p_min = N > 0 ? min_eigenvalue_symmetric(controller.P) : 1.0;
  if (N == 0) {
    // No controlled modes: V is a plain multiple of the tail energy.
    cert.rho0 = 1.0;
    cert.M = std::sqrt(cert.c_upper / cert.c_lower);
  } else {
    cert.rho0 = certificate_rho0(cert.rho, cert.rho_bar, cert.beta, cert.K_norm);
    cert.M = std::sqrt(cert.c_upper * std::max(p_max, cert.rho0) /
                       (cert.c_lower * std::min(p_min, cert.rho0)));
  }

  cert.gamma_margin = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < N; ++k) {
    const Eigen::MatrixXd H = target_block(plant, controller.K_Q, working.lambda(k));
    Eigen::MatrixXd block = sym(controller.P * H) + delta * controller.P;
    block.diagonal().array() += 1.0 / cert.rho_bar;
    cert.gamma_margin = std::max(cert.gamma_margin, max_eigenvalue_symmetric(block));
  }

  const double omega_shift = 1.0 / (2.0 * cert.rho);
  for (int k = N; k < modes; ++k)
    cert.omega_margins.push_back(
        n_selection_margin(plant, working.lambda(k), delta + omega_shift));

  if (N > 0 && !(cert.gamma_margin < 0.0)) {
    std::ostringstream os;
    os << "Gamma is not negative definite (max eigenvalue " << cert.gamma_margin << ")";
    throw Error(ErrorCode::kCertificateViolation, os.str());
  }
  for (std::size_t idx = 0; idx < cert.omega_margins.size(); ++idx) {
    if (!(cert.omega_margins[idx] < 0.0)) {
      std::ostringstream os;
      os << "Omega_" << N + 1 + idx << " is not negative definite (max eigenvalue "
         << cert.omega_margins[idx] << ")";
      throw Error(ErrorCode::kCertificateViolation, os.str());
    }
  }
  return cert;
}

ModalOpenLoop assemble_open_loop(const ValidatedPlant& plant, const SpectralBasis& basis,
                                 const Eigen::MatrixXd& Bmat, int N) {
  const int m = plant.m();
  ModalOpenLoop out;
  out.A = Eigen::MatrixXd::Zero(m * N, m * N);
  out.Btilde = Eigen::MatrixXd::Zero(m * N, N);
  const Eigen::MatrixXd D = plant.D().asDiagonal();
  for (int k = 0; k < N; ++k) {
    out.A.block(k * m, k * m, m, m) = -basis.lambda(k) * D + plant.Q();
    out.Btilde.row(k * m) = Bmat.row(k);
  }
  return out;
}

Eigen::MatrixXd direct_riccati_gain(const ModalOpenLoop& open_loop, double delta) {
  const Eigen::Index n = open_loop.A.rows();
  const Eigen::Index inputs = open_loop.Btilde.cols();
  Eigen::MatrixXd shifted = open_loop.A;
  shifted.diagonal().array() += delta;
  const Eigen::MatrixXd X =
      solve_care(shifted, open_loop.Btilde, Eigen::MatrixXd::Identity(n, n),
                 Eigen::MatrixXd::Identity(inputs, inputs));
  return -open_loop.Btilde.transpose() * X;
}

DirectBaseline direct_baseline(const ValidatedPlant& plant, const SpectralBasis& basis,
                               double delta, int N) {
  if (N < 1) throw Error(ErrorCode::kBadInput, "direct baseline needs N >= 1");
  const SpectralBasis working = extend_basis(basis, N);
  const auto& shapes = plant.spec().shapes;
  if (static_cast<int>(shapes.size()) < N)
    throw Error(ErrorCode::kBadShape, "not enough shape functions for the direct baseline");
  const std::vector<ShapeFunction> used(shapes.begin(), shapes.begin() + N);
  const InputMatrix input = input_matrix(used, working, N);

  const auto start = std::chrono::steady_clock::now();
  DirectBaseline out;
  out.K = direct_riccati_gain(assemble_open_loop(plant, working, input.B, N), delta);
  out.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace cascade_stab
