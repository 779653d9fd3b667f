#include "cascade_stab/transform.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cascade_stab/error.h"

namespace cascade_stab {
namespace {

int half_ceil(int i) { return (i + 1) / 2; }

double max_abs(const Eigen::MatrixXd& A) {
  return A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff();
}

}  // namespace

bool in_support(int m, int i, int row, int col) {
  const int c = half_ceil(i);
  return row >= 0 && row <= m - 2 - c && col >= row + c && col <= m - 1;
}

Eigen::MatrixXd masked_residual(const ValidatedPlant& plant, const Eigen::MatrixXd& Tbar_i,
                                const Eigen::MatrixXd& Tbar_prev) {
  const Eigen::MatrixXd& Q = plant.Q();
  Eigen::MatrixXd shift = plant.D().asDiagonal();
  shift.diagonal().array() -= plant.d_last();
  Eigen::MatrixXd R = Q * Tbar_i - Tbar_i * Q + Tbar_prev * shift;
  R.row(0).setZero();
  return R;
}

std::vector<SylvesterCheck> check_sylvester(const ValidatedPlant& plant,
                                            const TransformFamily& family) {
  std::vector<SylvesterCheck> checks;
  const int m = plant.m();
  const double q_scale = max_abs(plant.Q());
  for (int i = 1; i <= family.sigma_bar; ++i) {
    const Eigen::MatrixXd& current = family.Tbar[i - 1];
    const Eigen::MatrixXd previous =
        i == 1 ? Eigen::MatrixXd::Identity(m, m) : family.Tbar[i - 2];
    const Eigen::MatrixXd R = masked_residual(plant, current, previous);
    SylvesterCheck check;
    check.i = i;
    Eigen::Index r = 0, c = 0;
    check.residual = R.cwiseAbs().maxCoeff(&r, &c);
    check.row = static_cast<int>(r);
    check.col = static_cast<int>(c);
    check.tolerance = 1e-9 * std::max(1.0, q_scale * max_abs(current));
    checks.push_back(check);
  }
  return checks;
}

TransformFamily solve_transform_family(const ValidatedPlant& plant) {
  const int m = plant.m();
  TransformFamily family;
  family.m = m;
  family.sigma_bar = plant.indices().sigma_bar;
  Eigen::MatrixXd previous = Eigen::MatrixXd::Identity(m, m);
  for (int i = 1; i <= family.sigma_bar; ++i) {
    const int c = half_ceil(i);
    Eigen::MatrixXd current = Eigen::MatrixXd::Zero(m, m);
    for (int j = m - 1 - c; j >= 1; --j) {
      for (int k = m; k >= j + c; --k) {
        // Zero-based: unknown at (j-1, k-1) controls residual entry (j, k-1).
        current(j - 1, k - 1) = 0.0;
        const double r = masked_residual(plant, current, previous)(j, k - 1);
        current(j - 1, k - 1) = -r / plant.Q()(j, j - 1);
      }
    }
    family.Tbar.push_back(current);
    previous = current;
  }

  for (const auto& check : check_sylvester(plant, family)) {
    if (!check.ok()) {
      std::ostringstream os;
      os << "Sylvester equation " << check.i << " leaves entry (" << check.row + 1 << ", "
         << check.col + 1 << ") at " << check.residual << " > " << check.tolerance;
      throw Error(ErrorCode::kResidualNonzero, os.str());
    }
  }
  return family;
}

double kappa_closed_form(const ValidatedPlant& plant, int i, int j, int k,
                         const Eigen::MatrixXd& current, const Eigen::MatrixXd& previous) {
  const int m = plant.m();
  if (i < 1 || !in_support(m, i, j - 1, k - 1)) {
    std::ostringstream os;
    os << "(" << j << ", " << k << ") is not an entry of Tbar_" << i;
    throw Error(ErrorCode::kIndexOutOfSupport, os.str());
  }
  const int c = half_ceil(i);
  const Eigen::MatrixXd& Q = plant.Q();
  const Eigen::VectorXd& D = plant.D();
  // 1-based accessors, zero outside the support of Tbar_i.
  auto q = [&](int a, int b) { return Q(a - 1, b - 1); };
  auto kappa = [&](int a, int b) {
    return in_support(m, i, a - 1, b - 1) ? current(a - 1, b - 1) : 0.0;
  };
  auto kappa_prev = [&](int a, int b) {
    if (i == 1) return a == b ? 1.0 : 0.0;
    return in_support(m, i - 1, a - 1, b - 1) ? previous(a - 1, b - 1) : 0.0;
  };

  double row_times_q = 0.0;
  double q_times_column = 0.0;
  for (int l = 0; l <= m - j - 1 - c; ++l) {
    row_times_q += kappa(j + 1, j + c + 1 + l) * q(j + c + 1 + l, k);
    q_times_column += q(j + 1, j + 1 + l) * kappa(j + 1 + l, k);
  }
  const double forcing = kappa_prev(j + 1, k) * (D(m - 1) - D(k - 1));
  return (row_times_q - q_times_column + forcing) / q(j + 1, j);
}

TransformFamily solve_transform_family_closed_form(const ValidatedPlant& plant) {
  const int m = plant.m();
  TransformFamily family;
  family.m = m;
  family.sigma_bar = plant.indices().sigma_bar;
  Eigen::MatrixXd previous = Eigen::MatrixXd::Identity(m, m);
  for (int i = 1; i <= family.sigma_bar; ++i) {
    const int c = half_ceil(i);
    Eigen::MatrixXd current = Eigen::MatrixXd::Zero(m, m);
    for (int j = m - 1 - c; j >= 1; --j)
      for (int k = m; k >= j + c; --k)
        current(j - 1, k - 1) = kappa_closed_form(plant, i, j, k, current, previous);
    family.Tbar.push_back(current);
    previous = current;
  }
  return family;
}

Eigen::MatrixXd nilpotent_part(const TransformFamily& family, double lambda) {
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(family.m, family.m);
  // Horner: S = lambda (Tbar_1 + lambda (Tbar_2 + ...)).
  for (int i = family.sigma_bar; i >= 1; --i) S = lambda * (family.Tbar[i - 1] + S);
  return S;
}

ModalTransform assemble_Tn(const TransformFamily& family, double lambda, int mode, int N) {
  const int m = family.m;
  ModalTransform out;
  out.mode = mode;
  out.T = Eigen::MatrixXd::Identity(m, m);
  out.T_inv = Eigen::MatrixXd::Identity(m, m);
  if (mode >= N || family.sigma_bar == 0) return out;

  const Eigen::MatrixXd S = nilpotent_part(family, lambda);
  out.T += S;
  // (I + S)^{-1} = sum_p (-S)^p, with S^m = 0.
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(m, m);
  for (int p = 1; p < m; ++p) {
    power = -(power * S);
    out.T_inv += power;
  }
  return out;
}

Eigen::RowVectorXd compute_Gn(const ValidatedPlant& plant, const TransformFamily& family,
                              double lambda, const ModalTransform& Tn) {
  const int m = plant.m();
  const Eigen::MatrixXd& Q = plant.Q();
  const double dm = plant.d_last();
  const Eigen::MatrixXd S = nilpotent_part(family, lambda);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(m, m);
  Eigen::MatrixXd D = plant.D().asDiagonal();
  const Eigen::MatrixXd inner =
      (Q - lambda * dm * I) * S + S * (lambda * D - Q) + (D - dm * I) * lambda;
  return -(inner.row(0) * Tn.T_inv);
}

double full_cancellation_residual(const ValidatedPlant& plant, const TransformFamily& family,
                                  double lambda, const ModalTransform& Tn) {
  const int m = plant.m();
  const Eigen::MatrixXd& Q = plant.Q();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(m, m);
  Eigen::MatrixXd D = plant.D().asDiagonal();
  Eigen::MatrixXd total = (Q - lambda * plant.d_last() * I) * Tn.T + Tn.T * (lambda * D - Q);
  total.row(0) += compute_Gn(plant, family, lambda, Tn) * Tn.T;
  return max_abs(total);
}

}  // namespace cascade_stab
