#include "cascade_stab/linalg.h"

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "cascade_stab/error.h"

namespace cascade_stab {
namespace {

using Complex = std::complex<double>;

// Swaps the adjacent diagonal entries k and k+1 of the upper-triangular T
// with a unitary rotation, updating the Schur vectors U accordingly.
void swap_adjacent(Eigen::MatrixXcd& T, Eigen::MatrixXcd& U, Eigen::Index k) {
  const Complex t11 = T(k, k), t12 = T(k, k + 1), t22 = T(k + 1, k + 1);
  // Eigenvector of the 2x2 block for t22.
  Complex v1 = t12, v2 = t22 - t11;
  const double norm = std::hypot(std::abs(v1), std::abs(v2));
  if (norm == 0.0) return;  // equal eigenvalues, nothing to reorder
  v1 /= norm;
  v2 /= norm;
  Eigen::Matrix2cd Z;
  Z << v1, -std::conj(v2), v2, std::conj(v1);
  T.middleRows(k, 2) = Z.adjoint() * T.middleRows(k, 2);
  T.middleCols(k, 2) = T.middleCols(k, 2) * Z;
  U.middleCols(k, 2) = U.middleCols(k, 2) * Z;
  T(k + 1, k) = 0.0;
  T(k, k) = t22;
  T(k + 1, k + 1) = t11;
}

}  // namespace

Eigen::MatrixXd sym(const Eigen::MatrixXd& A) { return 0.5 * (A + A.transpose()); }

double spectral_abscissa(const Eigen::MatrixXd& A) {
  if (A.size() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::EigenSolver<Eigen::MatrixXd> solver(A, false);
  return solver.eigenvalues().real().maxCoeff();
}

double max_eigenvalue_symmetric(const Eigen::MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym(S), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

double min_eigenvalue_symmetric(const Eigen::MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym(S), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double spectral_norm(const Eigen::MatrixXd& A) {
  if (A.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  return svd.singularValues()(0);
}

double condition_number(const Eigen::MatrixXd& A) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  if (smallest == 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smallest;
}

Eigen::MatrixXd solve_lyapunov_kronecker(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C) {
  const Eigen::Index n = A.rows();
  // vec(A^T X + X A) = (I kron A^T + A^T kron I) vec(X), column-major vec.
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n * n, n * n);
  const Eigen::MatrixXd At = A.transpose();
  for (Eigen::Index j = 0; j < n; ++j) {
    K.block(j * n, j * n, n, n) += At;
    for (Eigen::Index l = 0; l < n; ++l)
      K.block(j * n, l * n, n, n).diagonal().array() += A(l, j);
  }
  const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(C.data(), n * n);
  const Eigen::VectorXd x = K.partialPivLu().solve(rhs);
  return Eigen::Map<const Eigen::MatrixXd>(x.data(), n, n);
}

Eigen::MatrixXd solve_lyapunov_bartels_stewart(const Eigen::MatrixXd& A,
                                               const Eigen::MatrixXd& C) {
  const Eigen::Index n = A.rows();
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(A.cast<Complex>());
  const Eigen::MatrixXcd& T = schur.matrixT();
  const Eigen::MatrixXcd& U = schur.matrixU();
  // With A = U T U^H: T^H Y + Y T = F, Y = U^H X U, F = -U^H C U.
  const Eigen::MatrixXcd F = -(U.adjoint() * C.cast<Complex>() * U);
  const Eigen::MatrixXcd Th = T.adjoint();
  Eigen::MatrixXcd Y(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXcd rhs = F.col(j);
    if (j > 0) rhs -= Y.leftCols(j) * T.col(j).head(j);
    Eigen::MatrixXcd lower = Th;
    lower.diagonal().array() += T(j, j);
    Y.col(j) = lower.triangularView<Eigen::Lower>().solve(rhs);
  }
  return (U * Y * U.adjoint()).real();
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C) {
  Eigen::MatrixXd X = A.rows() <= 8 ? solve_lyapunov_kronecker(A, C)
                                    : solve_lyapunov_bartels_stewart(A, C);
  if (C.isApprox(C.transpose())) X = sym(X);
  return X;
}

OrderedSchur ordered_schur_stable_first(const Eigen::MatrixXd& H) {
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(H.cast<Complex>());
  OrderedSchur out;
  out.T = schur.matrixT();
  out.U = schur.matrixU();
  const Eigen::Index n = H.rows();
  int placed = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (out.T(i, i).real() < 0.0) {
      for (Eigen::Index k = i - 1; k >= placed; --k) swap_adjacent(out.T, out.U, k);
      ++placed;
    }
  }
  out.stable_count = placed;
  return out;
}

Eigen::MatrixXd solve_care(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                           const Eigen::MatrixXd& Qc, const Eigen::MatrixXd& R) {
  const Eigen::Index n = A.rows();
  Eigen::MatrixXd H(2 * n, 2 * n);
  H << A, -B * R.ldlt().solve(B.transpose()), -Qc, -A.transpose();
  const OrderedSchur schur = ordered_schur_stable_first(H);
  if (schur.stable_count != n) {
    std::ostringstream os;
    os << "Hamiltonian has " << schur.stable_count << " stable eigenvalues, expected " << n;
    throw Error(ErrorCode::kRiccatiFailure, os.str());
  }
  const Eigen::MatrixXcd U1 = schur.U.topLeftCorner(n, n);
  const Eigen::MatrixXcd U2 = schur.U.bottomLeftCorner(n, n);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(U1.transpose());
  const double rcond = lu.rcond();
  if (!(rcond > 1e-14)) throw Error(ErrorCode::kRiccatiFailure, "stable subspace is not a graph");
  // X = U2 U1^{-1}, solved as U1^T X^T = U2^T.
  const Eigen::MatrixXcd Xt = lu.solve(U2.transpose());
  return sym(Xt.transpose().real());
}

Eigen::RowVectorXd place_poles_ackermann(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                         const Eigen::VectorXd& poles) {
  const Eigen::Index n = A.rows();
  if (poles.size() != n)
    throw Error(ErrorCode::kBadInput, "pole count must equal the state dimension");
  Eigen::MatrixXd ctrb(n, n);
  ctrb.col(0) = b;
  for (Eigen::Index k = 1; k < n; ++k) ctrb.col(k) = A * ctrb.col(k - 1);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(ctrb);
  if (lu.rank() < n)
    throw Error(ErrorCode::kPolePlacementSingular, "controllability matrix is rank deficient");

  // Desired characteristic polynomial evaluated at A, by successive factors.
  Eigen::MatrixXd p_of_A = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index k = 0; k < n; ++k)
    p_of_A = p_of_A * (A - poles(k) * Eigen::MatrixXd::Identity(n, n));

  // K = -e_n^T ctrb^{-1} p(A), with e_n^T ctrb^{-1} obtained from ctrb^T w = e_n.
  Eigen::VectorXd e_last = Eigen::VectorXd::Zero(n);
  e_last(n - 1) = 1.0;
  const Eigen::VectorXd w = ctrb.transpose().fullPivLu().solve(e_last);
  return -(w.transpose() * p_of_A);
}

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& A) { return A.exp(); }

}  // namespace cascade_stab
