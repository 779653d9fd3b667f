#pragma once

#include <Eigen/Dense>

namespace cascade_stab {

/// (A + A^T) / 2.
Eigen::MatrixXd sym(const Eigen::MatrixXd& A);

/// Largest real part among the eigenvalues of A.
double spectral_abscissa(const Eigen::MatrixXd& A);

/// Extreme eigenvalues of a symmetric matrix.
double max_eigenvalue_symmetric(const Eigen::MatrixXd& S);
double min_eigenvalue_symmetric(const Eigen::MatrixXd& S);

/// Induced 2-norm from the largest singular value.
double spectral_norm(const Eigen::MatrixXd& A);

/// Ratio of extreme singular values; infinity for a singular matrix.
double condition_number(const Eigen::MatrixXd& A);

/// Solves A^T X + X A = -C through the m^2 x m^2 Kronecker system.
Eigen::MatrixXd solve_lyapunov_kronecker(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C);

/// Solves A^T X + X A = -C by Bartels-Stewart on the complex Schur form of A.
Eigen::MatrixXd solve_lyapunov_bartels_stewart(const Eigen::MatrixXd& A,
                                               const Eigen::MatrixXd& C);

/// Kronecker for dimension <= 8, Bartels-Stewart beyond. The result is
/// symmetrized when C is symmetric.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C);

/// Complex Schur decomposition H = U T U^H reordered so that the eigenvalues
/// with negative real part come first.
struct OrderedSchur {
  Eigen::MatrixXcd U;
  Eigen::MatrixXcd T;
  int stable_count = 0;
};
OrderedSchur ordered_schur_stable_first(const Eigen::MatrixXd& H);

/// Stabilizing solution of A^T X + X A - X B R^{-1} B^T X + Qc = 0 from the
/// stable invariant subspace of the Hamiltonian matrix.
/// Throws Error(kRiccatiFailure) if that subspace has the wrong dimension or
/// its upper block is singular.
Eigen::MatrixXd solve_care(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                           const Eigen::MatrixXd& Qc, const Eigen::MatrixXd& R);

/// Single-input pole placement by Ackermann's formula: returns the row K with
/// eig(A + b K) = poles. Throws Error(kPolePlacementSingular) when (A, b) is
/// not controllable.
Eigen::RowVectorXd place_poles_ackermann(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                         const Eigen::VectorXd& poles);

/// exp(A) by scaling and squaring with a degree-13 Pade approximant.
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& A);

}  // namespace cascade_stab
