#pragma once

#include <vector>

#include <Eigen/Dense>

#include "cascade_stab/model.h"

namespace cascade_stab {

/// The nilpotent coefficients Tbar_1 .. Tbar_{sigma_bar} of the per-mode
/// transformation T_n = I + sum_i lambda_n^i Tbar_i.
struct TransformFamily {
  int m = 0;
  int sigma_bar = 0;
  std::vector<Eigen::MatrixXd> Tbar;  // Tbar[i - 1] holds Tbar_i
};

/// Whether zero-based entry (row, col) may be nonzero in Tbar_i (i >= 1).
/// With c = ceil(i/2), rows 0..m-2-c carry entries in columns row+c..m-1.
bool in_support(int m, int i, int row, int col);

/// (I - B B^T)(Q Tbar_i - Tbar_i Q + Tbar_prev (D - d_m I)), i.e. the
/// generalized Sylvester residual with its first row removed.
Eigen::MatrixXd masked_residual(const ValidatedPlant& plant, const Eigen::MatrixXd& Tbar_i,
                                const Eigen::MatrixXd& Tbar_prev);

struct SylvesterCheck {
  int i = 0;            // 1-based index of Tbar_i
  double residual = 0;  // max-abs entry of the masked residual
  double tolerance = 0;
  int row = 0;          // zero-based location of the largest entry
  int col = 0;
  bool ok() const { return residual <= tolerance; }
};

/// Residual of every Sylvester equation in the family. The tolerance is 1e-9,
/// scaled by |Q|_max |Tbar_i|_max when that product exceeds one.
std::vector<SylvesterCheck> check_sylvester(const ValidatedPlant& plant,
                                            const TransformFamily& family);

/// Elimination procedure: for each i, rows j = m-1-ceil(i/2) .. 1 bottom-up,
/// columns right to left, kappa^i_{j,k} is the single unknown that zeroes
/// entry (j+1, k) of the masked residual. Throws Error(kResidualNonzero) if
/// the finished family leaves any entry of the masked residual nonzero.
TransformFamily solve_transform_family(const ValidatedPlant& plant);

/// Explicit recursion for kappa^i_{j,k} (1-based j, k) from the entries of
/// row j+1 and below in `current` (= Tbar_i) and from `previous`
/// (= Tbar_{i-1}, the identity for i = 1). Throws Error(kIndexOutOfSupport)
/// if (j, k) is not an entry of Tbar_i.
double kappa_closed_form(const ValidatedPlant& plant, int i, int j, int k,
                         const Eigen::MatrixXd& current, const Eigen::MatrixXd& previous);

/// The family rebuilt entry by entry from kappa_closed_form, in the same order
/// as the elimination. No residual check.
TransformFamily solve_transform_family_closed_form(const ValidatedPlant& plant);

struct ModalTransform {
  int mode = 0;  // zero-based
  Eigen::MatrixXd T;
  Eigen::MatrixXd T_inv;
};

/// T_n for zero-based `mode` with eigenvalue `lambda`; identity when
/// mode >= N. The inverse is the finite Neumann series of the nilpotent part.
ModalTransform assemble_Tn(const TransformFamily& family, double lambda, int mode, int N);

/// sum_i lambda^i Tbar_i.
Eigen::MatrixXd nilpotent_part(const TransformFamily& family, double lambda);

/// G_n = -B^T [(Q - lambda d_m I) S + S (lambda D - Q) + (D - d_m I) lambda] T_n^{-1}
/// with S the nilpotent part of T_n.
Eigen::RowVectorXd compute_Gn(const ValidatedPlant& plant, const TransformFamily& family,
                              double lambda, const ModalTransform& Tn);

/// max-abs of (Q - lambda d_m I) T_n + T_n (lambda D - Q) + B G_n T_n.
double full_cancellation_residual(const ValidatedPlant& plant, const TransformFamily& family,
                                  double lambda, const ModalTransform& Tn);

}  // namespace cascade_stab
