#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "cascade_stab/model.h"

namespace cascade_stab {

/// One eigenpair of phi'' + lambda phi = 0, phi'(0) = 0,
/// gamma1 phi(L) + gamma2 phi'(L) = 0. phi(x) = c cos(s x) with s^2 = lambda.
struct Eigenpair {
  double lambda = 0.0;
  double s = 0.0;
  double c = 0.0;
};

/// The leading eigenpairs of the unit-diffusion Sturm-Liouville problem.
/// Mode indices are zero-based: mode k is the (k+1)-th eigenpair.
class SpectralBasis {
 public:
  SpectralBasis(double L, double gamma1, double gamma2, std::vector<Eigenpair> eigen);

  int size() const { return static_cast<int>(eigen_.size()); }
  double L() const { return L_; }
  double gamma1() const { return gamma1_; }
  double gamma2() const { return gamma2_; }
  const std::vector<Eigenpair>& eigen() const { return eigen_; }

  double lambda(int k) const { return eigen_.at(k).lambda; }
  double phi(int k, double x) const;
  double dphi(int k, double x) const;

  /// |gamma1 phi_k(L) + gamma2 phi_k'(L)|.
  double boundary_residual(int k) const;

 private:
  double L_;
  double gamma1_;
  double gamma2_;
  std::vector<Eigenpair> eigen_;
};

/// Roots of gamma1 cos(sL) - gamma2 s sin(sL) are bracketed one per interval
/// (k pi/L, (k+1) pi/L) and refined by bisection to full double precision.
/// The pure Neumann case (gamma1 = 0) has the closed form s = k pi / L.
SpectralBasis build_basis(double L, double gamma1, double gamma2, int count);

/// Returns a basis with at least `count` modes, reusing `basis` if it is large
/// enough already.
SpectralBasis extend_basis(const SpectralBasis& basis, int count);

/// Adaptive Simpson quadrature on [a, b] with absolute tolerance `tol`.
/// Throws Error(kQuadratureNonConvergence) when the recursion depth runs out.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol = 1e-10, int max_depth = 50);

/// <f, phi_k> by adaptive quadrature.
double project(const std::function<double(double)>& f, const SpectralBasis& basis, int k,
               double tol = 1e-10);

/// <shape, phi_k>, computed from exact antiderivatives.
double project(const ShapeFunction& shape, const SpectralBasis& basis, int k);

/// The row (b_{1,k} ... b_{N,k}) of shape projections onto mode k.
Eigen::RowVectorXd input_projection_row(const std::vector<ShapeFunction>& shapes,
                                        const SpectralBasis& basis, int k);

/// Partial sums sum_k coeffs.col(k) phi_k(x) on `grid`. `coeffs` is m x modes;
/// the result is m x grid.size().
Eigen::MatrixXd expand(const Eigen::MatrixXd& coeffs, const SpectralBasis& basis,
                       const std::vector<double>& grid);

}  // namespace cascade_stab
