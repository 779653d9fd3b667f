#pragma once

#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace cascade_stab {

/// 1 on [a, b], 0 elsewhere.
struct Indicator {
  double a = 0.0;
  double b = 0.0;
};

/// c0 + c1 x + c2 x^2 + ... over the whole domain.
struct Polynomial {
  std::vector<double> coefficients;
};

/// Piecewise-linear interpolant through (grid[i], values[i]).
struct Samples {
  std::vector<double> grid;
  std::vector<double> values;
};

struct CosineTerm {
  double amplitude = 0.0;
  double frequency = 0.0;
};

/// Sum of amplitude * cos(frequency * x). A zero frequency is a constant.
/// Mostly used for initial conditions.
struct CosineSeries {
  std::vector<CosineTerm> terms;
};

/// A real function on [0, L]: an actuator shape b_j(x) or an initial profile.
struct ShapeFunction {
  using Kind = std::variant<Indicator, Polynomial, Samples, CosineSeries>;
  Kind kind;

  double operator()(double x) const;

  /// Integral of the square over [0, L], exact for every kind.
  double l2_norm_squared(double L) const;
};

/// Throws Error(kBadShape) unless the shape's parameters fit the domain [0, L].
void validate_shape(const ShapeFunction& shape, double L);

/// The system z_t = D z_xx + Q z + B sum_j b_j(x) u_j(t) with
/// z_x(t, 0) = 0 and gamma1 z(t, L) + gamma2 z_x(t, L) = 0. B is the first
/// standard basis column and is never stored.
struct PlantSpec {
  int m = 0;
  Eigen::VectorXd D;
  Eigen::MatrixXd Q;
  double L = 0.0;
  double gamma1 = 1.0;
  double gamma2 = 0.0;
  std::vector<ShapeFunction> shapes;
};

/// sigma is the first (1-based) index from which all trailing diffusion
/// coefficients coincide; sigma_bar is the degree of T_n in lambda_n.
struct DiffusionIndices {
  int sigma = 1;
  int sigma_bar = 0;
};

/// Equality of d_i and d_j is exact when `relative_tol` is zero, otherwise
/// |d_i - d_j| <= relative_tol * max(d_i, d_j).
DiffusionIndices diffusion_indices(const Eigen::VectorXd& D,
                                   double relative_tol = 0.0);

class ValidatedPlant;

/// Checks the structural conditions of the plant: positive diffusions, a
/// nondegenerate boundary, Q in cascade (upper Hessenberg) form with a
/// nonvanishing subdiagonal, and well-formed shapes.
ValidatedPlant validate_plant(PlantSpec spec, double diffusion_tol = 0.0);

/// A plant whose invariants have been checked. Only validate_plant builds one.
class ValidatedPlant {
 public:
  const PlantSpec& spec() const { return spec_; }
  const DiffusionIndices& indices() const { return indices_; }

  int m() const { return spec_.m; }
  const Eigen::VectorXd& D() const { return spec_.D; }
  const Eigen::MatrixXd& Q() const { return spec_.Q; }
  double d_last() const { return spec_.D(spec_.m - 1); }

 private:
  friend ValidatedPlant validate_plant(PlantSpec spec, double diffusion_tol);
  ValidatedPlant(PlantSpec spec, DiffusionIndices indices)
      : spec_(std::move(spec)), indices_(indices) {}

  PlantSpec spec_;
  DiffusionIndices indices_;
};

}  // namespace cascade_stab
