#include "cascade_stab/spectral.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cascade_stab/error.h"

namespace cascade_stab {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kPi = std::numbers::pi;

double normalization(double s, double L) {
  if (s == 0.0) return 1.0 / std::sqrt(L);
  return 1.0 / std::sqrt(L / 2.0 + std::sin(2.0 * s * L) / (4.0 * s));
}

double characteristic(double s, double L, double gamma1, double gamma2) {
  return gamma1 * std::cos(s * L) - gamma2 * s * std::sin(s * L);
}

// Bisection down to adjacent doubles.
double bisect(double lo, double hi, double L, double gamma1, double gamma2) {
  double f_lo = characteristic(lo, L, gamma1, gamma2);
  const double f_hi = characteristic(hi, L, gamma1, gamma2);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    std::ostringstream os;
    os << "no sign change of the characteristic function on [" << lo << ", " << hi << "]";
    throw Error(ErrorCode::kRootBracketingFailure, os.str());
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = characteristic(mid, L, gamma1, gamma2);
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Integral of p(x) cos(s x) over [a, b]; p given by ascending coefficients.
double integral_polynomial_cos(const std::vector<double>& p, double s, double a, double b) {
  const int degree = static_cast<int>(p.size()) - 1;
  if (degree < 0) return 0.0;
  auto poly_integral = [&](const std::vector<double>& c) {
    double total = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      const double e = static_cast<double>(k + 1);
      total += c[k] * (std::pow(b, e) - std::pow(a, e)) / e;
    }
    return total;
  };
  if (s == 0.0) return poly_integral(p);

  const double reach = s * std::max(std::abs(a), std::abs(b));
  if (reach <= 1.0 && degree > 0) {
    // Small argument: integrate the Taylor series of cos term by term.
    double total = 0.0;
    double factor = 1.0;  // (-1)^j s^{2j} / (2j)!
    for (int j = 0; j < 40; ++j) {
      std::vector<double> shifted(p.size() + 2 * j, 0.0);
      for (std::size_t k = 0; k < p.size(); ++k) shifted[k + 2 * j] = p[k];
      const double term = factor * poly_integral(shifted);
      total += term;
      if (std::abs(term) <= 1e-18 * std::max(1.0, std::abs(total))) break;
      factor *= -s * s / ((2.0 * j + 1.0) * (2.0 * j + 2.0));
    }
    return total;
  }

  // Antiderivative sum_k (-1)^k [p^(2k) sin(sx)/s^(2k+1) + p^(2k+1) cos(sx)/s^(2k+2)].
  auto antiderivative = [&](double x) {
    std::vector<double> d = p;
    const double sn = std::sin(s * x), cs = std::cos(s * x);
    double total = 0.0;
    double scale = 1.0 / s;
    double sign = 1.0;
    auto differentiate = [](std::vector<double>& c) {
      if (c.empty()) return;
      for (std::size_t k = 1; k < c.size(); ++k) c[k - 1] = static_cast<double>(k) * c[k];
      c.pop_back();
    };
    auto value = [](const std::vector<double>& c, double t) {
      double v = 0.0;
      for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * t + *it;
      return v;
    };
    while (!d.empty()) {
      total += sign * value(d, x) * sn * scale;
      differentiate(d);
      if (d.empty()) break;
      total += sign * value(d, x) * cs * scale / s;
      differentiate(d);
      scale /= s * s;
      sign = -sign;
    }
    return total;
  };
  return antiderivative(b) - antiderivative(a);
}

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                    double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth <= 0) {
    std::ostringstream os;
    os << "adaptive Simpson did not converge on [" << a << ", " << b << "]";
    throw Error(ErrorCode::kQuadratureNonConvergence, os.str());
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

SpectralBasis::SpectralBasis(double L, double gamma1, double gamma2,
                             std::vector<Eigenpair> eigen)
    : L_(L), gamma1_(gamma1), gamma2_(gamma2), eigen_(std::move(eigen)) {}

double SpectralBasis::phi(int k, double x) const {
  const auto& e = eigen_.at(k);
  return e.c * std::cos(e.s * x);
}

double SpectralBasis::dphi(int k, double x) const {
  const auto& e = eigen_.at(k);
  return -e.c * e.s * std::sin(e.s * x);
}

double SpectralBasis::boundary_residual(int k) const {
  return std::abs(gamma1_ * phi(k, L_) + gamma2_ * dphi(k, L_));
}

SpectralBasis build_basis(double L, double gamma1, double gamma2, int count) {
  if (count < 1) throw Error(ErrorCode::kBadInput, "basis size must be at least 1");
  if (!(L > 0.0)) throw Error(ErrorCode::kBadInput, "L must be positive");
  if (gamma1 == 0.0 && gamma2 == 0.0)
    throw Error(ErrorCode::kDegenerateBoundary, "gamma1 and gamma2 are both zero");
  if (gamma1 * gamma2 < 0.0)
    throw Error(ErrorCode::kUnsupportedBoundary,
                "gamma1 and gamma2 of opposite sign give a negative eigenvalue");

  std::vector<Eigenpair> eigen;
  eigen.reserve(count);
  for (int k = 0; k < count; ++k) {
    double s = 0.0;
    if (gamma1 == 0.0) {
      s = k * kPi / L;
    } else {
      s = bisect(k * kPi / L, (k + 1) * kPi / L, L, gamma1, gamma2);
    }
    eigen.push_back({s * s, s, normalization(s, L)});
  }
  return SpectralBasis(L, gamma1, gamma2, std::move(eigen));
}

SpectralBasis extend_basis(const SpectralBasis& basis, int count) {
  if (basis.size() >= count) return basis;
  return build_basis(basis.L(), basis.gamma1(), basis.gamma2(), count);
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol, int max_depth) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

double project(const std::function<double(double)>& f, const SpectralBasis& basis, int k,
               double tol) {
  // Panels keep each piece below about half an oscillation of phi_k.
  const int panels = std::max(16, 4 * (k + 1));
  const double h = basis.L() / panels;
  auto integrand = [&](double x) { return f(x) * basis.phi(k, x); };
  double total = 0.0;
  for (int p = 0; p < panels; ++p)
    total += integrate_adaptive(integrand, p * h, (p + 1) * h, tol / panels);
  return total;
}

double project(const ShapeFunction& shape, const SpectralBasis& basis, int k) {
  const auto& e = basis.eigen().at(k);
  const double L = basis.L();
  const double raw = std::visit(
      Overloaded{
          [&](const Indicator& s) {
            if (e.s == 0.0) return s.b - s.a;
            return (std::sin(e.s * s.b) - std::sin(e.s * s.a)) / e.s;
          },
          [&](const Polynomial& s) {
            return integral_polynomial_cos(s.coefficients, e.s, 0.0, L);
          },
          [&](const Samples& s) {
            double total = 0.0;
            for (std::size_t i = 0; i + 1 < s.grid.size(); ++i) {
              const double x0 = s.grid[i], x1 = s.grid[i + 1];
              const double slope = (s.values[i + 1] - s.values[i]) / (x1 - x0);
              const std::vector<double> line{s.values[i] - slope * x0, slope};
              total += integral_polynomial_cos(line, e.s, x0, x1);
            }
            return total;
          },
          [&](const CosineSeries& s) {
            auto integral_cos = [L](double w) {
              return w == 0.0 ? L : std::sin(w * L) / w;
            };
            double total = 0.0;
            for (const auto& t : s.terms)
              total += 0.5 * t.amplitude *
                       (integral_cos(t.frequency - e.s) + integral_cos(t.frequency + e.s));
            return total;
          },
      },
      shape.kind);
  return e.c * raw;
}

Eigen::RowVectorXd input_projection_row(const std::vector<ShapeFunction>& shapes,
                                        const SpectralBasis& basis, int k) {
  if (shapes.empty()) throw Error(ErrorCode::kBadShape, "no shape functions given");
  Eigen::RowVectorXd row(shapes.size());
  for (std::size_t j = 0; j < shapes.size(); ++j) row(j) = project(shapes[j], basis, k);
  return row;
}

Eigen::MatrixXd expand(const Eigen::MatrixXd& coeffs, const SpectralBasis& basis,
                       const std::vector<double>& grid) {
  if (coeffs.cols() > basis.size())
    throw Error(ErrorCode::kBadInput, "more coefficients than basis functions");
  const Eigen::Index count = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd phi(coeffs.cols(), count);
  for (Eigen::Index k = 0; k < coeffs.cols(); ++k)
    for (Eigen::Index g = 0; g < count; ++g)
      phi(k, g) = basis.phi(static_cast<int>(k), grid[g]);
  return coeffs * phi;
}

}  // namespace cascade_stab
