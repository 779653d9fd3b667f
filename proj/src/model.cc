#include "cascade_stab/model.h"

#include <algorithm>
#include <cmath>
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

// Integral of cos(w x) over [0, L].
double integral_cos(double w, double L) {
  if (w == 0.0) return L;
  return std::sin(w * L) / w;
}

double polynomial_value(const std::vector<double>& c, double x) {
  double value = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) value = value * x + *it;
  return value;
}

[[noreturn]] void bad_shape(const std::string& message) {
  throw Error(ErrorCode::kBadShape, message);
}

}  // namespace

double ShapeFunction::operator()(double x) const {
  return std::visit(
      Overloaded{
          [x](const Indicator& s) { return (x >= s.a && x <= s.b) ? 1.0 : 0.0; },
          [x](const Polynomial& s) { return polynomial_value(s.coefficients, x); },
          [x](const Samples& s) {
            const auto& g = s.grid;
            if (x <= g.front()) return s.values.front();
            if (x >= g.back()) return s.values.back();
            const auto hi = std::upper_bound(g.begin(), g.end(), x) - g.begin();
            const auto lo = hi - 1;
            const double w = (x - g[lo]) / (g[hi] - g[lo]);
            return (1.0 - w) * s.values[lo] + w * s.values[hi];
          },
          [x](const CosineSeries& s) {
            double value = 0.0;
            for (const auto& t : s.terms) value += t.amplitude * std::cos(t.frequency * x);
            return value;
          },
      },
      kind);
}

double ShapeFunction::l2_norm_squared(double L) const {
  return std::visit(
      Overloaded{
          [](const Indicator& s) { return s.b - s.a; },
          [L](const Polynomial& s) {
            const auto& c = s.coefficients;
            if (c.empty()) return 0.0;
            std::vector<double> square(2 * c.size() - 1, 0.0);
            for (std::size_t i = 0; i < c.size(); ++i)
              for (std::size_t j = 0; j < c.size(); ++j) square[i + j] += c[i] * c[j];
            double total = 0.0;
            for (std::size_t k = 0; k < square.size(); ++k)
              total += square[k] * std::pow(L, static_cast<double>(k + 1)) /
                       static_cast<double>(k + 1);
            return total;
          },
          [](const Samples& s) {
            double total = 0.0;
            for (std::size_t i = 0; i + 1 < s.grid.size(); ++i) {
              const double h = s.grid[i + 1] - s.grid[i];
              const double v0 = s.values[i], v1 = s.values[i + 1];
              total += h * (v0 * v0 + v0 * v1 + v1 * v1) / 3.0;
            }
            return total;
          },
          [L](const CosineSeries& s) {
            double total = 0.0;
            for (const auto& p : s.terms)
              for (const auto& q : s.terms)
                total += 0.5 * p.amplitude * q.amplitude *
                         (integral_cos(p.frequency - q.frequency, L) +
                          integral_cos(p.frequency + q.frequency, L));
            return total;
          },
      },
      kind);
}

void validate_shape(const ShapeFunction& shape, double L) {
  std::visit(
      Overloaded{
          [L](const Indicator& s) {
            if (!(0.0 <= s.a && s.a < s.b && s.b <= L)) {
              std::ostringstream os;
              os << "indicator [" << s.a << ", " << s.b << "] must satisfy 0 <= a < b <= " << L;
              bad_shape(os.str());
            }
          },
          [](const Polynomial& s) {
            if (s.coefficients.empty()) bad_shape("polynomial has no coefficients");
            for (double c : s.coefficients)
              if (!std::isfinite(c)) bad_shape("polynomial coefficient is not finite");
          },
          [L](const Samples& s) {
            if (s.grid.size() < 2 || s.grid.size() != s.values.size())
              bad_shape("samples need at least two points and matching grid/value lengths");
            for (std::size_t i = 0; i + 1 < s.grid.size(); ++i)
              if (!(s.grid[i] < s.grid[i + 1])) bad_shape("samples grid is not strictly increasing");
            const double slack = 1e-12 * std::max(1.0, L);
            if (std::abs(s.grid.front()) > slack || std::abs(s.grid.back() - L) > slack)
              bad_shape("samples grid must start at 0 and end at L");
            for (double v : s.values)
              if (!std::isfinite(v)) bad_shape("sample value is not finite");
          },
          [](const CosineSeries& s) {
            for (const auto& t : s.terms)
              if (!std::isfinite(t.amplitude) || !std::isfinite(t.frequency))
                bad_shape("cosine term is not finite");
          },
      },
      shape.kind);
}

DiffusionIndices diffusion_indices(const Eigen::VectorXd& D, double relative_tol) {
  const int m = static_cast<int>(D.size());
  auto same = [relative_tol](double a, double b) {
    if (relative_tol == 0.0) return a == b;
    return std::abs(a - b) <= relative_tol * std::max(std::abs(a), std::abs(b));
  };
  // Walk back from the last coefficient while every trailing entry matches.
  int sigma = m;
  while (sigma > 1) {
    const double candidate = D(sigma - 2);
    bool all_equal = true;
    for (int j = sigma - 1; j < m; ++j) all_equal = all_equal && same(candidate, D(j));
    if (!all_equal) break;
    --sigma;
  }
  DiffusionIndices out;
  out.sigma = std::max(sigma, 1);
  out.sigma_bar = std::max(0, std::min(2 * out.sigma - 3, 2 * m - 4));
  return out;
}

ValidatedPlant validate_plant(PlantSpec spec, double diffusion_tol) {
  const int m = spec.m;
  if (m < 1) throw Error(ErrorCode::kBadInput, "m must be a positive integer");
  if (spec.D.size() != m)
    throw Error(ErrorCode::kBadInput, "D must have m entries");
  if (spec.Q.rows() != m || spec.Q.cols() != m)
    throw Error(ErrorCode::kBadInput, "Q must be m x m");
  if (!spec.Q.allFinite() || !spec.D.allFinite())
    throw Error(ErrorCode::kBadInput, "D and Q must be finite");
  if (!(spec.L > 0.0) || !std::isfinite(spec.L))
    throw Error(ErrorCode::kBadInput, "L must be positive");

  for (int i = 0; i < m; ++i) {
    if (!(spec.D(i) > 0.0)) {
      std::ostringstream os;
      os << "d_" << i + 1 << " = " << spec.D(i) << " is not positive";
      throw Error(ErrorCode::kNonPositiveDiffusion, os.str());
    }
  }
  if (spec.gamma1 == 0.0 && spec.gamma2 == 0.0)
    throw Error(ErrorCode::kDegenerateBoundary, "gamma1 and gamma2 are both zero");
  // gamma1 * gamma2 < 0 produces a negative Sturm-Liouville eigenvalue.
  if (spec.gamma1 * spec.gamma2 < 0.0)
    throw Error(ErrorCode::kUnsupportedBoundary,
                "gamma1 and gamma2 of opposite sign give a negative eigenvalue");

  for (int i = 0; i < m; ++i) {
    for (int j = 0; j + 1 < i; ++j) {
      if (spec.Q(i, j) != 0.0) {
        std::ostringstream os;
        os << "q_" << i + 1 << "," << j + 1 << " = " << spec.Q(i, j)
           << " lies below the first subdiagonal";
        throw Error(ErrorCode::kCascadeViolation, os.str());
      }
    }
  }
  for (int i = 0; i + 1 < m; ++i) {
    if (spec.Q(i + 1, i) == 0.0) {
      std::ostringstream os;
      os << "q_" << i + 2 << "," << i + 1 << " = 0 breaks the controllability condition";
      throw Error(ErrorCode::kControllabilityViolation, os.str());
    }
  }
  for (const auto& shape : spec.shapes) validate_shape(shape, spec.L);

  const DiffusionIndices indices = diffusion_indices(spec.D, diffusion_tol);
  return ValidatedPlant(std::move(spec), indices);
}

}  // namespace cascade_stab
