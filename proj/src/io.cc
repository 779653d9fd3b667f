#include "cascade_stab/io.h"

#include <cstdio>
#include <fstream>
#include <limits>
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

Json row_to_json(const Eigen::RowVectorXd& row) {
  return Json(std::vector<double>(row.data(), row.data() + row.size()));
}

Json matrix_to_json(const Eigen::MatrixXd& A) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < A.rows(); ++i) rows.push_back(row_to_json(A.row(i)));
  return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& j, Eigen::Index cols_if_empty = 0) {
  if (!j.is_array()) throw Error(ErrorCode::kBadInput, "expected an array of rows");
  if (j.empty()) return Eigen::MatrixXd(0, cols_if_empty);
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd A(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j.at(r);
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw Error(ErrorCode::kBadInput, "matrix rows have different lengths");
    for (Eigen::Index c = 0; c < cols; ++c) A(r, c) = row.at(c).get<double>();
  }
  return A;
}

Eigen::RowVectorXd row_from_json(const Json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::RowVectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

// Runs `body`, mapping JSON library errors to input errors.
template <class F>
auto guarded(const char* what, F&& body) {
  try {
    return body();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kBadInput, std::string(what) + ": " + e.what());
  }
}

}  // namespace

Json shape_to_json(const ShapeFunction& shape) {
  return std::visit(
      Overloaded{
          [](const Indicator& s) {
            return Json{{"kind", "indicator"}, {"params", {{"a", s.a}, {"b", s.b}}}};
          },
          [](const Polynomial& s) {
            return Json{{"kind", "polynomial"}, {"params", {{"coefficients", s.coefficients}}}};
          },
          [](const Samples& s) {
            return Json{{"kind", "samples"},
                        {"params", {{"grid", s.grid}, {"values", s.values}}}};
          },
          [](const CosineSeries& s) {
            Json terms = Json::array();
            for (const auto& t : s.terms) terms.push_back({t.amplitude, t.frequency});
            return Json{{"kind", "cosine_series"}, {"params", {{"terms", terms}}}};
          },
      },
      shape.kind);
}

ShapeFunction shape_from_json(const Json& j) {
  return guarded("shape", [&]() -> ShapeFunction {
    const std::string kind = j.at("kind").get<std::string>();
    const Json& p = j.at("params");
    if (kind == "indicator") return {Indicator{p.at("a").get<double>(), p.at("b").get<double>()}};
    if (kind == "polynomial")
      return {Polynomial{p.at("coefficients").get<std::vector<double>>()}};
    if (kind == "samples")
      return {Samples{p.at("grid").get<std::vector<double>>(),
                      p.at("values").get<std::vector<double>>()}};
    if (kind == "cosine_series") {
      CosineSeries series;
      for (const auto& t : p.at("terms")) {
        if (!t.is_array() || t.size() != 2)
          throw Error(ErrorCode::kBadShape, "cosine term must be [amplitude, frequency]");
        series.terms.push_back({t.at(0).get<double>(), t.at(1).get<double>()});
      }
      return {series};
    }
    throw Error(ErrorCode::kBadShape, "unknown shape kind '" + kind + "'");
  });
}

Json plant_to_json(const PlantSpec& spec) {
  Json shapes = Json::array();
  for (const auto& s : spec.shapes) shapes.push_back(shape_to_json(s));
  return Json{{"m", spec.m},
              {"D", std::vector<double>(spec.D.data(), spec.D.data() + spec.D.size())},
              {"Q", matrix_to_json(spec.Q)},
              {"L", spec.L},
              {"gamma1", spec.gamma1},
              {"gamma2", spec.gamma2},
              {"shapes", shapes}};
}

PlantSpec plant_from_json(const Json& j) {
  return guarded("plant", [&] {
    PlantSpec spec;
    spec.m = j.at("m").get<int>();
    const auto D = j.at("D").get<std::vector<double>>();
    spec.D = Eigen::Map<const Eigen::VectorXd>(D.data(), static_cast<Eigen::Index>(D.size()));
    spec.Q = matrix_from_json(j.at("Q"));
    spec.L = j.at("L").get<double>();
    spec.gamma1 = j.at("gamma1").get<double>();
    spec.gamma2 = j.at("gamma2").get<double>();
    if (j.contains("shapes"))
      for (const auto& s : j.at("shapes")) spec.shapes.push_back(shape_from_json(s));
    return spec;
  });
}

std::vector<ShapeFunction> initial_from_json(const Json& j) {
  return guarded("initial condition", [&] {
    std::vector<ShapeFunction> components;
    for (const auto& c : j.at("components")) components.push_back(shape_from_json(c));
    return components;
  });
}

Json initial_to_json(const std::vector<ShapeFunction>& components) {
  Json list = Json::array();
  for (const auto& c : components) list.push_back(shape_to_json(c));
  return Json{{"components", list}};
}

Json certificate_to_json(const Certificate& cert) {
  return Json{{"rho", cert.rho},
              {"rho_bar", cert.rho_bar},
              {"beta", cert.beta},
              {"rho0", cert.rho0},
              {"c_lower", cert.c_lower},
              {"c_upper", cert.c_upper},
              {"M", cert.M},
              {"K_norm", cert.K_norm},
              {"gamma_margin", cert.gamma_margin},
              {"omega_margins", cert.omega_margins}};
}

Certificate certificate_from_json(const Json& j) {
  return guarded("certificate", [&] {
    Certificate cert;
    cert.rho = j.at("rho").get<double>();
    cert.rho_bar = j.at("rho_bar").get<double>();
    cert.beta = j.at("beta").get<double>();
    cert.rho0 = j.at("rho0").get<double>();
    cert.c_lower = j.at("c_lower").get<double>();
    cert.c_upper = j.at("c_upper").get<double>();
    cert.M = j.at("M").get<double>();
    cert.K_norm = j.at("K_norm").get<double>();
    // A null margin means no controlled modes.
    const Json& margin = j.at("gamma_margin");
    cert.gamma_margin = margin.is_null() ? -std::numeric_limits<double>::infinity()
                                         : margin.get<double>();
    cert.omega_margins = j.at("omega_margins").get<std::vector<double>>();
    return cert;
  });
}

Json gains_to_json(const Controller& c, const DiffusionIndices& indices,
                   const std::optional<Certificate>& cert) {
  Json kbar = Json::array();
  for (const auto& row : c.Kbar) kbar.push_back(row_to_json(row));
  Json j{{"delta", c.delta},
         {"N", c.N},
         {"N_min", c.N_min},
         {"sigma", indices.sigma},
         {"sigma_bar", indices.sigma_bar},
         {"pole_offsets", c.pole_offsets},
         {"K_Q", row_to_json(c.K_Q)},
         {"P", matrix_to_json(c.P)},
         {"Kbar", kbar},
         {"Bmat", matrix_to_json(c.Bmat)},
         {"Bmat_condition", c.Bmat_condition},
         {"K", matrix_to_json(c.K)}};
  if (cert) j["certificate"] = certificate_to_json(*cert);
  return j;
}

Controller controller_from_json(const Json& j) {
  return guarded("gains", [&] {
    Controller c;
    c.delta = j.at("delta").get<double>();
    c.N = j.at("N").get<int>();
    c.N_min = j.value("N_min", c.N);
    c.pole_offsets = j.value("pole_offsets", std::vector<double>{});
    c.K_Q = row_from_json(j.at("K_Q"));
    c.P = matrix_from_json(j.at("P"));
    for (const auto& row : j.at("Kbar")) c.Kbar.push_back(row_from_json(row));
    c.Bmat = matrix_from_json(j.at("Bmat"));
    c.Bmat_condition = j.value("Bmat_condition", 1.0);
    c.K = matrix_from_json(j.at("K"));
    if (c.N < 0 || c.K.rows() != c.N || c.Bmat.rows() != c.N ||
        static_cast<int>(c.Kbar.size()) != c.N)
      throw Error(ErrorCode::kBadInput, "gains file dimensions disagree with N");
    return c;
  });
}

Json family_to_json(const TransformFamily& family, const SpectralBasis& basis, int N) {
  Json tbar = Json::array();
  for (const auto& T : family.Tbar) tbar.push_back(matrix_to_json(T));
  Json modes = Json::array();
  for (int k = 0; k < N; ++k) {
    const ModalTransform Tn = assemble_Tn(family, basis.lambda(k), k, N);
    modes.push_back({{"n", k + 1},
                     {"lambda", basis.lambda(k)},
                     {"T", matrix_to_json(Tn.T)},
                     {"T_inv", matrix_to_json(Tn.T_inv)}});
  }
  return Json{{"m", family.m}, {"sigma_bar", family.sigma_bar}, {"Tbar", tbar}, {"modes", modes}};
}

Json basis_to_json(const SpectralBasis& basis) {
  Json eigen = Json::array();
  for (const auto& e : basis.eigen())
    eigen.push_back({{"lambda", e.lambda}, {"s", e.s}, {"c", e.c}});
  return Json{{"L", basis.L()},
              {"gamma1", basis.gamma1()},
              {"gamma2", basis.gamma2()},
              {"eigen", eigen}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kBadInput, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kBadInput, path.string() + ": " + e.what());
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kBadInput, "cannot write " + tmp.string());
    out << contents;
    if (!out) throw Error(ErrorCode::kBadInput, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kBadInput, "cannot rename onto " + path.string());
}

std::string format_real(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string modal_csv(const Trajectory& trajectory) {
  std::ostringstream os;
  os << "t";
  for (int k = 0; k < trajectory.modes; ++k)
    for (int i = 0; i < trajectory.m; ++i) os << ",z_" << i + 1 << "_" << k + 1;
  os << "\n";
  for (std::size_t s = 0; s < trajectory.times.size(); ++s) {
    os << format_real(trajectory.times[s]);
    for (Eigen::Index r = 0; r < trajectory.states[s].size(); ++r)
      os << "," << format_real(trajectory.states[s](r));
    os << "\n";
  }
  return os.str();
}

std::string field_csv(const Trajectory& trajectory, const std::vector<Eigen::MatrixXd>& fields,
                      const std::vector<double>& grid) {
  std::ostringstream os;
  os << "t,x";
  for (int i = 0; i < trajectory.m; ++i) os << ",z" << i + 1;
  os << "\n";
  for (std::size_t s = 0; s < fields.size(); ++s) {
    for (std::size_t g = 0; g < grid.size(); ++g) {
      os << format_real(trajectory.times[s]) << "," << format_real(grid[g]);
      for (int i = 0; i < trajectory.m; ++i) os << "," << format_real(fields[s](i, g));
      os << "\n";
    }
  }
  return os.str();
}

std::string norms_csv(const Trajectory& trajectory) {
  std::ostringstream os;
  os << "t,l2norm,bound\n";
  for (std::size_t s = 0; s < trajectory.times.size(); ++s) {
    os << format_real(trajectory.times[s]) << "," << format_real(trajectory.l2_norm[s]) << ",";
    if (s < trajectory.bound.size())
      os << format_real(trajectory.bound[s]);
    os << "\n";
  }
  return os.str();
}

}  // namespace cascade_stab
