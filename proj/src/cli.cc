#include "cascade_stab/cli.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "cascade_stab/error.h"
#include "cascade_stab/io.h"
#include "cascade_stab/linalg.h"
#include "cascade_stab/simulator.h"
#include "cascade_stab/synthesis.h"
#include "cascade_stab/transform.h"

namespace cascade_stab {
namespace {

namespace fs = std::filesystem;

struct RunConfig {
  std::string plant_path;
  std::string gains_path;
  std::string initial_path;
  std::string out_dir = ".";
  std::optional<double> delta;
  std::optional<int> N;
  int modes = 30;
  double t_final = 1.0;
  double dt_out = 0.0;
  int grid_points = 101;
  double fit_begin = 0.2;
  double fit_end = 1.0;
  std::vector<double> pole_offsets;
  double diffusion_tol = 0.0;
  bool dump_basis = false;
  bool dump_transform = false;
  bool open_loop = false;
  std::string tbar_fault;
  std::vector<int> bench_Ns{2, 3, 5, 10, 15};
  int repeats = 5;
};

struct Context {
  ValidatedPlant plant;
  SpectralBasis basis;
};

Context load(const RunConfig& cfg, int modes) {
  ValidatedPlant plant = validate_plant(plant_from_json(read_json_file(cfg.plant_path)),
                                        cfg.diffusion_tol);
  SpectralBasis basis =
      build_basis(plant.spec().L, plant.spec().gamma1, plant.spec().gamma2, std::max(modes, 1));
  return {std::move(plant), std::move(basis)};
}

double require_delta(const RunConfig& cfg) {
  if (!cfg.delta) throw Error(ErrorCode::kBadInput, "--delta is required");
  if (!(*cfg.delta > 0.0)) throw Error(ErrorCode::kBadInput, "--delta must be positive");
  return *cfg.delta;
}

void write_json(const fs::path& path, const Json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

void dump_debug(const RunConfig& cfg, const Context& ctx, const TransformFamily& family, int N) {
  const fs::path dir(cfg.out_dir);
  if (cfg.dump_basis) write_json(dir / "basis.json", basis_to_json(ctx.basis));
  if (cfg.dump_transform)
    write_json(dir / "transform.json", family_to_json(family, extend_basis(ctx.basis, N), N));
}

std::string report(const Context& ctx, const Controller& c, const Certificate& cert) {
  std::ostringstream os;
  os << std::setprecision(10);
  const auto& idx = ctx.plant.indices();
  os << "delta            " << c.delta << "\n";
  os << "N_min            " << c.N_min << "\n";
  os << "N                " << c.N << "\n";
  os << "sigma            " << idx.sigma << "\n";
  os << "sigma_bar        " << idx.sigma_bar << "\n";
  os << "cond(Bmat)       " << c.Bmat_condition << "\n";
  os << "K_Q              " << c.K_Q << "\n";
  for (int k = 0; k < c.N; ++k) {
    const double a =
        spectral_abscissa(target_block(ctx.plant, c.K_Q, ctx.basis.lambda(k)));
    os << "abscissa(H_" << k + 1 << ")    " << a << "\n";
  }
  os << "rho              " << cert.rho << "\n";
  os << "rho_bar          " << cert.rho_bar << "\n";
  os << "beta             " << cert.beta << "\n";
  os << "rho0             " << cert.rho0 << "\n";
  os << "c_lower          " << cert.c_lower << "\n";
  os << "c_upper          " << cert.c_upper << "\n";
  os << "M                " << cert.M << "\n";
  os << "max eig Gamma    " << cert.gamma_margin << "\n";
  if (!cert.omega_margins.empty())
    os << "max eig Omega_n  "
       << *std::max_element(cert.omega_margins.begin(), cert.omega_margins.end()) << " (n = "
       << c.N + 1 << ".." << c.N + cert.omega_margins.size() << ")\n";
  return os.str();
}

SynthesisOptions synthesis_options(const RunConfig& cfg) {
  SynthesisOptions options;
  options.N = cfg.N;
  options.pole_offsets = cfg.pole_offsets;
  return options;
}

int cmd_synthesize(const RunConfig& cfg, std::ostream& out) {
  const double delta = require_delta(cfg);
  Context ctx = load(cfg, cfg.modes);
  const Controller c = build_controller(ctx.plant, ctx.basis, delta, synthesis_options(cfg));
  const TransformFamily family = solve_transform_family(ctx.plant);
  const Certificate cert = certificate(ctx.plant, c, family, ctx.basis, cfg.modes);

  fs::create_directories(cfg.out_dir);
  write_json(fs::path(cfg.out_dir) / "gains.json", gains_to_json(c, ctx.plant.indices(), cert));
  const std::string text = report(ctx, c, cert);
  write_file_atomic(fs::path(cfg.out_dir) / "report.txt", text);
  dump_debug(cfg, ctx, family, c.N);
  out << text;
  return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  if (cfg.initial_path.empty()) throw Error(ErrorCode::kBadInput, "--initial is required");
  Context ctx = load(cfg, cfg.modes);

  Controller c;
  std::optional<Certificate> cert;
  if (!cfg.gains_path.empty()) {
    const Json j = read_json_file(cfg.gains_path);
    c = controller_from_json(j);
    if (j.contains("certificate")) cert = certificate_from_json(j.at("certificate"));
  } else {
    c = build_controller(ctx.plant, ctx.basis, require_delta(cfg), synthesis_options(cfg));
    cert = certificate(ctx.plant, c, solve_transform_family(ctx.plant), ctx.basis, cfg.modes);
  }
  if (static_cast<int>(ctx.plant.spec().shapes.size()) < c.N)
    throw Error(ErrorCode::kBadShape, "plant has fewer shapes than the gains' N");

  SimConfig sim;
  sim.modes = cfg.modes;
  sim.t_final = cfg.t_final;
  sim.dt_out = cfg.dt_out;
  sim.grid_points = cfg.grid_points;
  sim.fit_begin = cfg.fit_begin;
  sim.fit_end = cfg.fit_end;
  validate_config(sim, c.N);

  const auto components = initial_from_json(read_json_file(cfg.initial_path));
  if (static_cast<int>(components.size()) != ctx.plant.m())
    throw Error(ErrorCode::kBadInput, "initial condition needs one component per equation");
  for (const auto& comp : components) validate_shape(comp, ctx.plant.spec().L);

  const Eigen::MatrixXd coeffs = project_initial(components, ctx.basis, sim.modes);
  const Eigen::VectorXd z0 = Eigen::Map<const Eigen::VectorXd>(coeffs.data(), coeffs.size());
  const Eigen::MatrixXd K =
      cfg.open_loop ? Eigen::MatrixXd::Zero(c.N, ctx.plant.m() * c.N) : c.K;
  const Eigen::MatrixXd system = assemble_closed_loop(ctx.plant, ctx.basis, K, c.N, sim.modes);
  Trajectory traj = integrate(system, z0, ctx.plant.m(), sim.t_final, sim.output_step());
  if (cert && !cfg.open_loop) attach_bound(traj, cert->M, c.delta);

  const std::vector<double> grid = uniform_grid(ctx.plant.spec().L, sim.grid_points);
  const auto fields = reconstruct_field(traj, ctx.basis, grid);
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  write_file_atomic(dir / "modal.csv", modal_csv(traj));
  write_file_atomic(dir / "field.csv", field_csv(traj, fields, grid));
  write_file_atomic(dir / "norms.csv", norms_csv(traj));

  out << std::setprecision(10);
  out << "initial norm     " << traj.l2_norm.front() << "\n";
  out << "final norm       " << traj.l2_norm.back() << "\n";
  try {
    out << "fitted decay     " << estimate_decay(traj, sim.fit_begin, sim.fit_end) << "\n";
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kZeroNorm) throw;
    out << "fitted decay     n/a (zero trajectory)\n";
  }
  if (!traj.bound.empty())
    out << "bound holds      " << (traj.overshoot_ok ? "yes" : "no") << "\n";
  return kExitOk;
}

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

void apply_fault(TransformFamily& family, const std::string& spec) {
  int i = 0, row = 0, col = 0;
  double value = 0.0;
  char sep1 = 0, sep2 = 0, sep3 = 0;
  std::istringstream is(spec);
  if (!(is >> i >> sep1 >> row >> sep2 >> col >> sep3 >> value) || sep1 != ':' || sep2 != ':' ||
      sep3 != ':')
    throw Error(ErrorCode::kBadInput, "fault must look like i:row:col:delta (1-based)");
  if (i < 1 || i > family.sigma_bar || row < 1 || row > family.m || col < 1 || col > family.m)
    throw Error(ErrorCode::kBadInput, "fault location outside the transform family");
  family.Tbar[i - 1](row - 1, col - 1) += value;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const double delta = require_delta(cfg);
  Context ctx = load(cfg, cfg.modes);
  const ValidatedPlant& plant = ctx.plant;
  const Controller c = build_controller(plant, ctx.basis, delta, synthesis_options(cfg));
  const SpectralBasis basis = extend_basis(ctx.basis, std::max(cfg.modes, c.N + 1));

  TransformFamily family = solve_transform_family(plant);
  if (!cfg.tbar_fault.empty()) apply_fault(family, cfg.tbar_fault);

  std::vector<Check> checks;
  auto fmt = [](double v) {
    std::ostringstream os;
    os << std::setprecision(3) << std::scientific << v;
    return os.str();
  };

  for (const auto& s : check_sylvester(plant, family)) {
    std::ostringstream os;
    os << "max " << fmt(s.residual) << " at (" << s.row + 1 << "," << s.col + 1 << "), tol "
       << fmt(s.tolerance);
    checks.push_back({"sylvester_" + std::to_string(s.i), s.ok(), os.str()});
  }

  const TransformFamily closed = solve_transform_family_closed_form(plant);
  double kappa_gap = 0.0;
  for (int i = 0; i < family.sigma_bar; ++i) {
    const double scale = std::max(1.0, closed.Tbar[i].cwiseAbs().maxCoeff());
    kappa_gap = std::max(kappa_gap, (family.Tbar[i] - closed.Tbar[i]).cwiseAbs().maxCoeff() / scale);
  }
  checks.push_back({"kappa_closed_form", kappa_gap <= 1e-10, "max rel gap " + fmt(kappa_gap)});

  double det_gap = 0.0, inv_gap = 0.0, cancel = 0.0, route_gap = 0.0, abscissa = -1e300;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(plant.m(), plant.m());
  const double q_scale = plant.Q().cwiseAbs().maxCoeff();
  for (int k = 0; k < c.N; ++k) {
    const double lambda = basis.lambda(k);
    const ModalTransform Tn = assemble_Tn(family, lambda, k, c.N);
    det_gap = std::max(det_gap, std::abs(Tn.T.determinant() - 1.0));
    inv_gap = std::max(inv_gap, (Tn.T * Tn.T_inv - I).cwiseAbs().maxCoeff());
    const double t_scale = Tn.T.cwiseAbs().maxCoeff();
    const double scale =
        std::max(1.0, (q_scale + lambda * plant.D().maxCoeff()) * t_scale);
    cancel = std::max(cancel, full_cancellation_residual(plant, family, lambda, Tn) / scale);
    const Eigen::RowVectorXd a = modal_gain(plant, Tn, lambda, c.K_Q);
    const Eigen::RowVectorXd b = modal_gain_via_Gn(plant, family, Tn, lambda, c.K_Q);
    route_gap = std::max(route_gap, (a - b).cwiseAbs().maxCoeff() /
                                        std::max(1.0, a.cwiseAbs().maxCoeff()));
    abscissa = std::max(abscissa, spectral_abscissa(target_block(plant, c.K_Q, lambda)));
  }
  checks.push_back({"det_Tn", det_gap <= 1e-10, "max |det - 1| " + fmt(det_gap)});
  checks.push_back({"Tn_inverse", inv_gap <= 1e-12, "max |T T^-1 - I| " + fmt(inv_gap)});
  checks.push_back({"full_cancellation", cancel <= 1e-9, "max scaled residual " + fmt(cancel)});
  checks.push_back({"gain_routes", route_gap <= 1e-9, "max rel gap " + fmt(route_gap)});
  if (c.N > 0)
    checks.push_back({"target_block_abscissa", abscissa <= -delta,
                      "max abscissa " + fmt(abscissa) + " vs -delta " + fmt(-delta)});

  if (c.N > 0) {
    Eigen::MatrixXd diag_rows = Eigen::MatrixXd::Zero(c.N, plant.m() * c.N);
    for (int k = 0; k < c.N; ++k) diag_rows.block(k, k * plant.m(), 1, plant.m()) = c.Kbar[k];
    const double fact = (c.Bmat * c.K - diag_rows).cwiseAbs().maxCoeff() /
                        std::max(1.0, diag_rows.cwiseAbs().maxCoeff());
    checks.push_back({"factorization", fact <= 1e-9, "max rel gap " + fmt(fact)});
  }

  // Target-coordinate residual along a simulated trajectory from z0 = 1.
  {
    SimConfig sim;
    sim.modes = std::max(cfg.modes, c.N + 1);
    const std::vector<ShapeFunction> ones(plant.m(), ShapeFunction{CosineSeries{{{1.0, 0.0}}}});
    const Eigen::MatrixXd coeffs = project_initial(ones, basis, sim.modes);
    const Eigen::VectorXd z0 = Eigen::Map<const Eigen::VectorXd>(coeffs.data(), coeffs.size());
    const Eigen::MatrixXd system = assemble_closed_loop(plant, c, basis, sim.modes);
    const Trajectory traj = integrate(system, z0, plant.m(), sim.t_final, sim.output_step());
    const TargetResidual r = target_coordinates(traj, system, plant, family, c, basis);
    checks.push_back({"target_coordinates", r.relative <= 1e-6, "relative " + fmt(r.relative)});
  }

  try {
    const Certificate cert = certificate(plant, c, family, basis, cfg.modes);
    std::ostringstream os;
    os << "max eig Gamma " << fmt(cert.gamma_margin);
    if (!cert.omega_margins.empty())
      os << ", max eig Omega_n "
         << fmt(*std::max_element(cert.omega_margins.begin(), cert.omega_margins.end()));
    checks.push_back({"certificate", true, os.str()});
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kCertificateViolation) throw;
    checks.push_back({"certificate", false, e.what()});
  }

  bool all = true;
  for (const auto& check : checks) {
    out << (check.pass ? "PASS " : "FAIL ") << std::left << std::setw(24) << check.name << " "
        << check.detail << "\n";
    all = all && check.pass;
  }
  return all ? kExitOk : kExitVerifyFailed;
}

int cmd_bench(const RunConfig& cfg, std::ostream& out) {
  const double delta = require_delta(cfg);
  const PlantSpec spec = plant_from_json(read_json_file(cfg.plant_path));
  validate_plant(spec, cfg.diffusion_tol);
  const auto rows = run_bench(spec, delta, cfg.bench_Ns, cfg.repeats);
  std::ostringstream csv;
  csv << "N,t_modal,t_direct,ratio\n";
  for (const auto& r : rows)
    csv << r.N << "," << format_real(r.t_modal) << "," << format_real(r.t_direct) << ","
        << format_real(r.ratio()) << "\n";
  fs::create_directories(cfg.out_dir);
  write_file_atomic(fs::path(cfg.out_dir) / "bench.csv", csv.str());
  out << csv.str();
  return kExitOk;
}

int exit_code_for(const Error& e) { return static_cast<int>(e.category()); }

}  // namespace

std::vector<ShapeFunction> bench_shapes(const PlantSpec& spec, int N) {
  std::vector<ShapeFunction> shapes(spec.shapes.begin(),
                                    spec.shapes.begin() + std::min<std::size_t>(N, spec.shapes.size()));
  const double width = std::min(0.1, spec.L / (N + 2));
  for (int j = static_cast<int>(shapes.size()) + 1; j <= N; ++j)
    shapes.push_back({Indicator{j * width, (j + 1) * width}});
  return shapes;
}

std::vector<BenchRow> run_bench(const PlantSpec& spec, double delta, const std::vector<int>& Ns,
                                int repeats, double min_seconds) {
  using Clock = std::chrono::steady_clock;
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  // Seconds per call of `body`, looping until min_seconds have passed.
  auto time_per_call = [min_seconds](auto&& body) {
    long calls = 0;
    const auto start = Clock::now();
    double elapsed = 0.0;
    do {
      body();
      ++calls;
      elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    } while (elapsed < min_seconds);
    return elapsed / static_cast<double>(calls);
  };

  std::vector<BenchRow> rows;
  for (int N : Ns) {
    if (N < 1) throw Error(ErrorCode::kBadInput, "bench N values must be positive");
    PlantSpec extended = spec;
    extended.shapes = bench_shapes(spec, N);
    const ValidatedPlant plant = validate_plant(extended);
    const SpectralBasis basis = build_basis(spec.L, spec.gamma1, spec.gamma2, N + 1);
    const InputMatrix input = input_matrix(extended.shapes, basis, N);

    std::vector<double> modal, direct;
    for (int r = 0; r < repeats; ++r) {
      modal.push_back(time_per_call([&] {
        const ModalSynthesis s = modal_synthesis(plant, basis, input.B, delta, N);
        if (s.K.rows() != N) throw Error(ErrorCode::kBadInput, "unexpected gain size");
      }));
      direct.push_back(time_per_call([&] {
        const Eigen::MatrixXd K =
            direct_riccati_gain(assemble_open_loop(plant, basis, input.B, N), delta);
        if (K.rows() != N) throw Error(ErrorCode::kBadInput, "unexpected gain size");
      }));
    }
    rows.push_back({N, median(modal), median(direct)});
  }
  return rows;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Modal-decomposition stabilization of cascaded heat equations"};
  app.require_subcommand(1);

  auto add_common = [&cfg](CLI::App* sub) {
    sub->add_option("--plant", cfg.plant_path, "plant JSON file")->required();
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_option("--delta", cfg.delta, "target decay rate");
    sub->add_option("--diffusion-tol", cfg.diffusion_tol,
                    "relative tolerance for grouping equal diffusion coefficients");
    sub->add_option("--pole-offsets", cfg.pole_offsets,
                    "distinct positive offsets k for the poles -(delta - lambda_1 d_m) - k")
        ->delimiter(',');
  };
  auto add_synthesis = [&cfg](CLI::App* sub) {
    sub->add_option("--N", cfg.N, "number of stabilized modes (default: smallest admissible)");
    sub->add_option("--modes", cfg.modes, "modes used for certificates and simulation");
    sub->add_flag("--dump-basis", cfg.dump_basis, "write basis.json");
    sub->add_flag("--dump-transform", cfg.dump_transform, "write transform.json");
  };

  CLI::App* synth = app.add_subcommand("synthesize", "compute gains and a certificate");
  add_common(synth);
  add_synthesis(synth);

  CLI::App* sim = app.add_subcommand("simulate", "simulate the closed loop");
  add_common(sim);
  add_synthesis(sim);
  sim->add_option("--gains", cfg.gains_path, "gains JSON file (otherwise synthesized inline)");
  sim->add_option("--initial", cfg.initial_path, "initial condition JSON file");
  sim->add_option("--t-final", cfg.t_final, "simulation horizon");
  sim->add_option("--dt-out", cfg.dt_out, "output cadence (default t_final/400)");
  sim->add_option("--grid-points", cfg.grid_points, "spatial samples for field output");
  sim->add_option("--fit-begin", cfg.fit_begin, "start of the decay fit window (fraction)");
  sim->add_option("--fit-end", cfg.fit_end, "end of the decay fit window (fraction)");
  sim->add_flag("--open-loop", cfg.open_loop, "force u = 0");

  CLI::App* verify = app.add_subcommand("verify", "run the identity and certificate checks");
  add_common(verify);
  add_synthesis(verify);
  verify->add_option("--inject-tbar-fault", cfg.tbar_fault,
                     "debug: add a value to one entry of Tbar_i, as i:row:col:value");

  CLI::App* bench = app.add_subcommand("bench", "time modal against direct synthesis");
  add_common(bench);
  bench->add_option("--N-list", cfg.bench_Ns, "values of N")->delimiter(',');
  bench->add_option("--repeats", cfg.repeats, "measurements per N (median reported)");

  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (synth->parsed()) return cmd_synthesize(cfg, out);
    if (sim->parsed()) return cmd_simulate(cfg, out);
    if (verify->parsed()) return cmd_verify(cfg, out);
    if (bench->parsed()) return cmd_bench(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInput;
}

}  // namespace cascade_stab
