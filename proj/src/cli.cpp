#include "extflow/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "extflow/errors.hpp"
#include "extflow/linear_solver.hpp"

namespace extflow::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr double kFluxRadii[] = {1.0, 2.0, 5.0, 10.0};
constexpr double kStructuralTol = 1e-8;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json jnum(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double effective_delta(const config::SolveConfig& cfg) {
  return std::min(cfg.lambda_delta, config::min_decay(cfg) - 3.0);
}

FlowParameters normalized_params(const config::SolveConfig& cfg,
                                 spectral::BoundaryData* g_out) {
  auto [g, nu] = spectral::normalize_boundary(config::build_boundary(cfg), cfg.nu);
  if (g_out) *g_out = std::move(g);
  return FlowParameters{nu, cfg.mu};
}

json admissibility_json(const params::AdmissibilityReport& a) {
  return json{{"admissible", a.admissible},
              {"re_xi1_minus", a.re_xi1_minus},
              {"margin", a.margin},
              {"critical_mu", a.critical_mu ? json(*a.critical_mu) : json(nullptr)},
              {"lambda", a.lambda ? json(*a.lambda) : json(nullptr)},
              {"note", a.note}};
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  return f;
}

double log_abs(cplx c) { return std::log(std::abs(c)); }

bool all_pass(const std::vector<Check>& c) {
  return std::all_of(c.begin(), c.end(), [](const Check& x) { return x.pass; });
}

Check upper(std::string name, double value, double threshold) {
  return Check{std::move(name), value, threshold, value <= threshold};
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw ConfigError("malformed number '" + s + "'");
  return v;
}

}  // namespace

void run_admissible(const AdmissibleScan& s, std::ostream& region, std::ostream& boundary) {
  if (s.steps < 1 || !(s.nu_min <= s.nu_max) || !(s.mu_min <= s.mu_max)) {
    throw ConfigError("admissible: empty scan range");
  }
  auto at = [&](double lo, double hi, int i) {
    return s.steps == 1 ? lo : lo + (hi - lo) * i / (s.steps - 1);
  };
  region << "nu,mu,re_xi1_minus,margin,admissible,critical_mu\n";
  boundary << "nu,critical_mu,bisected_mu,difference\n";
  for (int i = 0; i < s.steps; ++i) {
    const double nu = at(s.nu_min, s.nu_max, i);
    const auto crit = params::critical_mu(nu);
    for (int j = 0; j < s.steps; ++j) {
      const double mu = at(s.mu_min, s.mu_max, j);
      const auto rep = params::admissibility(FlowParameters{nu, mu});
      region << num(nu) << ',' << num(mu) << ',' << num(rep.re_xi1_minus) << ','
             << num(rep.margin) << ',' << (rep.admissible ? 1 : 0) << ','
             << (crit ? num(*crit) : "") << '\n';
    }
    if (crit) {
      const auto b = params::bisect_threshold(nu, 1e4, 1e-13);
      boundary << num(nu) << ',' << num(*crit) << ',' << (b ? num(*b) : "") << ','
               << (b ? num(std::abs(*b - *crit)) : "") << '\n';
    }
  }
}

SolveOutcome solve(const config::SolveConfig& cfg) {
  config::validate(cfg);
  SolveOutcome out;
  out.nu_input = cfg.nu;
  out.params = normalized_params(cfg, &out.boundary);
  const double delta = effective_delta(cfg);
  out.admissibility = params::admissibility(out.params, delta);
  if (!out.admissibility.admissible) {
    throw InadmissibleParameters("Re xi_1^- = " + num(out.admissibility.re_xi1_minus) +
                                 " is not below -2");
  }
  if (!out.admissibility.note.empty()) out.warnings.push_back(out.admissibility.note);
  if (linear::near_branch_point(out.params)) {
    out.warnings.push_back("nu within 0.1 below -2: zero-mode constants scale like 1/(nu+2)");
  }

  const GridPtr grid = radial::make_grid(cfg.nodes, cfg.rmax);
  out.forcing = config::build_forcing(cfg, grid);
  nonlinear::PicardConfig pc;
  pc.tol = cfg.picard_tol;
  pc.max_iter = cfg.max_iter;
  pc.lambda_delta = delta;
  out.picard = nonlinear::picard_solve(out.forcing, out.boundary, out.params, pc);
  if (out.picard.report.discarded > 0.0) {
    out.warnings.push_back("convolution truncation discarded " +
                           num(out.picard.report.discarded) + " (E-norm)");
  }
  const ModeField& v = out.picard.field;
  out.residual = nonlinear::residual_curl(v, out.params, out.forcing);
  out.divergence = checks::divergence_error(v);
  out.boundary_error = checks::boundary_error(v, out.boundary);
  out.physical_boundary_error =
      checks::physical_boundary_error(v, out.boundary, out.params, 4 * cfg.modes + 2);
  out.conjugate = checks::conjugate_asymmetry(v);
  return out;
}

void write_outputs(const SolveOutcome& out, const config::SolveConfig& cfg,
                   const std::string& dir) {
  fs::create_directories(dir);
  const ModeField& v = out.picard.field;
  const auto& grid = *v.grid();
  const int K = v.kmax();

  {
    auto f = open_out(fs::path(dir) / "modes.csv");
    f << "k,r,vr_re,vr_im,vt_re,vt_im,w_re,w_im\n";
    for (int k = -K; k <= K; ++k) {
      const auto& m = v.mode(k);
      for (std::size_t j = 0; j < grid.size(); ++j) {
        f << k << ',' << num(grid.r(j)) << ',' << num(m.vr[j].real()) << ','
          << num(m.vr[j].imag()) << ',' << num(m.vt[j].real()) << ',' << num(m.vt[j].imag())
          << ',' << num(m.w[j].real()) << ',' << num(m.w[j].imag()) << '\n';
      }
    }
  }

  {
    auto f = open_out(fs::path(dir) / "field.csv");
    f << "r,theta,u_r,u_theta\n";
    const int n_theta = std::max(64, 4 * K + 2);
    const std::size_t stride = std::max<std::size_t>(1, grid.intervals() / 100);
    for (std::size_t j = 0; j < grid.size(); j += stride) {
      for (int l = 0; l < n_theta; ++l) {
        const double theta = 2.0 * std::numbers::pi * l / n_theta;
        const auto [ur, ut] = spectral::synthesize(v, out.params, grid.r(j), theta);
        f << num(grid.r(j)) << ',' << num(theta) << ',' << num(ur) << ',' << num(ut) << '\n';
      }
    }
  }

  {
    auto f = open_out(fs::path(dir) / "decay_plot.csv");
    f << "k,log_r,log_abs_vr,log_abs_vt,log_abs_w\n";
    const std::size_t stride = std::max<std::size_t>(1, grid.intervals() / 200);
    for (int k = 0; k <= K; ++k) {
      const auto& m = v.mode(k);
      for (std::size_t j = 0; j < grid.size(); j += stride) {
        f << k << ',' << num(grid.t(j)) << ',' << num(log_abs(m.vr[j])) << ','
          << num(log_abs(m.vt[j])) << ',' << num(log_abs(m.w[j])) << '\n';
      }
    }
  }

  const auto& rep = out.picard.report;
  json modes = json::array();
  const auto bounds = checks::mode_bounds(v, out.forcing, out.boundary, out.params);
  const auto slopes = checks::decay_slopes(v);
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    modes.push_back({{"k", bounds[i].k},
                     {"solution_norm", bounds[i].solution_norm},
                     {"data_norm", bounds[i].data_norm},
                     {"bound_ratio", bounds[i].ratio},
                     {"a_k", bounds[i].a_k},
                     {"slope_v", jnum(slopes[i].v)},
                     {"slope_w", jnum(slopes[i].w)}});
  }
  json flux = json::array();
  for (double r : kFluxRadii) {
    flux.push_back({{"r", r},
                    {"value", nonlinear::flux(v, out.params, r)},
                    {"quadrature", nonlinear::flux_quadrature(v, out.params, r, 4 * K + 2)},
                    {"expected", 2.0 * std::numbers::pi * out.params.nu}});
  }
  json d = {
      {"schema", "extflow-diagnostics/1"},
      {"parameters",
       {{"nu", out.params.nu},
        {"nu_input", out.nu_input},
        {"mu", out.params.mu},
        {"modes", cfg.modes},
        {"nodes", cfg.nodes},
        {"rmax", cfg.rmax},
        {"seed", cfg.seed}}},
      {"admissibility", admissibility_json(out.admissibility)},
      {"lambda", v.lambda()},
      {"sigma", v.sigma},
      {"norms",
       {{"btilde", nonlinear::btilde_norm(v)},
        {"forcing_e", e_norm(out.forcing, v.lambda())},
        {"boundary_v", spectral::v_norm(out.boundary)}}},
      {"modes", modes},
      {"iteration",
       {{"iterations", rep.iterations},
        {"converged", rep.converged},
        {"status", rep.status},
        {"tolerance", rep.tolerance},
        {"norms", rep.norms},
        {"diff_norms", rep.diff_norms},
        {"ratios", rep.ratios},
        {"contraction", rep.contraction()},
        {"truncation_loss", rep.discarded}}},
      {"residuals",
       {{"curl_relative", out.residual.relative},
        {"curl_absolute", out.residual.absolute},
        {"curl_scale", out.residual.scale},
        {"divergence", out.divergence},
        {"boundary", out.boundary_error},
        {"boundary_physical", out.physical_boundary_error},
        {"conjugate_asymmetry", out.conjugate}}},
      {"flux", flux},
      {"warnings", out.warnings}};
  auto f = open_out(fs::path(dir) / "diagnostics.json");
  f << d.dump(2) << '\n';
}

int run_solve(const config::SolveConfig& cfg, std::ostream& log) {
  SolveOutcome out;
  try {
    out = solve(cfg);
  } catch (const InadmissibleParameters& ex) {
    spectral::BoundaryData g;
    const FlowParameters p = normalized_params(cfg, &g);
    fs::create_directories(cfg.output);
    auto f = open_out(fs::path(cfg.output) / "diagnostics.json");
    f << json{{"schema", "extflow-diagnostics/1"},
              {"parameters", {{"nu", p.nu}, {"nu_input", cfg.nu}, {"mu", p.mu}}},
              {"admissibility", admissibility_json(params::admissibility(p))}}
             .dump(2)
      << '\n';
    log << "inadmissible parameters: " << ex.what() << '\n';
    return kInadmissible;
  }
  write_outputs(out, cfg, cfg.output);
  const auto& rep = out.picard.report;
  for (const auto& w : out.warnings) log << "warning: " << w << '\n';
  log << "lambda " << num(out.picard.field.lambda()) << ", sigma " << num(out.picard.field.sigma)
      << '\n';
  log << "picard: " << rep.status << " after " << rep.iterations << " iterations, contraction "
      << num(rep.contraction()) << '\n';
  log << "curl residual " << num(out.residual.relative) << ", divergence " << num(out.divergence)
      << ", boundary " << num(out.boundary_error) << '\n';
  if (!rep.converged) return kNoConvergence;
  const bool ok = out.residual.relative <= cfg.residual_tol &&
                  out.divergence <= kStructuralTol && out.boundary_error <= kStructuralTol &&
                  out.physical_boundary_error <= kStructuralTol;
  return ok ? kOk : kVerificationFailed;
}

bool VerifyReport::pass() const { return all_pass(checks); }

VerifyReport run_verify(const config::SolveConfig& cfg, const std::string& dir) {
  config::validate(cfg);
  spectral::BoundaryData g;
  const FlowParameters p = normalized_params(cfg, &g);
  const GridPtr grid = radial::make_grid(cfg.nodes, cfg.rmax);
  const Forcing forcing = config::build_forcing(cfg, grid);

  json diag;
  {
    std::ifstream in(fs::path(dir) / "diagnostics.json");
    if (!in) throw ConfigError("missing diagnostics.json in '" + dir + "'");
    try {
      diag = json::parse(in);
    } catch (const json::exception& ex) {
      throw ConfigError(std::string("diagnostics.json: ") + ex.what());
    }
  }
  if (!diag.contains("lambda") || !diag.contains("sigma")) {
    throw ConfigError("diagnostics.json lacks lambda/sigma (inadmissible run?)");
  }
  const double lambda = diag.at("lambda").get<double>();
  ModeField v(grid, cfg.modes, lambda);
  v.sigma = diag.at("sigma").get<double>();
  v.derivatives = DerivativeData::none;

  {
    std::ifstream in(fs::path(dir) / "modes.csv");
    if (!in) throw ConfigError("missing modes.csv in '" + dir + "'");
    std::string line;
    std::getline(in, line);
    if (line != "k,r,vr_re,vr_im,vt_re,vt_im,w_re,w_im") throw ConfigError("modes.csv: bad header");
    const int K = cfg.modes;
    std::vector<std::vector<cplx>> vr(2 * K + 1, std::vector<cplx>(grid->size())), vt = vr,
                                                                                  w = vr;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto c = split_csv(line);
      if (c.size() != 8) throw ConfigError("modes.csv: expected 8 columns");
      const int k = static_cast<int>(parse_double(c[0]));
      if (std::abs(k) > K || k != static_cast<int>(rows / grid->size()) - K) {
        throw ConfigError("modes.csv: rows out of order or mode outside truncation");
      }
      const std::size_t j = rows % grid->size();
      const double r = parse_double(c[1]);
      if (std::abs(r - grid->r(j)) > 1e-12 * r) throw ConfigError("modes.csv: grid mismatch");
      const std::size_t i = static_cast<std::size_t>(k + K);
      vr[i][j] = cplx(parse_double(c[2]), parse_double(c[3]));
      vt[i][j] = cplx(parse_double(c[4]), parse_double(c[5]));
      w[i][j] = cplx(parse_double(c[6]), parse_double(c[7]));
      ++rows;
    }
    if (rows != grid->size() * static_cast<std::size_t>(2 * K + 1)) {
      throw ConfigError("modes.csv: row count does not match the configured grid");
    }
    for (int k = -K; k <= K; ++k) {
      const std::size_t i = static_cast<std::size_t>(k + K);
      auto& m = v.mode(k);
      m.vr = RadialProfile(grid, std::move(vr[i]), lambda - 2.0);
      m.vt = RadialProfile(grid, std::move(vt[i]), lambda - 2.0);
      m.w = RadialProfile(grid, std::move(w[i]), lambda - 1.0);
    }
  }

  VerifyReport rep;
  rep.checks.push_back(upper("divergence", checks::divergence_error(v), kStructuralTol));
  rep.checks.push_back(upper("boundary_modes", checks::boundary_error(v, g), kStructuralTol));
  rep.checks.push_back(upper("boundary_physical",
                             checks::physical_boundary_error(v, g, p, 4 * cfg.modes + 2),
                             kStructuralTol));
  rep.checks.push_back(upper("conjugate_symmetry", checks::conjugate_asymmetry(v), 1e-12));
  rep.checks.push_back(
      upper("curl_residual", nonlinear::residual_curl(v, p, forcing).relative, cfg.residual_tol));
  double sv = -std::numeric_limits<double>::infinity(), sw = sv;
  for (const auto& s : checks::decay_slopes(v)) {
    sv = std::max(sv, s.v);
    sw = std::max(sw, s.w);
  }
  rep.checks.push_back(upper("decay_v", sv, -(lambda - 2.0) + 0.1));
  rep.checks.push_back(upper("decay_w", sw, -(lambda - 1.0) + 0.1));
  const double expected = 2.0 * std::numbers::pi * p.nu;
  double flux_err = 0.0;
  for (double r : kFluxRadii) {
    flux_err = std::max(flux_err, std::abs(nonlinear::flux_quadrature(v, p, r, 4 * cfg.modes + 2) -
                                           expected));
  }
  rep.checks.push_back(upper("flux", flux_err / std::max(1.0, std::abs(expected)), kStructuralTol));
  rep.checks.push_back(upper("sigma_branch", p.nu < -2.0 ? std::abs(v.sigma) : 0.0, 0.0));
  return rep;
}

int run(int argc, char** argv) {
  CLI::App app{"Stationary exterior Navier-Stokes flow around a source/vortex core"};
  app.require_subcommand(1);

  AdmissibleScan scan;
  std::string scan_out = ".";
  auto* adm = app.add_subcommand("admissible", "scan (nu, mu) for the decay condition");
  adm->add_option("--nu-min", scan.nu_min);
  adm->add_option("--nu-max", scan.nu_max);
  adm->add_option("--mu-min", scan.mu_min);
  adm->add_option("--mu-max", scan.mu_max);
  adm->add_option("--steps", scan.steps);
  adm->add_option("--out", scan_out, "output directory");

  std::string config_path;
  config::SolveConfig over;
  std::optional<double> mu, nu, rmax, tol;
  std::optional<int> modes, max_iter;
  std::optional<std::size_t> nodes;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  auto add_common = [&](CLI::App* s) {
    s->add_option("--config", config_path, "JSON configuration file");
    s->add_option("--mu", mu);
    s->add_option("--nu", nu);
    s->add_option("--modes", modes);
    s->add_option("--rmax", rmax);
    s->add_option("--nodes", nodes);
    s->add_option("--tol", tol);
    s->add_option("--max-iter", max_iter);
    s->add_option("--out", out, "output directory");
    s->add_option("--seed", seed);
  };
  auto* sol = app.add_subcommand("solve", "run the Picard solve and write result files");
  auto* ver = app.add_subcommand("verify", "re-check a written solution");
  add_common(sol);
  add_common(ver);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  auto build_config = [&] {
    config::SolveConfig cfg = config_path.empty() ? config::SolveConfig{}
                                                  : config::load_config(config_path);
    if (mu) cfg.mu = *mu;
    if (nu) cfg.nu = *nu;
    if (modes) cfg.modes = *modes;
    if (rmax) cfg.rmax = *rmax;
    if (nodes) cfg.nodes = *nodes;
    if (tol) cfg.picard_tol = *tol;
    if (max_iter) cfg.max_iter = *max_iter;
    if (out) cfg.output = *out;
    if (seed) cfg.seed = *seed;
    config::validate(cfg);
    return cfg;
  };

  try {
    if (*adm) {
      fs::create_directories(scan_out);
      auto region = open_out(fs::path(scan_out) / "admissible.csv");
      auto boundary = open_out(fs::path(scan_out) / "admissible_boundary.csv");
      run_admissible(scan, region, boundary);
      return kOk;
    }
    const config::SolveConfig cfg = build_config();
    if (*sol) return run_solve(cfg, std::cout);
    const VerifyReport rep = run_verify(cfg, cfg.output);
    for (const auto& c : rep.checks) {
      std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " value=" << num(c.value)
                << " threshold=" << num(c.threshold) << '\n';
    }
    return rep.pass() ? kOk : kVerificationFailed;
  } catch (const ConfigError& ex) {
    std::cerr << "config error: " << ex.what() << '\n';
    return kConfigError;
  } catch (const Error& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kVerificationFailed;
  }
}

}  // namespace extflow::cli
