#include "extflow/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "extflow/errors.hpp"

namespace extflow::config {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

Component parse_component(const json& j, const std::string& where) {
  const auto s = j.at("component").get<std::string>();
  if (s == "r") return Component::r;
  if (s == "theta") return Component::theta;
  throw ConfigError(where + ": component must be 'r' or 'theta', got '" + s + "'");
}

template <class T>
void read(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

}  // namespace

SolveConfig parse_config(const std::string& text) {
  SolveConfig cfg;
  try {
    const json j = json::parse(text);
    check_keys(j,
               {"mu", "nu", "modes", "grid", "tolerances", "max_iter", "lambda_delta", "forcing",
                "boundary", "random_boundary", "random_amplitude", "output", "seed"},
               "config");
    read(j, "mu", cfg.mu);
    read(j, "nu", cfg.nu);
    read(j, "modes", cfg.modes);
    read(j, "max_iter", cfg.max_iter);
    read(j, "lambda_delta", cfg.lambda_delta);
    read(j, "random_boundary", cfg.random_boundary);
    read(j, "random_amplitude", cfg.random_amplitude);
    read(j, "output", cfg.output);
    read(j, "seed", cfg.seed);
    if (j.contains("grid")) {
      const json& g = j.at("grid");
      check_keys(g, {"nodes", "rmax"}, "grid");
      read(g, "nodes", cfg.nodes);
      read(g, "rmax", cfg.rmax);
    }
    if (j.contains("tolerances")) {
      const json& t = j.at("tolerances");
      check_keys(t, {"picard", "residual"}, "tolerances");
      read(t, "picard", cfg.picard_tol);
      read(t, "residual", cfg.residual_tol);
    }
    if (j.contains("forcing")) {
      for (const json& e : j.at("forcing")) {
        check_keys(e, {"component", "k", "amplitude", "amplitude_im", "decay"}, "forcing entry");
        ForcingTerm t;
        t.component = parse_component(e, "forcing entry");
        t.k = e.at("k").get<int>();
        t.amplitude = cplx(e.at("amplitude").get<double>(), e.value("amplitude_im", 0.0));
        t.decay = e.at("decay").get<double>();
        cfg.forcing.push_back(t);
      }
    }
    if (j.contains("boundary")) {
      for (const json& e : j.at("boundary")) {
        check_keys(e, {"component", "k", "re", "im"}, "boundary entry");
        BoundaryTerm t;
        t.component = parse_component(e, "boundary entry");
        t.k = e.at("k").get<int>();
        t.value = cplx(e.at("re").get<double>(), e.value("im", 0.0));
        cfg.boundary.push_back(t);
      }
    }
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("config: ") + ex.what());
  }
  validate(cfg);
  return cfg;
}

SolveConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const SolveConfig& cfg) {
  if (!std::isfinite(cfg.mu) || !std::isfinite(cfg.nu)) throw ConfigError("mu and nu must be finite");
  if (cfg.modes < 0) throw ConfigError("modes must be >= 0");
  if (cfg.nodes < 6) throw ConfigError("grid.nodes must be >= 6");
  if (!(cfg.rmax > 1.0) || !std::isfinite(cfg.rmax)) throw ConfigError("grid.rmax must exceed 1");
  if (!(cfg.picard_tol > 0.0)) throw ConfigError("tolerances.picard must be positive");
  if (!(cfg.residual_tol > 0.0)) throw ConfigError("tolerances.residual must be positive");
  if (cfg.max_iter < 1) throw ConfigError("max_iter must be >= 1");
  if (!(cfg.lambda_delta > 0.0)) throw ConfigError("lambda_delta must be positive");
  if (cfg.random_boundary < 0 || cfg.random_boundary > cfg.modes) {
    throw ConfigError("random_boundary must lie in [0, modes]");
  }
  for (const auto& t : cfg.forcing) {
    if (t.k < 0 || t.k > cfg.modes) throw ConfigError("forcing k must lie in [0, modes]");
    if (!(t.decay > 3.0)) throw ConfigError("forcing decay must exceed 3");
    if (t.k == 0 && t.amplitude.imag() != 0.0) {
      throw ConfigError("forcing at k = 0 must be real");
    }
  }
  for (const auto& t : cfg.boundary) {
    if (t.k < 0 || t.k > cfg.modes) throw ConfigError("boundary k must lie in [0, modes]");
    if (t.k == 0 && t.value.imag() != 0.0) throw ConfigError("boundary value at k = 0 must be real");
  }
}

Forcing build_forcing(const SolveConfig& cfg, const GridPtr& grid) {
  Forcing f(grid, cfg.modes);
  for (const auto& t : cfg.forcing) {
    const RadialProfile term = RadialProfile::sample(
        grid, [&](double r) { return t.amplitude * std::pow(r, -t.decay); }, t.decay);
    auto add = [&](int k, const RadialProfile& p) {
      auto& m = f.mode(k);
      (t.component == Component::r ? m.fr : m.ft) += p;
    };
    add(t.k, term);
    if (t.k != 0) add(-t.k, term.conj());
  }
  return f;
}

spectral::BoundaryData build_boundary(const SolveConfig& cfg) {
  spectral::BoundaryData g(cfg.modes);
  auto put = [&](Component c, int k, cplx v) {
    auto& seq = c == Component::r ? g.g_r : g.g_theta;
    seq[k] += v;
    if (k != 0) seq[-k] += std::conj(v);
  };
  for (const auto& t : cfg.boundary) put(t.component, t.k, t.value);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 1; k <= cfg.random_boundary; ++k) {
    const double a = cfg.random_amplitude / (1.0 + double(k) * k);
    for (Component c : {Component::r, Component::theta}) {
      const double re = u(rng);
      const double im = u(rng);
      put(c, k, a * cplx(re, im));
    }
  }
  return g;
}

double min_decay(const SolveConfig& cfg) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& t : cfg.forcing) m = std::min(m, t.decay);
  return m;
}

}  // namespace extflow::config
