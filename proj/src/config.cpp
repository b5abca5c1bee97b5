#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include <yaml-cpp/yaml.h>

#include "bsforge/sweep.hpp"

namespace bsforge {

namespace {

template <class T>
std::vector<T> as_list(const YAML::Node &n) {
  if (n.IsSequence()) {
    return n.as<std::vector<T>>();
  }
  return {n.as<T>()};
}

} // namespace

DispersionSymbol SweepConfig::make_symbol() const {
  if (symbol == "laplacian") {
    return DispersionSymbol::laplacian();
  }
  if (symbol == "fractional") {
    return DispersionSymbol::fractional(s);
  }
  throw std::invalid_argument("unknown symbol '" + symbol + "' (laplacian or fractional)");
}

double SweepConfig::M_for(double e) const {
  return m_rule == MRule::fixed ? M : std::max(2.0, std::log(1.0 / e));
}

double SweepConfig::c0_for(double e) const {
  return c0_rule == C0Rule::inverse_M ? 1.0 / M_for(e) : c0;
}

void SweepConfig::validate() const {
  if (dimension < 1) {
    throw std::invalid_argument("dimension must be at least 1");
  }
  (void)make_symbol();
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("lambda must be positive");
  }
  if (eps.empty() || q.empty() || L.empty()) {
    throw std::invalid_argument("eps, q and L lists must be nonempty");
  }
  for (double e : eps) {
    if (!(e > 0.0 && e <= 0.5)) {
      throw std::invalid_argument("eps values must lie in (0, 0.5], got " + number(e));
    }
  }
  for (double v : q) {
    if (!(v > dimension / 2.0)) {
      throw std::invalid_argument("q values must exceed d/2, got " + number(v));
    }
  }
  for (double v : L) {
    if (!(v >= 1.0)) {
      throw std::invalid_argument("L values must be >= 1, got " + number(v));
    }
  }
  if (m_rule == MRule::fixed && !(M >= 1.0)) {
    throw std::invalid_argument("M must be >= 1");
  }
  if (c0_rule == C0Rule::fixed && !(c0 > 0.0)) {
    throw std::invalid_argument("c0 must be positive");
  }
  if (!(power_tol > 0.0) || max_iter < 1 || !(cert_tol > 0.0)) {
    throw std::invalid_argument("tolerances must be positive");
  }
  if (!(tau > 0.0) || tau > 1e-4) {
    throw std::invalid_argument("tau must lie in (0, 1e-4]");
  }
  // resolution rule at the smallest eps: the default seed's cap must hold 8 spacings
  double e_min = eps.front();
  for (double e : eps) {
    e_min = std::min(e_min, e);
  }
  const auto sym = make_symbol();
  const double M_min = M_for(e_min);
  const auto region = tube_region(e_min, M_min, sym, lambda);
  const auto g = grid_for_region(region, sym, lambda, dimension, grid);
  const double c = c0_for(e_min) * e_min;
  double dxi_t = 0.0;
  for (int j = 1; j < dimension; ++j) {
    dxi_t = std::max(dxi_t, g->frequency_spacing(j));
  }
  const auto sc = tube_scales(sym, lambda);
  if (4.0 * c / sc.axial < 8.0 * g->frequency_spacing(0) ||
      (dimension > 1 && 4.0 * std::sqrt(c) / sc.transverse < 8.0 * dxi_t)) {
    throw std::invalid_argument("grid policy violates the resolution rule at eps = " +
                                number(e_min) +
                                ": the cap must span at least 8 frequency spacings");
  }
}

SweepConfig parse_config(const std::string &text) {
  SweepConfig c;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception &e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
  if (root.IsNull()) {
    c.validate();
    return c;
  }
  if (!root.IsMap()) {
    throw std::invalid_argument("config must be a mapping of keys to values");
  }
  const std::map<std::string, std::function<void(const YAML::Node &)>> keys{
      {"dimension", [&](const YAML::Node &n) { c.dimension = n.as<int>(); }},
      {"symbol", [&](const YAML::Node &n) { c.symbol = n.as<std::string>(); }},
      {"s", [&](const YAML::Node &n) { c.s = n.as<double>(); }},
      {"lambda", [&](const YAML::Node &n) { c.lambda = n.as<double>(); }},
      {"eps", [&](const YAML::Node &n) { c.eps = as_list<double>(n); }},
      {"M_rule",
       [&](const YAML::Node &n) {
         const auto v = n.as<std::string>();
         if (v == "fixed") {
           c.m_rule = MRule::fixed;
         } else if (v == "log") {
           c.m_rule = MRule::log_rule;
         } else {
           throw std::invalid_argument("M_rule must be 'fixed' or 'log'");
         }
       }},
      {"M", [&](const YAML::Node &n) { c.M = n.as<double>(); }},
      {"c0_rule",
       [&](const YAML::Node &n) {
         const auto v = n.as<std::string>();
         if (v == "inverse_M") {
           c.c0_rule = C0Rule::inverse_M;
         } else if (v == "fixed") {
           c.c0_rule = C0Rule::fixed;
         } else {
           throw std::invalid_argument("c0_rule must be 'inverse_M' or 'fixed'");
         }
       }},
      {"c0", [&](const YAML::Node &n) { c.c0 = n.as<double>(); }},
      {"q", [&](const YAML::Node &n) { c.q = as_list<double>(n); }},
      {"L", [&](const YAML::Node &n) { c.L = as_list<double>(n); }},
      {"fractional_N", [&](const YAML::Node &n) { c.fractional_N = as_list<int>(n); }},
      {"margin", [&](const YAML::Node &n) { c.grid.margin = n.as<double>(); }},
      {"spacing", [&](const YAML::Node &n) { c.grid.spacing = n.as<double>(); }},
      {"grid_scale", [&](const YAML::Node &n) { c.grid.grid_scale = n.as<double>(); }},
      {"power_tol", [&](const YAML::Node &n) { c.power_tol = n.as<double>(); }},
      {"max_iter", [&](const YAML::Node &n) { c.max_iter = n.as<int>(); }},
      {"tau", [&](const YAML::Node &n) { c.tau = n.as<double>(); }},
      {"cert_tol", [&](const YAML::Node &n) { c.cert_tol = n.as<double>(); }},
      {"full_y_set", [&](const YAML::Node &n) { c.full_y_set = n.as<bool>(); }},
      {"record_timing", [&](const YAML::Node &n) { c.record_timing = n.as<bool>(); }},
      {"out_dir", [&](const YAML::Node &n) { c.out_dir = n.as<std::string>(); }},
      {"csv", [&](const YAML::Node &n) { c.csv = n.as<std::string>(); }},
  };
  for (const auto &kv : root) {
    const auto key = kv.first.as<std::string>();
    const auto it = keys.find(key);
    if (it == keys.end()) {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
    try {
      it->second(kv.second);
    } catch (const YAML::Exception &e) {
      throw std::invalid_argument("config key '" + key + "' has the wrong type: " + e.what());
    }
  }
  c.validate();
  return c;
}

SweepConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open config " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

} // namespace bsforge
