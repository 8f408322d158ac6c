#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <random>

#include "sparse_rom/errors.hpp"
#include "sparse_rom/harness.hpp"
#include "text_util.hpp"

namespace sparse_rom {

std::string_view to_string(StudyModel model) {
  switch (model) {
    case StudyModel::Narrowing: return "narrowing";
    case StudyModel::Curved: return "curved";
    case StudyModel::Analytic: return "analytic";
  }
  return "unknown";
}

StudyModel parse_study_model(std::string_view name) {
  for (auto m : {StudyModel::Narrowing, StudyModel::Curved, StudyModel::Analytic})
    if (to_string(m) == name) return m;
  throw ConfigError("unknown model '" + std::string(name) + "' (expected narrowing, curved or analytic)");
}

std::size_t StudyConfig::dimension() const {
  switch (model) {
    case StudyModel::Narrowing: return 1;
    case StudyModel::Curved: return 2;
    case StudyModel::Analytic: return analytic_dimension;
  }
  return 0;
}

std::string StudyConfig::effective_test_grid() const {
  if (!test_grid.empty()) return test_grid;
  switch (model) {
    case StudyModel::Narrowing: return "midpoint:40";
    case StudyModel::Curved: return "midpoint:12x6";
    case StudyModel::Analytic: return "random:1000:1";
  }
  return {};
}

std::vector<std::vector<double>> StudyConfig::test_points() const {
  return make_test_grid(effective_test_grid(), dimension());
}

FomProblem StudyConfig::fom_problem() const {
  FomProblem p;
  switch (model) {
    case StudyModel::Narrowing: p = FomProblem::narrowing(); break;
    case StudyModel::Curved: p = FomProblem::curved(); break;
    case StudyModel::Analytic: throw ConfigError("analytic studies have no flow problem");
  }
  if (nx > 0) p.nx = nx;
  if (ny > 0) p.ny = ny;
  if (nu_visc) {
    if (model == StudyModel::Curved) throw ConfigError("nu_visc is a study parameter of the curved model");
    p.flow.nu_visc = *nu_visc;
  }
  if (oseen_tol) p.flow.oseen_tol = *oseen_tol;
  if (oseen_max_iter) p.flow.oseen_max_iter = *oseen_max_iter;
  if (relaxation) p.flow.relaxation = *relaxation;
  if (bias_force) p.flow.bias_force = {0.0, -*bias_force};
  if (bias_iterations) p.flow.bias_iterations = *bias_iterations;
  p.warm_start = warm_start;
  return p;
}

std::vector<PointRuleKind> StudyConfig::direction_rules() const {
  const std::size_t d = dimension();
  if (rules.size() == 1) return std::vector<PointRuleKind>(d, rules.front());
  if (rules.size() != d)
    throw ConfigError("rule lists " + std::to_string(rules.size()) + " kinds for " + std::to_string(d) + " directions");
  return rules;
}

TensorGrid StudyConfig::tensor_grid() const {
  TensorGrid grid;
  for (PointRuleKind k : direction_rules()) grid.push_back(make_point_rule(k, n_max, rule_options));
  return grid;
}

void StudyConfig::validate() const {
  if (n_max < 1) throw ConfigError("n_max must be >= 1");
  if (dimension() < 1) throw ConfigError("the study needs at least one parameter");
  if (rules.empty()) throw ConfigError("no point rule given");
  direction_rules();
  if (compare_rules.empty()) throw ConfigError("compare_rules is empty");
  if (rule_options.grid_resolution < 1000) throw ConfigError("grid_resolution must be >= 1000");
  if (!(std::abs(rule_options.x1) <= 1.0)) throw ConfigError("x1 must lie in [-1, 1]");
  if (model == StudyModel::Analytic) {
    try {
      AnalyticMap probe(analytic, analytic_dimension, analytic_outputs, analytic_wave_number);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  } else {
    try {
      fom_problem().validate();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    if ((nx != 0 && nx < 4) || (ny != 0 && ny < 4)) throw ConfigError("nx and ny must be >= 4");
  }
  const auto pts = test_points();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t k = i + 1; k < pts.size(); ++k)
      if (pts[i] == pts[k]) throw ConfigError("test grid contains duplicate points");
}

std::vector<std::vector<double>> make_test_grid(std::string_view description, std::size_t dimension) {
  const auto parts = detail::split(description, ':');
  if (dimension == 0) throw ConfigError("test grid needs a positive dimension");
  const std::string& kind = parts[0];
  std::vector<std::vector<double>> pts;
  if (kind == "midpoint" || kind == "uniform") {
    if (parts.size() != 2) throw ConfigError("test grid '" + std::string(description) + "' expects " + kind + ":<counts>");
    std::vector<std::size_t> counts;
    for (const auto& tok : detail::split(parts[1], 'x')) {
      std::size_t c = 0;
      if (!detail::parse_int(tok, c) || c == 0) throw ConfigError("bad test grid count '" + tok + "'");
      counts.push_back(c);
    }
    if (counts.size() == 1) counts.assign(dimension, counts.front());
    if (counts.size() != dimension)
      throw ConfigError("test grid has " + std::to_string(counts.size()) + " counts for " + std::to_string(dimension) + " directions");
    std::vector<std::vector<double>> axes;
    for (std::size_t c : counts) {
      std::vector<double> axis(c);
      if (kind == "midpoint") {
        for (std::size_t i = 0; i < c; ++i) axis[i] = -1.0 + (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(c);
      } else {
        if (c < 2) throw ConfigError("uniform test grids need at least 2 points per direction");
        for (std::size_t i = 0; i < c; ++i) axis[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(c - 1);
      }
      axes.push_back(std::move(axis));
    }
    // Tensor product, first direction fastest.
    std::vector<std::size_t> idx(dimension, 0);
    while (true) {
      std::vector<double> p(dimension);
      for (std::size_t j = 0; j < dimension; ++j) p[j] = axes[j][idx[j]];
      pts.push_back(std::move(p));
      std::size_t j = 0;
      while (j < dimension && ++idx[j] == counts[j]) idx[j++] = 0;
      if (j == dimension) break;
    }
  } else if (kind == "random") {
    std::size_t count = 0;
    std::uint64_t seed = 0;
    if (parts.size() != 3 || !detail::parse_int(parts[1], count) || !detail::parse_int(parts[2], seed) || count == 0)
      throw ConfigError("test grid '" + std::string(description) + "' expects random:<count>:<seed>");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (std::size_t i = 0; i < count; ++i) {
      std::vector<double> p(dimension);
      for (double& v : p) v = dist(rng);
      pts.push_back(std::move(p));
    }
  } else {
    throw ConfigError("unknown test grid kind '" + kind + "' (expected midpoint, uniform or random)");
  }
  return pts;
}

namespace {

template <class T>
T require_int(const std::string& key, const std::string& value) {
  T out{};
  if (!detail::parse_int(value, out)) throw ConfigError(key + ": expected an integer, got '" + value + "'");
  return out;
}

double require_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  if (!detail::parse_double(value, out)) throw ConfigError(key + ": expected a number, got '" + value + "'");
  return out;
}

bool require_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

std::vector<PointRuleKind> require_rules(const std::string& key, const std::string& value) {
  std::vector<PointRuleKind> out;
  for (const auto& tok : detail::split(value, ',')) {
    try {
      out.push_back(parse_point_rule_kind(tok));
    } catch (const InvalidInputError& e) {
      throw ConfigError(key + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

StudyConfig parse_study_config(std::istream& in) {
  StudyConfig cfg;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"model", [&](const auto&, const auto& v) { cfg.model = parse_study_model(v); }},
      {"analytic",
       [&](const auto& k, const auto& v) {
         try {
           cfg.analytic = parse_analytic_kind(v);
         } catch (const InvalidInputError& e) {
           throw ConfigError(k + ": " + e.what());
         }
       }},
      {"analytic_dimension", [&](const auto& k, const auto& v) { cfg.analytic_dimension = require_int<std::size_t>(k, v); }},
      {"analytic_outputs", [&](const auto& k, const auto& v) { cfg.analytic_outputs = require_int<std::size_t>(k, v); }},
      {"analytic_wave_number", [&](const auto& k, const auto& v) { cfg.analytic_wave_number = require_double(k, v); }},
      {"rule", [&](const auto& k, const auto& v) { cfg.rules = require_rules(k, v); }},
      {"compare_rules", [&](const auto& k, const auto& v) { cfg.compare_rules = require_rules(k, v); }},
      {"grid_resolution", [&](const auto& k, const auto& v) { cfg.rule_options.grid_resolution = require_int<int>(k, v); }},
      {"x1", [&](const auto& k, const auto& v) { cfg.rule_options.x1 = require_double(k, v); }},
      {"master_size", [&](const auto& k, const auto& v) { cfg.rule_options.master_size = require_int<std::size_t>(k, v); }},
      {"n_max", [&](const auto& k, const auto& v) { cfg.n_max = require_int<std::size_t>(k, v); }},
      {"test_grid", [&](const auto&, const auto& v) { cfg.test_grid = v; }},
      {"allow_test_overlap", [&](const auto& k, const auto& v) { cfg.allow_test_overlap = require_bool(k, v); }},
      {"nx", [&](const auto& k, const auto& v) { cfg.nx = require_int<int>(k, v); }},
      {"ny", [&](const auto& k, const auto& v) { cfg.ny = require_int<int>(k, v); }},
      {"nu_visc", [&](const auto& k, const auto& v) { cfg.nu_visc = require_double(k, v); }},
      {"oseen_tol", [&](const auto& k, const auto& v) { cfg.oseen_tol = require_double(k, v); }},
      {"oseen_max_iter", [&](const auto& k, const auto& v) { cfg.oseen_max_iter = require_int<int>(k, v); }},
      {"relaxation", [&](const auto& k, const auto& v) { cfg.relaxation = require_double(k, v); }},
      {"bias_force", [&](const auto& k, const auto& v) { cfg.bias_force = require_double(k, v); }},
      {"bias_iterations", [&](const auto& k, const auto& v) { cfg.bias_iterations = require_int<int>(k, v); }},
      {"warm_start", [&](const auto& k, const auto& v) { cfg.warm_start = require_bool(k, v); }},
      {"cache_root", [&](const auto&, const auto& v) { cfg.cache_root = v; }},
      {"output", [&](const auto&, const auto& v) { cfg.output = v; }},
  };
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string_view body = detail::trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key(detail::trim(body.substr(0, eq)));
    const std::string value(detail::trim(body.substr(eq + 1)));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (value.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty value for '" + key + "'");
    it->second(key, value);
  }
  cfg.validate();
  return cfg;
}

StudyConfig load_study_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file.string());
  return parse_study_config(in);
}

}  // namespace sparse_rom
