#include "sparse_rom/points.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sparse_rom/errors.hpp"

namespace sparse_rom {

namespace {

// Log-domain tie tolerance for the greedy maximizations.
constexpr double kTieTolerance = 1e-13;

void check_resolution(int grid_resolution) {
  if (grid_resolution < 1000)
    throw InvalidInputError("grid resolution must be >= 1000, got " + std::to_string(grid_resolution));
}

// Running sum of log|y_i - x| over the chosen points, per candidate.
class LejaObjective {
 public:
  explicit LejaObjective(int resolution) : grid_(candidate_grid(resolution)), log_f_(grid_.size(), 0.0) {}

  void add_point(double x) {
    for (std::size_t i = 0; i < grid_.size(); ++i) log_f_[i] += std::log(std::abs(grid_[i] - x));
  }

  double argmax() const {
    double best = -std::numeric_limits<double>::infinity();
    for (double v : log_f_) best = std::max(best, v);
    if (!std::isfinite(best)) throw InvalidInputError("candidate grid exhausted");
    for (std::size_t i = grid_.size(); i-- > 0;) {
      if (log_f_[i] >= best - kTieTolerance) return grid_[i];
    }
    return grid_.back();  // unreachable
  }

 private:
  std::vector<double> grid_;
  std::vector<double> log_f_;
};

}  // namespace

std::string_view to_string(PointRuleKind kind) {
  switch (kind) {
    case PointRuleKind::Leja: return "leja";
    case PointRuleKind::SymmetrizedLeja: return "symmetrized_leja";
    case PointRuleKind::EquidistantLejaOrdered: return "equidistant_leja";
    case PointRuleKind::EquidistantNatural: return "equidistant_natural";
  }
  return "unknown";
}

PointRuleKind parse_point_rule_kind(std::string_view name) {
  for (auto k : {PointRuleKind::Leja, PointRuleKind::SymmetrizedLeja,
                 PointRuleKind::EquidistantLejaOrdered, PointRuleKind::EquidistantNatural}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidInputError("unknown point rule '" + std::string(name) + "'");
}

std::vector<double> candidate_grid(int resolution) {
  check_resolution(resolution);
  const long r = resolution - 1;
  std::vector<double> grid(static_cast<std::size_t>(resolution));
  for (long i = 0; i <= r; ++i) grid[static_cast<std::size_t>(i)] = static_cast<double>(2 * i - r) / static_cast<double>(r);
  return grid;
}

std::vector<double> leja_sequence(std::size_t n, double x1, int grid_resolution) {
  if (n < 1) throw InvalidInputError("leja_sequence: n must be >= 1");
  if (!(x1 >= -1.0 && x1 <= 1.0)) throw DomainError("leja_sequence: x1 outside [-1,1]");
  check_resolution(grid_resolution);
  if (n > static_cast<std::size_t>(grid_resolution))
    throw InvalidInputError("leja_sequence: more points requested than candidates");
  std::vector<double> pts{x1};
  if (n == 1) return pts;
  LejaObjective objective(grid_resolution);
  objective.add_point(x1);
  while (pts.size() < n) {
    const double x = objective.argmax();
    pts.push_back(x);
    objective.add_point(x);
  }
  return pts;
}

std::vector<double> symmetrized_leja(std::size_t n, int grid_resolution) {
  if (n < 1) throw InvalidInputError("symmetrized_leja: n must be >= 1");
  check_resolution(grid_resolution);
  if (n > static_cast<std::size_t>(grid_resolution))
    throw InvalidInputError("symmetrized_leja: more points requested than candidates");
  std::vector<double> pts{0.0, 1.0, -1.0};
  if (n <= 3) {
    pts.resize(n);
    return pts;
  }
  LejaObjective objective(grid_resolution);
  for (double x : pts) objective.add_point(x);
  while (pts.size() < n) {
    // pts.size() + 1 is the 1-based position being filled.
    const bool even_position = (pts.size() + 1) % 2 == 0;
    const double x = even_position ? objective.argmax() : -pts.back();
    pts.push_back(x);
    objective.add_point(x);
  }
  return pts;
}

std::vector<double> leja_order(std::span<const double> points) {
  if (points.empty()) throw InvalidInputError("leja_order: empty input");
  std::vector<double> remaining(points.begin(), points.end());
  for (double p : remaining) {
    if (!(p >= -1.0 && p <= 1.0)) throw InvalidInputError("leja_order: point outside [-1,1]");
  }
  {
    std::vector<double> sorted = remaining;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw InvalidInputError("leja_order: duplicate points");
  }

  std::vector<double> out;
  out.reserve(remaining.size());
  auto first = std::max_element(remaining.begin(), remaining.end(), [](double a, double b) {
    const double fa = std::abs(a), fb = std::abs(b);
    return fa < fb || (fa == fb && a < b);
  });
  out.push_back(*first);
  remaining.erase(first);

  std::vector<double> log_f(remaining.size(), 0.0);
  for (std::size_t i = 0; i < remaining.size(); ++i) log_f[i] = std::log(std::abs(remaining[i] - out.back()));
  while (!remaining.empty()) {
    double best = -std::numeric_limits<double>::infinity();
    for (double v : log_f) best = std::max(best, v);
    std::size_t pick = remaining.size();
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      if (log_f[i] >= best - kTieTolerance && (pick == remaining.size() || remaining[i] > remaining[pick])) pick = i;
    }
    const double x = remaining[pick];
    out.push_back(x);
    remaining.erase(remaining.begin() + static_cast<long>(pick));
    log_f.erase(log_f.begin() + static_cast<long>(pick));
    for (std::size_t i = 0; i < remaining.size(); ++i) log_f[i] += std::log(std::abs(remaining[i] - x));
  }
  return out;
}

std::vector<double> equidistant(std::size_t m) {
  if (m < 2) throw InvalidInputError("equidistant: m must be >= 2");
  const long r = static_cast<long>(m) - 1;
  std::vector<double> pts(m);
  for (long i = 0; i <= r; ++i) pts[static_cast<std::size_t>(i)] = static_cast<double>(2 * i - r) / static_cast<double>(r);
  return pts;
}

double UnivariatePointRule::at(std::size_t k) const {
  if (k >= points.size())
    throw OutOfRangeError("point rule '" + std::string(to_string(kind)) + "' has " +
                          std::to_string(points.size()) + " points, index " + std::to_string(k) + " requested");
  return points[k];
}

std::string UnivariatePointRule::descriptor() const {
  std::ostringstream os;
  os << to_string(kind) << " n=" << points.size() << " res=" << options.grid_resolution;
  os.precision(17);
  os << " x1=" << options.x1 << " master=" << options.master_size;
  return os.str();
}

UnivariatePointRule make_point_rule(PointRuleKind kind, std::size_t n, const PointRuleOptions& options) {
  if (n < 1) throw InvalidInputError("point rule needs at least one point");
  UnivariatePointRule rule;
  rule.kind = kind;
  rule.options = options;
  switch (kind) {
    case PointRuleKind::Leja:
      rule.points = leja_sequence(n, options.x1, options.grid_resolution);
      break;
    case PointRuleKind::SymmetrizedLeja:
      rule.points = symmetrized_leja(n, options.grid_resolution);
      break;
    case PointRuleKind::EquidistantLejaOrdered:
    case PointRuleKind::EquidistantNatural: {
      const std::size_t master = options.master_size == 0 ? std::max<std::size_t>(n, 2) : options.master_size;
      if (master < n) throw InvalidInputError("equidistant master set smaller than requested length");
      rule.options.master_size = master;
      auto base = equidistant(master);
      rule.points = kind == PointRuleKind::EquidistantNatural ? base : leja_order(base);
      rule.points.resize(n);
      break;
    }
  }
  return rule;
}

std::vector<double> tensor_point(const MultiIndex& nu, const TensorGrid& grid) {
  if (nu.dim() != grid.size())
    throw DimensionError("multi-index of dimension " + std::to_string(nu.dim()) + " for grid of dimension " +
                         std::to_string(grid.size()));
  std::vector<double> z(nu.dim());
  for (std::size_t j = 0; j < nu.dim(); ++j) z[j] = grid[j].at(static_cast<std::size_t>(nu[j]));
  return z;
}

}  // namespace sparse_rom
