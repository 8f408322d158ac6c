#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sparse_rom/multiindex.hpp"

namespace sparse_rom {

enum class PointRuleKind { Leja, SymmetrizedLeja, EquidistantLejaOrdered, EquidistantNatural };

std::string_view to_string(PointRuleKind kind);
/// Accepts "leja", "symmetrized_leja", "equidistant_leja", "equidistant_natural".
PointRuleKind parse_point_rule_kind(std::string_view name);

inline constexpr int kDefaultGridResolution = 100001;

/// Candidate y_i = (2i - R) / R, R = resolution - 1. Exactly symmetric about 0.
std::vector<double> candidate_grid(int resolution);

/// Greedy Leja sequence on the candidate grid starting from x1. Ties in the
/// log objective (within 1e-13) go to the larger candidate.
std::vector<double> leja_sequence(std::size_t n, double x1 = 0.0,
                                  int grid_resolution = kDefaultGridResolution);

/// 0, 1, -1, then grid maximizers for even positions and mirror images
/// x_N = -x_{N-1} for odd positions (1-based).
std::vector<double> symmetrized_leja(std::size_t n, int grid_resolution = kDefaultGridResolution);

/// Reorders a finite set by greedy maximization restricted to the set.
/// Starts from the point of largest magnitude (positive on ties).
std::vector<double> leja_order(std::span<const double> points);

/// m points from -1 to 1 inclusive, left to right.
std::vector<double> equidistant(std::size_t m);

struct PointRuleOptions {
  int grid_resolution = kDefaultGridResolution;
  double x1 = 0.0;
  /// Size of the frozen equidistant master set; 0 means "same as n".
  std::size_t master_size = 0;
};

/// A nested sequence of distinct interpolation nodes in [-1, 1].
struct UnivariatePointRule {
  PointRuleKind kind = PointRuleKind::Leja;
  std::vector<double> points;
  PointRuleOptions options;

  std::size_t size() const noexcept { return points.size(); }
  double operator[](std::size_t k) const { return points[k]; }
  /// Bounds-checked access; throws OutOfRangeError.
  double at(std::size_t k) const;

  /// e.g. "leja n=12 res=100001 x1=0 master=0"
  std::string descriptor() const;
};

UnivariatePointRule make_point_rule(PointRuleKind kind, std::size_t n,
                                    const PointRuleOptions& options = {});

/// One rule per parameter direction.
using TensorGrid = std::vector<UnivariatePointRule>;

/// z_nu: component j is entry nu_j of rule j.
std::vector<double> tensor_point(const MultiIndex& nu, const TensorGrid& grid);

}  // namespace sparse_rom
