#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "sparse_rom/multiindex.hpp"
#include "sparse_rom/points.hpp"

namespace sparse_rom {

/// Parameter-to-snapshot map y in [-1,1]^d -> R^D. Implementations must be
/// deterministic.
class SnapshotMap {
 public:
  virtual ~SnapshotMap() = default;
  virtual std::size_t dimension() const = 0;
  virtual std::size_t output_size() const = 0;
  virtual Eigen::VectorXd evaluate(std::span<const double> y) const = 0;
  /// Entry point used by the interpolant builders; keyed implementations
  /// (caches) override this to look snapshots up by multi-index.
  virtual Eigen::VectorXd sample(const MultiIndex& nu, std::span<const double> y) const {
    (void)nu;
    return evaluate(y);
  }
};

/// h_k(y) = prod_{j<k} (y - z_j) / (z_k - z_j), h_0 = 1.
double hierarchical_poly(std::size_t k, double y, const UnivariatePointRule& rule);

/// H_nu(y) = prod_j h_{nu_j}(y_j).
double tensor_hierarchical(const MultiIndex& nu, std::span<const double> y, const TensorGrid& grid);

/// Sparse interpolant I_Lambda in hierarchical surplus form:
/// I_Lambda g = sum_nu alpha_nu H_nu.
class SparseInterpolant {
 public:
  /// Processes `indices` in order; exactly one map.sample call per index.
  static SparseInterpolant build(const DownwardClosedSet& indices, TensorGrid grid, const SnapshotMap& map);

  /// Returns a copy extended by `extra` (in order). Existing coefficients are
  /// copied untouched; one map.sample call per new index.
  SparseInterpolant enrich(std::span<const MultiIndex> extra, const SnapshotMap& map) const;
  /// In-place variant of enrich.
  void extend(std::span<const MultiIndex> extra, const SnapshotMap& map);

  Eigen::VectorXd evaluate(std::span<const double> y) const;

  const DownwardClosedSet& index_set() const noexcept { return indices_; }
  const TensorGrid& grid() const noexcept { return grid_; }
  const std::vector<Eigen::VectorXd>& coefficients() const noexcept { return coefficients_; }
  std::size_t snapshot_count() const noexcept { return snapshot_count_; }
  std::size_t dimension() const noexcept { return grid_.size(); }
  std::size_t output_size() const noexcept { return output_size_; }

  /// Directory with manifest.txt and one little-endian float64 file per index.
  void save(const std::filesystem::path& dir) const;
  static SparseInterpolant load(const std::filesystem::path& dir);

 private:
  SparseInterpolant(TensorGrid grid, std::size_t output_size)
      : grid_(std::move(grid)), output_size_(output_size) {}

  void add_index(const MultiIndex& nu, const SnapshotMap& map);
  // h_k(y_j) for k = 0..max exponent in direction j.
  std::vector<std::vector<double>> univariate_table(std::span<const double> y) const;

  DownwardClosedSet indices_;
  TensorGrid grid_;
  std::vector<Eigen::VectorXd> coefficients_;
  std::size_t output_size_ = 0;
  std::size_t snapshot_count_ = 0;
};

}  // namespace sparse_rom
