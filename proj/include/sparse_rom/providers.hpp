#pragma once

#include <Eigen/Core>

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sparse_rom/fom.hpp"
#include "sparse_rom/interp.hpp"
#include "sparse_rom/multiindex.hpp"

namespace sparse_rom {

/// Affine bijection [-1,1]^d -> prod_j [a_j, b_j].
class AffineParameterMap {
 public:
  AffineParameterMap() = default;
  /// Throws InvalidInputError unless a_j < b_j for every direction.
  explicit AffineParameterMap(std::vector<std::pair<double, double>> intervals);

  std::size_t dimension() const noexcept { return intervals_.size(); }
  const std::vector<std::pair<double, double>>& intervals() const noexcept { return intervals_; }

  /// a_j + (y_j + 1)(b_j - a_j)/2. Throws DomainError outside [-1,1]^d.
  std::vector<double> to_physical(std::span<const double> y) const;
  /// Inverse map. Throws DomainError outside the box.
  std::vector<double> to_reference(std::span<const double> p) const;

 private:
  std::vector<std::pair<double, double>> intervals_;
};

std::vector<double> map_to_physical(std::span<const double> y, const AffineParameterMap& map);

enum class AnalyticKind {
  Runge,      // 1 / (1 + 25 y^2), d = 1, D = 1
  TensorExp,  // exp(sum_j y_j / 2), D = 1
  SineField   // sin(k pi (x_i + sum_j y_j / d)) at x_i = i / (D - 1)
};

std::string_view to_string(AnalyticKind kind);
/// Accepts "runge", "tensor_exp", "sine". Throws InvalidInputError otherwise.
AnalyticKind parse_analytic_kind(std::string_view name);

/// Closed-form test maps for validating the interpolant without a FOM.
class AnalyticMap : public SnapshotMap {
 public:
  /// Throws DimensionError for Runge with d != 1 or SineField with D < 2.
  AnalyticMap(AnalyticKind kind, std::size_t dimension, std::size_t output_size = 1, double wave_number = 1.0);

  AnalyticKind kind() const noexcept { return kind_; }
  std::size_t dimension() const override { return dimension_; }
  std::size_t output_size() const override { return output_size_; }
  Eigen::VectorXd evaluate(std::span<const double> y) const override;

  std::size_t evaluations() const noexcept { return evaluations_.load(); }

 private:
  AnalyticKind kind_;
  std::size_t dimension_;
  std::size_t output_size_;
  double wave_number_;
  mutable std::atomic<std::size_t> evaluations_{0};
};

/// Single-point evaluation of an analytic map (D = 1 for Runge/TensorExp).
Eigen::VectorXd analytic_snapshot(AnalyticKind kind, std::span<const double> y, std::size_t output_size = 1);

/// Parametrized flow problem: geometry model, resolution, solver settings and
/// the physical parameter box.
///   narrowing: y_1 -> gap width mu, viscosity fixed at flow.nu_visc
///   curved:    y_1 -> viscosity, y_2 -> curvature
struct FomProblem {
  GeometryModel model = GeometryModel::NarrowingWidth;
  int nx = 48;
  int ny = 24;
  FlowConfig flow;
  AffineParameterMap parameters;
  /// Start each solve from the nearest previously solved parameter.
  bool warm_start = false;

  static FomProblem narrowing(int nx = 48, int ny = 24);
  static FomProblem curved(int nx = 64, int ny = 24);

  std::size_t dimension() const noexcept { return parameters.dimension(); }
  /// Geometry and flow setup for one physical parameter vector.
  std::pair<GeometrySpec, FlowConfig> instantiate(std::span<const double> physical) const;
  /// Geometry at the reference parameter, used for mass weights.
  GeometrySpec reference_geometry() const;
  /// Geometry and resolution: the part that fixes the dof layout.
  std::string identity() const;
  /// Solver settings that change converged values.
  std::string settings() const;

  void validate() const;
};

/// y -> pullback of the converged Oseen velocity.
class FomSnapshotMap : public SnapshotMap {
 public:
  explicit FomSnapshotMap(FomProblem problem);

  const FomProblem& problem() const noexcept { return problem_; }
  std::size_t dimension() const override { return problem_.dimension(); }
  std::size_t output_size() const override { return dofs_; }
  Eigen::VectorXd evaluate(std::span<const double> y) const override;

  /// Full solve at y; errors carry the physical parameter in the message.
  OseenResult solve(std::span<const double> y) const;

  const Mesh& reference_mesh() const noexcept { return *reference_mesh_; }
  /// Lumped velocity mass of the reference mesh.
  const Eigen::VectorXd& mass_weights() const noexcept { return mass_; }

  std::size_t solve_count() const noexcept { return solves_.load(); }
  std::size_t oseen_iterations() const noexcept { return iterations_.load(); }

 private:
  FomProblem problem_;
  std::shared_ptr<const Mesh> reference_mesh_;
  Eigen::VectorXd mass_;
  std::size_t dofs_ = 0;
  mutable std::atomic<std::size_t> solves_{0};
  mutable std::atomic<std::size_t> iterations_{0};
  mutable std::mutex warm_mutex_;
  mutable std::vector<std::pair<std::vector<double>, Eigen::VectorXd>> solved_;
};

/// 64-bit FNV-1a of text as 16 hex digits.
std::string fingerprint_of(std::string_view text);

/// On-disk snapshot store:
///   <root>/<fingerprint>/manifest.txt
///   <root>/<fingerprint>/snap_<nu_1>_<nu_2>....bin
/// The fingerprint hashes `identity`; `settings` is recorded in the manifest
/// and a mismatch on reopening raises StaleCacheError.
class SnapshotCache {
 public:
  SnapshotCache(std::filesystem::path root, std::string identity, std::string settings, std::size_t output_size);

  const std::string& fingerprint() const noexcept { return fingerprint_; }
  const std::filesystem::path& directory() const noexcept { return dir_; }
  std::size_t output_size() const noexcept { return output_size_; }

  /// Absent when not stored. StaleCacheError if `y` is given and differs
  /// from the recorded parameter.
  std::optional<Eigen::VectorXd> get(const MultiIndex& nu, std::span<const double> y = {}) const;
  /// DimensionError on a wrong vector length.
  void put(const MultiIndex& nu, const Eigen::VectorXd& v, std::span<const double> y = {});

  /// Same as above for arbitrary file stems (e.g. "ref_12").
  std::optional<Eigen::VectorXd> get(const std::string& key, std::span<const double> y = {}) const;
  void put(const std::string& key, const Eigen::VectorXd& v, std::span<const double> y = {});

  std::size_t size() const;

  static std::string key_of(const MultiIndex& nu);

 private:
  void write_manifest() const;

  std::filesystem::path dir_;
  std::string fingerprint_;
  std::string identity_;
  std::string settings_;
  std::size_t output_size_;
  mutable std::mutex mutex_;
  std::map<std::string, std::vector<double>> entries_;
};

/// Looks snapshots up by multi-index before falling back to the wrapped map.
/// Each key is computed at most once per instance.
class CachedSnapshotMap : public SnapshotMap {
 public:
  CachedSnapshotMap(const SnapshotMap& inner, std::shared_ptr<SnapshotCache> cache);

  std::size_t dimension() const override { return inner_.dimension(); }
  std::size_t output_size() const override { return inner_.output_size(); }
  Eigen::VectorXd evaluate(std::span<const double> y) const override { return inner_.evaluate(y); }
  Eigen::VectorXd sample(const MultiIndex& nu, std::span<const double> y) const override;
  /// Keyed lookup for points that are not interpolation nodes.
  Eigen::VectorXd sample_key(const std::string& key, std::span<const double> y) const;

  std::size_t hits() const noexcept { return hits_.load(); }
  std::size_t misses() const noexcept { return misses_.load(); }

 private:
  const SnapshotMap& inner_;
  std::shared_ptr<SnapshotCache> cache_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, std::shared_future<Eigen::VectorXd>> inflight_;
  mutable std::atomic<std::size_t> hits_{0};
  mutable std::atomic<std::size_t> misses_{0};
};

/// Counts calls to the wrapped map.
class CountingMap : public SnapshotMap {
 public:
  explicit CountingMap(const SnapshotMap& inner) : inner_(inner) {}
  std::size_t dimension() const override { return inner_.dimension(); }
  std::size_t output_size() const override { return inner_.output_size(); }
  Eigen::VectorXd evaluate(std::span<const double> y) const override {
    ++calls_;
    return inner_.evaluate(y);
  }
  std::size_t calls() const noexcept { return calls_.load(); }

 private:
  const SnapshotMap& inner_;
  mutable std::atomic<std::size_t> calls_{0};
};

}  // namespace sparse_rom
