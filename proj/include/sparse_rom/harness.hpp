#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sparse_rom/points.hpp"
#include "sparse_rom/providers.hpp"

namespace sparse_rom {

enum class StudyModel { Narrowing, Curved, Analytic };

std::string_view to_string(StudyModel model);
/// Accepts "narrowing", "curved", "analytic". Throws ConfigError otherwise.
StudyModel parse_study_model(std::string_view name);

/// Convergence study description. Unset optional fields fall back to the
/// model defaults.
struct StudyConfig {
  StudyModel model = StudyModel::Narrowing;

  AnalyticKind analytic = AnalyticKind::Runge;
  std::size_t analytic_dimension = 1;
  std::size_t analytic_outputs = 1;
  double analytic_wave_number = 1.0;

  /// One rule for every direction, or one per direction.
  std::vector<PointRuleKind> rules{PointRuleKind::Leja};
  /// Rules run by compare_point_rules.
  std::vector<PointRuleKind> compare_rules{PointRuleKind::Leja, PointRuleKind::SymmetrizedLeja,
                                           PointRuleKind::EquidistantLejaOrdered};
  PointRuleOptions rule_options;

  std::size_t n_max = 25;
  /// "midpoint:40", "midpoint:12x6", "uniform:9", "random:1000:7".
  std::string test_grid;
  bool allow_test_overlap = false;

  int nx = 0;
  int ny = 0;
  std::optional<double> nu_visc;
  std::optional<double> oseen_tol;
  std::optional<int> oseen_max_iter;
  std::optional<double> relaxation;
  std::optional<double> bias_force;
  std::optional<int> bias_iterations;
  bool warm_start = false;

  std::filesystem::path cache_root;
  std::filesystem::path output;

  std::size_t dimension() const;
  /// Test grid text after defaults.
  std::string effective_test_grid() const;
  std::vector<std::vector<double>> test_points() const;
  /// Flow problem after defaults and overrides. ConfigError for analytic studies.
  FomProblem fom_problem() const;
  /// Per-direction point rule kinds.
  std::vector<PointRuleKind> direction_rules() const;
  TensorGrid tensor_grid() const;

  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

/// Flat "key = value" text; '#' starts a comment. Throws ConfigError on
/// unknown keys or malformed values.
StudyConfig parse_study_config(std::istream& in);
StudyConfig load_study_config(const std::filesystem::path& file);

/// Test points in [-1,1]^d from a grid description.
std::vector<std::vector<double>> make_test_grid(std::string_view description, std::size_t dimension);

struct ErrorRow {
  std::size_t N = 0;
  double mean_rel_l2 = 0.0;
  double max_rel_l2 = 0.0;
};

/// ||approx - reference||_w / ||reference||_w with diagonal weights w.
/// Throws DimensionError on length mismatch, DomainError on a zero reference.
double relative_l2_error(const Eigen::VectorXd& approx, const Eigen::VectorXd& reference, const Eigen::VectorXd& weights);

struct StudyResult {
  PointRuleKind rule = PointRuleKind::Leja;
  std::vector<ErrorRow> rows;
  std::filesystem::path csv;
  /// Underlying snapshot-map invocations (FOM solves for flow models).
  std::size_t snapshot_solves = 0;
  std::size_t reference_solves = 0;
  std::size_t total_solves() const noexcept { return snapshot_solves + reference_solves; }
};

/// CSV with header N,mean_rel_l2,max_rel_l2.
void write_error_csv_header(std::ostream& os);
void write_error_csv_row(std::ostream& os, const ErrorRow& row);

/// Enriches along the canonical sequence for N = 1..n_max and records the
/// errors over the test grid. Rows are flushed to cfg.output as they appear.
StudyResult run_study(const StudyConfig& cfg);

/// One study per rule (applied to every direction) sharing the test grid,
/// the references and the snapshot map. Writes <stem>_<rule>.csv next to
/// cfg.output when it is set.
std::vector<StudyResult> compare_point_rules(const StudyConfig& cfg, std::span<const PointRuleKind> rules);

}  // namespace sparse_rom
