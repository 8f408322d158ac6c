#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>

#include "sparse_rom/errors.hpp"
#include "sparse_rom/harness.hpp"
#include "sparse_rom/interp.hpp"
#include "text_util.hpp"

namespace sparse_rom {

double relative_l2_error(const Eigen::VectorXd& approx, const Eigen::VectorXd& reference, const Eigen::VectorXd& weights) {
  if (approx.size() != reference.size() || weights.size() != reference.size())
    throw DimensionError("relative_l2_error: lengths " + std::to_string(approx.size()) + ", " +
                         std::to_string(reference.size()) + ", " + std::to_string(weights.size()));
  const double den = reference.cwiseAbs2().dot(weights);
  if (!(den > 0.0)) throw DomainError("relative error undefined for a zero reference");
  return std::sqrt((approx - reference).cwiseAbs2().dot(weights) / den);
}

void write_error_csv_header(std::ostream& os) { os << "N,mean_rel_l2,max_rel_l2\n"; }

void write_error_csv_row(std::ostream& os, const ErrorRow& row) {
  os << row.N << ',' << detail::fmt_g17(row.mean_rel_l2) << ',' << detail::fmt_g17(row.max_rel_l2) << '\n';
}

namespace {

std::string rule_identity(PointRuleKind kind, const PointRuleOptions& opt, std::size_t n_max) {
  std::string s(to_string(kind));
  switch (kind) {
    case PointRuleKind::Leja: s += "/res=" + std::to_string(opt.grid_resolution) + "/x1=" + detail::fmt_g17(opt.x1); break;
    case PointRuleKind::SymmetrizedLeja: s += "/res=" + std::to_string(opt.grid_resolution); break;
    case PointRuleKind::EquidistantLejaOrdered:
    case PointRuleKind::EquidistantNatural:
      s += "/master=" + std::to_string(opt.master_size == 0 ? n_max : opt.master_size);
      break;
  }
  return s;
}

// Snapshot map, references and weights shared by every rule of a study.
class StudyContext {
 public:
  explicit StudyContext(const StudyConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    if (cfg_.model == StudyModel::Analytic) {
      base_ = std::make_unique<AnalyticMap>(cfg_.analytic, cfg_.analytic_dimension, cfg_.analytic_outputs,
                                            cfg_.analytic_wave_number);
      weights_ = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(base_->output_size()));
      identity_ = "analytic=" + std::string(to_string(cfg_.analytic)) + " d=" + std::to_string(cfg_.analytic_dimension) +
                  " D=" + std::to_string(cfg_.analytic_outputs) + " k=" + detail::fmt_g17(cfg_.analytic_wave_number);
      settings_ = "exact";
    } else {
      auto fom = std::make_unique<FomSnapshotMap>(cfg_.fom_problem());
      weights_ = fom->mass_weights();
      identity_ = fom->problem().identity();
      settings_ = fom->problem().settings();
      base_ = std::move(fom);
    }
    counter_ = std::make_unique<CountingMap>(*base_);
    test_points_ = cfg_.test_points();

    std::shared_ptr<SnapshotCache> ref_cache;
    if (!cfg_.cache_root.empty())
      ref_cache = std::make_shared<SnapshotCache>(cfg_.cache_root, identity_ + " test=" + cfg_.effective_test_grid(),
                                                  settings_, base_->output_size());
    CachedSnapshotMap refs(*counter_, ref_cache);
    references_.reserve(test_points_.size());
    for (std::size_t i = 0; i < test_points_.size(); ++i)
      references_.push_back(refs.sample_key("ref_" + std::to_string(i), test_points_[i]));
    reference_solves_ = counter_->calls();
  }

  StudyResult run(const std::vector<PointRuleKind>& rules, const std::filesystem::path& csv) {
    StudyConfig cfg = cfg_;
    cfg.rules = rules;
    const TensorGrid grid = cfg.tensor_grid();
    const std::size_t d = cfg.dimension();
    const auto sequence = canonical_sequence(d, cfg.n_max);

    if (!cfg.allow_test_overlap) check_disjoint(sequence, grid);

    std::string rule_id;
    for (std::size_t j = 0; j < grid.size(); ++j)
      rule_id += (j ? "," : "") + rule_identity(grid[j].kind, cfg.rule_options, cfg.n_max);
    std::shared_ptr<SnapshotCache> cache;
    if (!cfg.cache_root.empty())
      cache = std::make_shared<SnapshotCache>(cfg.cache_root, identity_ + " rules=" + rule_id, settings_, base_->output_size());
    CachedSnapshotMap snapshots(*counter_, cache);

    StudyResult result;
    result.rule = grid.front().kind;
    result.csv = csv;
    std::ofstream out;
    if (!csv.empty()) {
      if (csv.has_parent_path()) std::filesystem::create_directories(csv.parent_path());
      out.open(csv, std::ios::trunc);
      if (!out) throw ConfigError("cannot write " + csv.string());
      write_error_csv_header(out);
      out.flush();
    }

    const std::size_t before = counter_->calls();
    std::optional<SparseInterpolant> interp;
    for (std::size_t n = 1; n <= cfg.n_max; ++n) {
      const MultiIndex& nu = sequence[n - 1];
      if (!interp) {
        interp = SparseInterpolant::build(DownwardClosedSet({nu}), grid, snapshots);
      } else {
        interp->extend(std::span<const MultiIndex>(&nu, 1), snapshots);
      }
      ErrorRow row;
      row.N = n;
      for (std::size_t i = 0; i < test_points_.size(); ++i) {
        const double e = relative_l2_error(interp->evaluate(test_points_[i]), references_[i], weights_);
        row.mean_rel_l2 += e;
        row.max_rel_l2 = std::max(row.max_rel_l2, e);
      }
      row.mean_rel_l2 /= static_cast<double>(test_points_.size());
      result.rows.push_back(row);
      if (out.is_open()) {
        write_error_csv_row(out, row);
        out.flush();
      }
    }
    result.snapshot_solves = counter_->calls() - before;
    return result;
  }

  std::size_t reference_solves() const noexcept { return reference_solves_; }

 private:
  void check_disjoint(const std::vector<MultiIndex>& sequence, const TensorGrid& grid) const {
    constexpr double kCoincide = 1e-12;
    for (const auto& nu : sequence) {
      const auto z = tensor_point(nu, grid);
      for (const auto& t : test_points_) {
        bool same = true;
        for (std::size_t j = 0; same && j < z.size(); ++j) same = std::abs(z[j] - t[j]) <= kCoincide;
        if (same)
          throw ConfigError("test point (" + detail::join_g17(t) + ") coincides with interpolation node " + nu.to_string() +
                            "; set allow_test_overlap = true to permit this");
      }
    }
  }

  StudyConfig cfg_;
  std::unique_ptr<SnapshotMap> base_;
  std::unique_ptr<CountingMap> counter_;
  Eigen::VectorXd weights_;
  std::string identity_;
  std::string settings_;
  std::vector<std::vector<double>> test_points_;
  std::vector<Eigen::VectorXd> references_;
  std::size_t reference_solves_ = 0;
};

std::filesystem::path rule_output(const std::filesystem::path& output, PointRuleKind kind) {
  if (output.empty()) return {};
  const std::string ext = output.has_extension() ? output.extension().string() : std::string(".csv");
  return output.parent_path() / (output.stem().string() + "_" + std::string(to_string(kind)) + ext);
}

}  // namespace

StudyResult run_study(const StudyConfig& cfg) {
  StudyContext ctx(cfg);
  StudyResult r = ctx.run(cfg.rules, cfg.output);
  r.reference_solves = ctx.reference_solves();
  return r;
}

std::vector<StudyResult> compare_point_rules(const StudyConfig& cfg, std::span<const PointRuleKind> rules) {
  if (rules.empty()) throw ConfigError("compare_point_rules needs at least one rule");
  StudyContext ctx(cfg);
  std::vector<StudyResult> out;
  for (std::size_t k = 0; k < rules.size(); ++k) {
    StudyResult r = ctx.run({rules[k]}, rule_output(cfg.output, rules[k]));
    r.reference_solves = k == 0 ? ctx.reference_solves() : 0;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace sparse_rom
