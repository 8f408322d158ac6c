#include "sparse_rom/interp.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "binary_io.hpp"
#include "sparse_rom/errors.hpp"

namespace sparse_rom {

double hierarchical_poly(std::size_t k, double y, const UnivariatePointRule& rule) {
  const double zk = rule.at(k);
  double h = 1.0;
  for (std::size_t j = 0; j < k; ++j) h *= (y - rule[j]) / (zk - rule[j]);
  return h;
}

double tensor_hierarchical(const MultiIndex& nu, std::span<const double> y, const TensorGrid& grid) {
  if (nu.dim() != grid.size() || y.size() != grid.size())
    throw DimensionError("tensor_hierarchical: dimension mismatch");
  double h = 1.0;
  for (std::size_t j = 0; j < grid.size(); ++j) h *= hierarchical_poly(static_cast<std::size_t>(nu[j]), y[j], grid[j]);
  return h;
}

SparseInterpolant SparseInterpolant::build(const DownwardClosedSet& indices, TensorGrid grid,
                                           const SnapshotMap& map) {
  if (indices.empty()) throw InvalidSetError("cannot build an interpolant on an empty index set");
  if (indices.dim() != grid.size() || map.dimension() != grid.size())
    throw DimensionError("index set, grid and snapshot map disagree on the parameter dimension");
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (indices.max_exponent(j) >= static_cast<int>(grid[j].size()))
      throw OutOfRangeError("point rule in direction " + std::to_string(j) + " too short for the index set");
  }
  SparseInterpolant out(std::move(grid), map.output_size());
  for (const auto& nu : indices) out.add_index(nu, map);
  return out;
}

SparseInterpolant SparseInterpolant::enrich(std::span<const MultiIndex> extra, const SnapshotMap& map) const {
  SparseInterpolant out = *this;
  out.extend(extra, map);
  return out;
}

void SparseInterpolant::extend(std::span<const MultiIndex> extra, const SnapshotMap& map) {
  if (map.dimension() != dimension()) throw DimensionError("snapshot map dimension mismatch");
  // Graded order is a linear extension, so any valid union can be appended.
  std::vector<MultiIndex> ordered(extra.begin(), extra.end());
  std::stable_sort(ordered.begin(), ordered.end(), [](const MultiIndex& a, const MultiIndex& b) {
    return a.total_degree() < b.total_degree();
  });
  DownwardClosedSet probe = indices_;
  for (const auto& nu : ordered) {
    probe.append(nu);
    const std::size_t j_bad = [&] {
      for (std::size_t j = 0; j < grid_.size(); ++j)
        if (nu[j] >= static_cast<int>(grid_[j].size())) return j;
      return grid_.size();
    }();
    if (j_bad != grid_.size())
      throw OutOfRangeError("point rule in direction " + std::to_string(j_bad) + " too short for " + nu.to_string());
  }
  for (const auto& nu : ordered) add_index(nu, map);
}

std::vector<std::vector<double>> SparseInterpolant::univariate_table(std::span<const double> y) const {
  std::vector<std::vector<double>> table(grid_.size());
  for (std::size_t j = 0; j < grid_.size(); ++j) {
    const int kmax = indices_.max_exponent(j);
    table[j].resize(static_cast<std::size_t>(std::max(kmax, 0)) + 1);
    for (int k = 0; k <= kmax; ++k) table[j][static_cast<std::size_t>(k)] = hierarchical_poly(static_cast<std::size_t>(k), y[j], grid_[j]);
  }
  return table;
}

void SparseInterpolant::add_index(const MultiIndex& nu, const SnapshotMap& map) {
  const auto z = tensor_point(nu, grid_);
  Eigen::VectorXd alpha = map.sample(nu, z);
  ++snapshot_count_;
  if (output_size_ == 0) output_size_ = static_cast<std::size_t>(alpha.size());
  if (static_cast<std::size_t>(alpha.size()) != output_size_)
    throw DimensionError("snapshot at " + nu.to_string() + " has length " + std::to_string(alpha.size()) +
                         ", expected " + std::to_string(output_size_));
  if (!indices_.empty()) {
    const auto table = univariate_table(z);
    for (std::size_t i = 0; i < indices_.size(); ++i) {
      double h = 1.0;
      for (std::size_t j = 0; j < grid_.size(); ++j) h *= table[j][static_cast<std::size_t>(indices_[i][j])];
      if (h != 0.0) alpha.noalias() -= h * coefficients_[i];
    }
  }
  indices_.append(nu);
  coefficients_.push_back(std::move(alpha));
}

Eigen::VectorXd SparseInterpolant::evaluate(std::span<const double> y) const {
  if (y.size() != dimension())
    throw DimensionError("evaluation point has dimension " + std::to_string(y.size()) + ", interpolant has " +
                         std::to_string(dimension()));
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(output_size_));
  const auto table = univariate_table(y);
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    double h = 1.0;
    for (std::size_t j = 0; j < grid_.size(); ++j) h *= table[j][static_cast<std::size_t>(indices_[i][j])];
    out.noalias() += h * coefficients_[i];
  }
  return out;
}

namespace {

std::string coefficient_file(const MultiIndex& nu) {
  std::string name = "coef";
  for (int e : nu.exponents()) name += "_" + std::to_string(e);
  return name + ".bin";
}

}  // namespace

void SparseInterpolant::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  std::ostringstream os;
  os.precision(17);
  os << "sparse_rom_interpolant 1\n";
  os << "dimension " << dimension() << "\n";
  os << "output_size " << output_size_ << "\n";
  for (std::size_t j = 0; j < grid_.size(); ++j) {
    const auto& r = grid_[j];
    os << "rule " << j << ' ' << to_string(r.kind) << ' ' << r.options.grid_resolution << ' ' << r.options.x1 << ' '
       << r.options.master_size << ' ' << r.size();
    for (double p : r.points) os << ' ' << p;
    os << "\n";
  }
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    os << "index " << indices_[i].to_string() << ' ' << coefficient_file(indices_[i]) << "\n";
    detail::write_f64_le(dir / coefficient_file(indices_[i]), coefficients_[i]);
  }
  detail::write_text_atomic(dir / "manifest.txt", os.str());
}

SparseInterpolant SparseInterpolant::load(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.txt");
  if (!in) throw InvalidInputError("no interpolant manifest in " + dir.string());
  std::string line, key;
  std::size_t d = 0, D = 0;
  TensorGrid grid;
  std::vector<MultiIndex> order;
  std::vector<std::string> files;
  std::getline(in, line);
  if (line != "sparse_rom_interpolant 1") throw InvalidInputError("unrecognized interpolant manifest");
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    ls >> key;
    if (key == "dimension") {
      ls >> d;
      grid.resize(d);
    } else if (key == "output_size") {
      ls >> D;
    } else if (key == "rule") {
      std::size_t j = 0, n = 0;
      std::string kind;
      ls >> j;
      if (j >= grid.size()) throw InvalidInputError("rule index out of range in manifest");
      auto& r = grid[j];
      ls >> kind >> r.options.grid_resolution >> r.options.x1 >> r.options.master_size >> n;
      r.kind = parse_point_rule_kind(kind);
      r.points.resize(n);
      for (auto& p : r.points) ls >> p;
      if (!ls) throw InvalidInputError("truncated rule line in manifest");
    } else if (key == "index") {
      std::string nu, file;
      ls >> nu >> file;
      order.push_back(MultiIndex::parse(nu));
      files.push_back(file);
    }
  }
  SparseInterpolant out(std::move(grid), D);
  for (std::size_t i = 0; i < order.size(); ++i) {
    Eigen::VectorXd c = detail::read_f64_le(dir / files[i]);
    if (static_cast<std::size_t>(c.size()) != D) throw DimensionError("coefficient file " + files[i] + " has wrong length");
    out.indices_.append(order[i]);
    out.coefficients_.push_back(std::move(c));
  }
  out.snapshot_count_ = order.size();
  return out;
}

}  // namespace sparse_rom
