#include "sparse_rom/multiindex.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "sparse_rom/errors.hpp"

namespace sparse_rom {

MultiIndex::MultiIndex(std::initializer_list<int> exps) : exps_(exps) {
  if (std::any_of(exps_.begin(), exps_.end(), [](int e) { return e < 0; }))
    throw OutOfRangeError("multi-index entries must be non-negative");
}

MultiIndex::MultiIndex(std::vector<int> exps) : exps_(std::move(exps)) {
  if (std::any_of(exps_.begin(), exps_.end(), [](int e) { return e < 0; }))
    throw OutOfRangeError("multi-index entries must be non-negative");
}

int MultiIndex::total_degree() const noexcept {
  return std::accumulate(exps_.begin(), exps_.end(), 0);
}

MultiIndex MultiIndex::shifted(std::size_t j, int delta) const {
  std::vector<int> e = exps_;
  e.at(j) += delta;
  return MultiIndex(std::move(e));
}

bool MultiIndex::dominated_by(const MultiIndex& other) const {
  if (other.dim() != dim()) throw DimensionError("multi-index dimension mismatch");
  for (std::size_t j = 0; j < dim(); ++j)
    if (exps_[j] > other.exps_[j]) return false;
  return true;
}

std::string MultiIndex::to_string() const {
  std::string out;
  for (std::size_t j = 0; j < exps_.size(); ++j) {
    if (j) out += ',';
    out += std::to_string(exps_[j]);
  }
  return out;
}

MultiIndex MultiIndex::parse(const std::string& text) {
  std::vector<int> e;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(tok, &used);
      if (tok.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(tok);
      e.push_back(v);
    } catch (const std::logic_error&) {
      throw InvalidInputError("cannot parse multi-index '" + text + "'");
    }
  }
  if (e.empty()) throw InvalidInputError("empty multi-index");
  return MultiIndex(std::move(e));
}

std::size_t MultiIndexHash::operator()(const MultiIndex& m) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (int e : m.exponents()) {
    h ^= static_cast<std::size_t>(e) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

bool is_downward_closed(std::span<const MultiIndex> indices) {
  if (indices.empty()) return true;
  const std::size_t d = indices.front().dim();
  std::unordered_set<MultiIndex, MultiIndexHash> present;
  for (const auto& m : indices) {
    if (m.dim() != d) throw DimensionError("mixed multi-index dimensions");
    present.insert(m);
  }
  // Checking the immediate predecessors nu - e_j suffices by induction.
  for (const auto& m : indices) {
    for (std::size_t j = 0; j < d; ++j) {
      if (m[j] == 0) continue;
      if (!present.contains(m.shifted(j, -1))) return false;
    }
  }
  return true;
}

namespace {

void append_level(std::size_t d, int remaining, std::vector<int>& prefix,
                  std::vector<MultiIndex>& out, std::size_t count) {
  if (out.size() >= count) return;
  if (prefix.size() + 1 == d) {
    prefix.push_back(remaining);
    out.emplace_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    prefix.push_back(e);
    append_level(d, remaining - e, prefix, out, count);
    prefix.pop_back();
    if (out.size() >= count) return;
  }
}

}  // namespace

std::vector<MultiIndex> canonical_sequence(std::size_t d, std::size_t count) {
  if (d == 0) throw InvalidInputError("canonical_sequence: d must be >= 1");
  if (count == 0) throw InvalidInputError("canonical_sequence: count must be >= 1");
  std::vector<MultiIndex> out;
  out.reserve(count);
  std::vector<int> prefix;
  for (int level = 0; out.size() < count; ++level) append_level(d, level, prefix, out, count);
  return out;
}

DownwardClosedSet::DownwardClosedSet(std::vector<MultiIndex> ordered) {
  for (const auto& m : ordered) append(m);
}

long DownwardClosedSet::position(const MultiIndex& m) const {
  auto it = position_.find(m);
  return it == position_.end() ? -1 : static_cast<long>(it->second);
}

void DownwardClosedSet::append(const MultiIndex& m) {
  if (indices_.empty()) {
    if (m.dim() == 0) throw DimensionError("multi-index of dimension 0");
    dim_ = m.dim();
  } else if (m.dim() != dim_) {
    throw DimensionError("multi-index " + m.to_string() + " has dimension " +
                         std::to_string(m.dim()) + ", set has " + std::to_string(dim_));
  }
  if (contains(m)) throw InvalidSetError("duplicate multi-index " + m.to_string());
  for (std::size_t j = 0; j < dim_; ++j) {
    if (m[j] > 0 && !contains(m.shifted(j, -1)))
      throw InvalidSetError("adding " + m.to_string() + " breaks downward closedness");
  }
  position_.emplace(m, indices_.size());
  indices_.push_back(m);
}

int DownwardClosedSet::max_exponent(std::size_t j) const {
  int best = -1;
  for (const auto& m : indices_) best = std::max(best, m[j]);
  return best;
}

std::string DownwardClosedSet::serialize() const {
  std::string out;
  for (const auto& m : indices_) {
    out += m.to_string();
    out += '\n';
  }
  return out;
}

DownwardClosedSet DownwardClosedSet::deserialize(const std::string& text) {
  DownwardClosedSet set;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    set.append(MultiIndex::parse(line));
  }
  return set;
}

}  // namespace sparse_rom
