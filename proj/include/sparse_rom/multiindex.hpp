#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace sparse_rom {

/// Exponent tuple of fixed dimension d. Entries are non-negative degrees.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t d) : exps_(d, 0) {}
  MultiIndex(std::initializer_list<int> exps);
  explicit MultiIndex(std::vector<int> exps);

  std::size_t dim() const noexcept { return exps_.size(); }
  int operator[](std::size_t j) const { return exps_[j]; }
  std::span<const int> exponents() const noexcept { return exps_; }
  int total_degree() const noexcept;

  /// Copy with entry j shifted by delta. Throws OutOfRangeError if negative.
  MultiIndex shifted(std::size_t j, int delta) const;

  /// Componentwise <=.
  bool dominated_by(const MultiIndex& other) const;

  /// "1,0,2"
  std::string to_string() const;
  static MultiIndex parse(const std::string& text);

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> exps_;
};

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& m) const noexcept;
};

/// True iff every componentwise-smaller index of every member is present.
/// Throws DimensionError on mixed dimensions.
bool is_downward_closed(std::span<const MultiIndex> indices);

/// First `count` indices graded by total degree; inside a level the tuples
/// are in descending lexicographic order, so d=2 reads
/// (0,0),(1,0),(0,1),(2,0),(1,1),(0,2),...
std::vector<MultiIndex> canonical_sequence(std::size_t d, std::size_t count);

/// Ordered downward-closed index set. Every prefix is itself downward closed.
class DownwardClosedSet {
 public:
  DownwardClosedSet() = default;
  /// Throws InvalidSetError if some prefix is not downward closed or an index
  /// repeats, DimensionError on mixed dimensions.
  explicit DownwardClosedSet(std::vector<MultiIndex> ordered);

  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  std::size_t dim() const noexcept { return dim_; }
  const MultiIndex& operator[](std::size_t i) const { return indices_[i]; }
  const std::vector<MultiIndex>& indices() const noexcept { return indices_; }
  auto begin() const noexcept { return indices_.begin(); }
  auto end() const noexcept { return indices_.end(); }

  bool contains(const MultiIndex& m) const { return position_.contains(m); }
  /// Position in the stored order, or -1.
  long position(const MultiIndex& m) const;

  /// Appends while keeping every prefix downward closed.
  void append(const MultiIndex& m);

  /// Largest exponent used in direction j (-1 when empty).
  int max_exponent(std::size_t j) const;

  /// One index per line, comma-separated exponents.
  std::string serialize() const;
  static DownwardClosedSet deserialize(const std::string& text);

 private:
  std::vector<MultiIndex> indices_;
  std::unordered_map<MultiIndex, std::size_t, MultiIndexHash> position_;
  std::size_t dim_ = 0;
};

}  // namespace sparse_rom
