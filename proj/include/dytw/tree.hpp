#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dytw {

/// Cube identifier: position in the canonical (breadth-first, then child
/// index) order. The root is cube 0; leaves occupy the last level.
using CubeId = int;

/// A complete tree of dyadic cubes: dimension d, branching 2^d, depth D.
/// Every quantity downstream is indexed either by cube (canonical order)
/// or by leaf (level-D cubes, left to right).
class DyadicTree {
 public:
  DyadicTree(int dimension, int depth, std::int64_t cubes, std::int64_t leaves)
      : dimension_(dimension),
        depth_(depth),
        branching_(1 << dimension),
        cube_count_(static_cast<int>(cubes)),
        leaf_count_(static_cast<int>(leaves)),
        level_offset_(depth + 2, 0) {
    std::int64_t width = 1;
    for (int j = 0; j <= depth_; ++j) {
      level_offset_[j + 1] = level_offset_[j] + width;
      width *= branching_;
    }
  }

  int dimension() const { return dimension_; }
  int depth() const { return depth_; }
  int branching() const { return branching_; }
  int cube_count() const { return cube_count_; }
  int leaf_count() const { return leaf_count_; }

  int level(CubeId q) const {
    assert(q >= 0 && q < cube_count_);
    int j = 0;
    while (level_offset_[j + 1] <= q) ++j;
    return j;
  }

  std::int64_t index_in_level(CubeId q) const { return q - level_offset_[level(q)]; }

  CubeId cube_at(int level, std::int64_t index) const {
    assert(level >= 0 && level <= depth_);
    return static_cast<CubeId>(level_offset_[level] + index);
  }

  bool is_root(CubeId q) const { return q == 0; }
  bool is_leaf(CubeId q) const { return q >= level_offset_[depth_]; }

  CubeId parent(CubeId q) const {
    assert(!is_root(q));
    int j = level(q);
    return cube_at(j - 1, index_in_level(q) >> dimension_);
  }

  CubeId child(CubeId q, int k) const {
    assert(!is_leaf(q) && k >= 0 && k < branching_);
    int j = level(q);
    return cube_at(j + 1, index_in_level(q) * branching_ + k);
  }

  /// Leaves covered by cube q: indices in [leaf_begin(q), leaf_end(q)).
  int leaf_begin(CubeId q) const {
    int j = level(q);
    return static_cast<int>(index_in_level(q) << (dimension_ * (depth_ - j)));
  }
  int leaf_end(CubeId q) const {
    int j = level(q);
    return static_cast<int>((index_in_level(q) + 1) << (dimension_ * (depth_ - j)));
  }

  CubeId leaf_cube(int leaf) const { return cube_at(depth_, leaf); }

  CubeId ancestor_at_level(int leaf, int level) const {
    assert(level >= 0 && level <= depth_);
    return cube_at(level, static_cast<std::int64_t>(leaf) >> (dimension_ * (depth_ - level)));
  }

  /// Geometric volume relative to the root cube: 2^{-d * level}.
  double volume(CubeId q) const { return std::pow(2.0, -dimension_ * level(q)); }

  /// Path string "level:index", the cube key used in instance files.
  std::string path(CubeId q) const {
    return std::to_string(level(q)) + ":" + std::to_string(index_in_level(q));
  }

  /// Inverse of path(); throws on malformed or out-of-range keys.
  CubeId cube_from_path(const std::string& s) const {
    auto colon = s.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("cube path must be 'level:index': " + s);
    int j = std::stoi(s.substr(0, colon));
    std::int64_t i = std::stoll(s.substr(colon + 1));
    if (j < 0 || j > depth_ || i < 0 || i >= level_offset_[j + 1] - level_offset_[j])
      throw std::invalid_argument("cube path out of range: " + s);
    return cube_at(j, i);
  }

 private:
  int dimension_;
  int depth_;
  int branching_;
  int cube_count_;
  int leaf_count_;
  std::vector<std::int64_t> level_offset_;
};

inline constexpr std::int64_t kDefaultLeafCap = std::int64_t{1} << 22;

/// Builds the complete tree of the given dimension and depth.
/// Throws std::invalid_argument when parameters are out of range or the
/// leaf count exceeds the cap.
inline DyadicTree build_tree(int dimension, int depth, std::int64_t leaf_cap = kDefaultLeafCap) {
  if (dimension < 1) throw std::invalid_argument("dimension must be >= 1");
  if (depth < 0) throw std::invalid_argument("depth must be >= 0");
  if (dimension * depth >= 62) throw std::invalid_argument("instance too large: 2^(d*D) leaves");
  std::int64_t leaves = std::int64_t{1} << (dimension * depth);
  if (leaves > leaf_cap) throw std::invalid_argument("instance too large: leaf count exceeds cap");
  std::int64_t cubes = 0, width = 1;
  for (int j = 0; j <= depth; ++j) {
    cubes += width;
    width <<= dimension;
  }
  return DyadicTree(dimension, depth, cubes, leaves);
}

}  // namespace dytw
