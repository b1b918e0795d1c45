#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dytw/tree.hpp"

namespace dytw {

/// Nonnegative value per leaf; a function constant on finest-level cubes.
struct LeafFunction {
  std::vector<double> values;

  LeafFunction() = default;
  explicit LeafFunction(std::vector<double> v) : values(std::move(v)) {}
  LeafFunction(const DyadicTree& tree, double fill) : values(tree.leaf_count(), fill) {}

  double operator[](int leaf) const { return values[leaf]; }
  double& operator[](int leaf) { return values[leaf]; }
  int size() const { return static_cast<int>(values.size()); }
};

/// Nonnegative value per cube, in canonical cube order. Houses coefficient
/// families (lambda, a, b, c, multipliers) and derived per-cube quantities.
struct CubeFamily {
  std::vector<double> values;

  CubeFamily() = default;
  explicit CubeFamily(std::vector<double> v) : values(std::move(v)) {}
  CubeFamily(const DyadicTree& tree, double fill) : values(tree.cube_count(), fill) {}

  double operator[](CubeId q) const { return values[q]; }
  double& operator[](CubeId q) { return values[q]; }
  int size() const { return static_cast<int>(values.size()); }
};

/// Nonnegative mass per leaf; cube masses are subtree aggregates,
/// precomputed once (all types are immutable values after construction).
class Measure {
 public:
  Measure() = default;

  Measure(const DyadicTree& tree, std::vector<double> leaf_masses)
      : leaf_(std::move(leaf_masses)), cube_(tree.cube_count(), 0.0) {
    if (static_cast<int>(leaf_.size()) != tree.leaf_count())
      throw std::invalid_argument("measure: leaf mass list size mismatch");
    for (double m : leaf_) {
      if (!(m >= 0.0) || !std::isfinite(m))
        throw std::invalid_argument("measure: leaf masses must be finite and >= 0");
    }
    for (CubeId q = tree.cube_count() - 1; q >= 0; --q) {
      if (tree.is_leaf(q)) {
        cube_[q] = leaf_[q - tree.cube_at(tree.depth(), 0)];
      } else {
        double s = 0.0;
        for (int k = 0; k < tree.branching(); ++k) s += cube_[tree.child(q, k)];
        cube_[q] = s;
      }
    }
  }

  double leaf_mass(int leaf) const { return leaf_[leaf]; }
  double cube_mass(CubeId q) const { return cube_[q]; }
  double operator()(CubeId q) const { return cube_[q]; }
  double total() const { return cube_.empty() ? 0.0 : cube_[0]; }
  int leaf_count() const { return static_cast<int>(leaf_.size()); }
  const std::vector<double>& leaf_masses() const { return leaf_; }

 private:
  std::vector<double> leaf_;
  std::vector<double> cube_;
};

/// Mass of a cube: subtree sum of leaf masses.
inline double cube_mass(const Measure& mu, CubeId q) { return mu.cube_mass(q); }

/// The mu-average of f on a cube, with the usual convention 0/0 := 0.
inline double cube_average(const DyadicTree& tree, const LeafFunction& f, const Measure& mu,
                           CubeId q) {
  double m = mu.cube_mass(q);
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (int l = tree.leaf_begin(q); l < tree.leaf_end(q); ++l) s += f[l] * mu.leaf_mass(l);
  return s / m;
}

/// Per-cube subtree sums of a per-cube weight: out[q] = sum_{r subseteq q} w[r].
inline std::vector<double> subtree_sums(const DyadicTree& tree, const std::vector<double>& w) {
  assert(static_cast<int>(w.size()) == tree.cube_count());
  std::vector<double> out(w);
  for (CubeId q = tree.cube_count() - 1; q > 0; --q) out[tree.parent(q)] += out[q];
  return out;
}

/// Per-leaf sums over ancestors: out[l] = sum_{q supseteq l} c[q].
/// Single root-to-leaf prefix pass.
inline std::vector<double> ancestor_sums(const DyadicTree& tree, const std::vector<double>& c) {
  assert(static_cast<int>(c.size()) == tree.cube_count());
  std::vector<double> acc(c);
  for (CubeId q = 1; q < tree.cube_count(); ++q) acc[q] += acc[tree.parent(q)];
  int first_leaf = tree.cube_at(tree.depth(), 0);
  return std::vector<double>(acc.begin() + first_leaf, acc.end());
}

/// Per-leaf maxima over ancestors: out[l] = max_{q supseteq l} c[q].
inline std::vector<double> ancestor_maxima(const DyadicTree& tree, const std::vector<double>& c) {
  assert(static_cast<int>(c.size()) == tree.cube_count());
  std::vector<double> acc(c);
  for (CubeId q = 1; q < tree.cube_count(); ++q) acc[q] = std::max(acc[q], acc[tree.parent(q)]);
  int first_leaf = tree.cube_at(tree.depth(), 0);
  return std::vector<double>(acc.begin() + first_leaf, acc.end());
}

/// A fractional assignment of pairwise disjoint sets E_Q <= Q: for each cube,
/// the portion of each covered leaf's mass allotted to E_Q.
struct DisjointFamily {
  /// fractions[q]: (leaf, fraction in [0,1]) pairs, leaves inside cube q only.
  std::vector<std::vector<std::pair<int, double>>> fractions;

  DisjointFamily() = default;
  explicit DisjointFamily(const DyadicTree& tree) : fractions(tree.cube_count()) {}

  /// mu(E_Q) from the fractional leaf masses.
  double set_mass(const Measure& mu, CubeId q) const {
    double s = 0.0;
    for (auto& [leaf, frac] : fractions[q]) s += frac * mu.leaf_mass(leaf);
    return s;
  }

  /// Checks containment, fraction range, and pairwise disjointness
  /// (sum of fractions per leaf <= 1 + tol). Throws on violation.
  void validate(const DyadicTree& tree, double tol = 1e-12) const {
    if (static_cast<int>(fractions.size()) != tree.cube_count())
      throw std::invalid_argument("disjoint family: cube count mismatch");
    std::vector<double> used(tree.leaf_count(), 0.0);
    for (CubeId q = 0; q < tree.cube_count(); ++q) {
      for (auto& [leaf, frac] : fractions[q]) {
        if (leaf < tree.leaf_begin(q) || leaf >= tree.leaf_end(q))
          throw std::invalid_argument("disjoint family: leaf outside its cube");
        if (!(frac >= 0.0 && frac <= 1.0 + tol))
          throw std::invalid_argument("disjoint family: fraction outside [0,1]");
        used[leaf] += frac;
      }
    }
    for (double u : used)
      if (u > 1.0 + tol) throw std::invalid_argument("disjoint family: leaf oversubscribed");
  }
};

/// A nonempty subset of the tree's cubes, kept sorted in canonical order.
struct CubeCollection {
  std::vector<CubeId> cubes;

  CubeCollection() = default;
  explicit CubeCollection(std::vector<CubeId> qs) : cubes(std::move(qs)) {
    std::sort(cubes.begin(), cubes.end());
    cubes.erase(std::unique(cubes.begin(), cubes.end()), cubes.end());
  }

  bool contains(CubeId q) const { return std::binary_search(cubes.begin(), cubes.end(), q); }
  bool empty() const { return cubes.empty(); }
};

}  // namespace dytw
