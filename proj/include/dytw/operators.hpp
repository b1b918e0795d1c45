#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dytw/measure.hpp"
#include "dytw/numeric.hpp"
#include "dytw/tree.hpp"

namespace dytw {

/// Per-cube averages <f>^sigma_Q, zero on zero-mass cubes.
inline std::vector<double> all_cube_averages(const DyadicTree& tree, const LeafFunction& f,
                                             const Measure& sigma) {
  std::vector<double> weighted(tree.cube_count(), 0.0);
  int first_leaf = tree.cube_at(tree.depth(), 0);
  for (int l = 0; l < tree.leaf_count(); ++l)
    weighted[first_leaf + l] = f[l] * sigma.leaf_mass(l);
  for (CubeId q = tree.cube_count() - 1; q > 0; --q) weighted[tree.parent(q)] += weighted[q];
  for (CubeId q = 0; q < tree.cube_count(); ++q)
    weighted[q] = sigma(q) == 0.0 ? 0.0 : weighted[q] / sigma(q);
  return weighted;
}

/// T_lambda(f sigma) = sum_Q lambda_Q <f>^sigma_Q 1_Q, evaluated leafwise
/// by a single root-to-leaf prefix pass.
inline LeafFunction apply_summation(const DyadicTree& tree, const CubeFamily& lambda,
                                    const Measure& sigma, const LeafFunction& f) {
  std::vector<double> terms = all_cube_averages(tree, f, sigma);
  for (CubeId q = 0; q < tree.cube_count(); ++q) terms[q] *= lambda[q];
  return LeafFunction(ancestor_sums(tree, terms));
}

/// M_lambda(f sigma) together with the attaining cube per leaf.
/// Tie-break: deepest cube, then canonical order (the ancestors of a leaf
/// form a chain, so depth alone settles it). Leaves where every term is
/// zero keep value 0 with the leaf cube as selection.
struct MaximalApply {
  LeafFunction values;
  std::vector<CubeId> argmax;
};

inline MaximalApply apply_maximal(const DyadicTree& tree, const CubeFamily& lambda,
                                  const Measure& sigma, const LeafFunction& f) {
  std::vector<double> terms = all_cube_averages(tree, f, sigma);
  for (CubeId q = 0; q < tree.cube_count(); ++q) terms[q] *= lambda[q];
  MaximalApply out;
  out.values.values.resize(tree.leaf_count());
  out.argmax.resize(tree.leaf_count());
  std::vector<double> best(terms);
  std::vector<CubeId> arg(tree.cube_count());
  for (CubeId q = 0; q < tree.cube_count(); ++q) arg[q] = q;
  for (CubeId q = 1; q < tree.cube_count(); ++q) {
    CubeId par = tree.parent(q);
    if (best[par] > best[q]) {
      best[q] = best[par];
      arg[q] = arg[par];
    }
  }
  int first_leaf = tree.cube_at(tree.depth(), 0);
  for (int l = 0; l < tree.leaf_count(); ++l) {
    out.values[l] = best[first_leaf + l];
    out.argmax[l] = arg[first_leaf + l];
  }
  return out;
}

/// The dyadic Hardy-Littlewood maximal function M^mu(f) = sup_Q <f>^mu_Q 1_Q.
inline LeafFunction hl_maximal(const DyadicTree& tree, const LeafFunction& f, const Measure& mu) {
  return apply_maximal(tree, CubeFamily(tree, 1.0), mu, f).values;
}

/// Lebesgue norm ||f||_{L^p(mu)}; p = inf takes the essential supremum
/// (zero-mass leaves ignored).
inline double lebesgue_norm(const DyadicTree& tree, const LeafFunction& f, double p,
                            const Measure& mu) {
  (void)tree;
  if (!(p > 0.0)) throw std::invalid_argument("lebesgue_norm: p must be positive or inf");
  if (std::isinf(p)) {
    double m = 0.0;
    for (int l = 0; l < f.size(); ++l)
      if (mu.leaf_mass(l) > 0.0) m = std::max(m, f[l]);
    return m;
  }
  return integral_power(f.values, mu.leaf_masses(), p, 1.0 / p);
}

/// Dyadic Riesz coefficients lambda_Q = sigma(Q) |Q|^{alpha/d - 1} with
/// |Q| = 2^{-d level(Q)} relative to the root cube.
inline CubeFamily riesz_coefficients(const DyadicTree& tree, const Measure& sigma, double alpha) {
  if (!(alpha > 0.0 && alpha < tree.dimension()))
    throw std::invalid_argument("riesz_coefficients: alpha must be in (0, d)");
  CubeFamily lambda(tree, 0.0);
  double expo = alpha / tree.dimension() - 1.0;
  for (CubeId q = 0; q < tree.cube_count(); ++q)
    lambda[q] = sigma(q) * std::pow(tree.volume(q), expo);
  return lambda;
}

}  // namespace dytw
