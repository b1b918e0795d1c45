#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dytw/measure.hpp"
#include "dytw/numeric.hpp"
#include "dytw/tree.hpp"

namespace dytw {

/// Exponent pair of a discrete Littlewood-Paley space f^{p,q}(mu):
/// p in (0,inf], q in R\{0} or +inf.
struct LPExponents {
  double p;
  double q;

  LPExponents(double p_, double q_) : p(p_), q(q_) {
    if (!(p > 0.0)) throw std::invalid_argument("lp exponents: p must be positive or inf");
    if (q == 0.0 || std::isnan(q)) throw std::invalid_argument("lp exponents: q must be nonzero");
  }

  LPExponents conjugate() const { return {holder_conjugate(p), holder_conjugate(q)}; }
};

/// Visits every cube of the subtree rooted at q (canonical order).
template <class Fn>
void collect_subtree(const DyadicTree& tree, CubeId q, Fn&& fn) {
  int j0 = tree.level(q);
  std::int64_t base = tree.index_in_level(q);
  for (int j = j0; j <= tree.depth(); ++j) {
    std::int64_t lo = base << (tree.dimension() * (j - j0));
    std::int64_t hi = (base + 1) << (tree.dimension() * (j - j0));
    for (std::int64_t i = lo; i < hi; ++i) fn(tree.cube_at(j, i));
  }
}

/// The discrete Littlewood-Paley norm of a cube family, by the four
/// exponent regimes. Returns +inf when the norm diverges. A zero a_Q hit
/// by a negative q follows the limit convention: the inner sum is +inf
/// and the outer power 1/q < 0 maps it to 0.
inline double lp_norm(const DyadicTree& tree, const CubeFamily& a, const LPExponents& e,
                      const Measure& mu) {
  const bool p_inf = std::isinf(e.p);
  const bool q_inf = std::isinf(e.q);

  if (p_inf && q_inf) {
    double m = 0.0;
    for (double v : a.values) m = std::max(m, v);
    return m;
  }

  if (p_inf) {
    // sup_Q ((1/mu(Q)) sum_{R<=Q} a_R^q mu(R))^{1/q}, positive-mass cubes only.
    double best = 0.0;
    std::vector<double> vals, weights;
    for (CubeId q = 0; q < tree.cube_count(); ++q) {
      if (mu(q) == 0.0) continue;
      vals.clear();
      weights.clear();
      collect_subtree(tree, q, [&](CubeId r) {
        vals.push_back(a[r]);
        weights.push_back(mu(r));
      });
      best = std::max(best, weighted_lq_mean(vals, weights, e.q, mu(q)));
    }
    return best;
  }

  // Leafwise inner aggregate, then an exact integral over leaf masses.
  std::vector<double> inner(tree.leaf_count());
  if (q_inf) {
    inner = ancestor_maxima(tree, a.values);
  } else {
    std::vector<double> chain(tree.depth() + 1);
    for (int l = 0; l < tree.leaf_count(); ++l) {
      for (int j = 0; j <= tree.depth(); ++j) chain[j] = a[tree.ancestor_at_level(l, j)];
      inner[l] = lq_sum(chain, e.q);
    }
  }
  return integral_power(inner, mu.leaf_masses(), e.p, 1.0 / e.p);
}

/// The bilinear pairing sum_Q a_Q b_Q mu(Q), exact finite sum.
inline double lp_pairing(const DyadicTree& tree, const CubeFamily& a, const CubeFamily& b,
                         const Measure& mu) {
  double s = 0.0;
  for (CubeId q = 0; q < tree.cube_count(); ++q) s += a[q] * b[q] * mu(q);
  return s;
}

}  // namespace dytw
