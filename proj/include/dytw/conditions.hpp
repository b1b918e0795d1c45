#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dytw/lp_space.hpp"
#include "dytw/measure.hpp"
#include "dytw/numeric.hpp"
#include "dytw/tree.hpp"

namespace dytw {

/// Named condition value with an optional witness achieving it.
struct ConditionReport {
  std::string name;
  double value = 0.0;
  std::optional<CubeId> witness_cube;
  std::optional<CubeCollection> witness_collection;
  std::optional<DisjointFamily> witness_family;
};

struct CarlesonNorm {
  double value = 0.0;
  CubeId witness = 0;
};

/// Carleson norm sup_Q (1/mu(Q)) sum_{R<=Q} b_R mu(R) over positive-mass
/// cubes; identical to the f^{inf,1}(mu) norm. Returns the extremal cube.
inline CarlesonNorm carleson_norm(const DyadicTree& tree, const CubeFamily& b, const Measure& mu) {
  std::vector<double> w(tree.cube_count());
  for (CubeId q = 0; q < tree.cube_count(); ++q) w[q] = b[q] * mu(q);
  std::vector<double> s = subtree_sums(tree, w);
  CarlesonNorm out;
  for (CubeId q = 0; q < tree.cube_count(); ++q) {
    if (mu(q) == 0.0) continue;
    double v = s[q] / mu(q);
    if (v > out.value) {
      out.value = v;
      out.witness = q;
    }
  }
  return out;
}

/// Result of the sparse-family extraction.
struct SparseExtract {
  bool feasible = false;
  DisjointFamily family;
  CubeId violating_cube = -1;
};

/// Extracts fractional pairwise-disjoint sets E_Q <= Q with
/// mu(E_Q) >= b_Q mu(Q) / C, or reports a cube whose subtree demand
/// exceeds its mass. Bottom-up greedy transportation: deepest cubes claim
/// first, leaves scanned in canonical order; on trees the greedy is exact
/// for the Hall-type feasibility condition.
inline SparseExtract sparse_extract(const DyadicTree& tree, const CubeFamily& b, const Measure& mu,
                                    double C) {
  if (!(C > 0.0)) throw std::invalid_argument("sparse_extract: C must be positive");
  SparseExtract out;
  out.family = DisjointFamily(tree);

  std::vector<double> demand(tree.cube_count());
  for (CubeId q = 0; q < tree.cube_count(); ++q) demand[q] = b[q] * mu(q) / C;
  std::vector<double> sd = subtree_sums(tree, demand);
  for (CubeId q = 0; q < tree.cube_count(); ++q) {
    if (sd[q] > mu(q) * (1.0 + 1e-12)) {
      out.violating_cube = q;
      return out;
    }
  }

  std::vector<double> remaining(mu.leaf_masses());
  for (int level = tree.depth(); level >= 0; --level) {
    std::int64_t width = std::int64_t{1} << (tree.dimension() * level);
    for (std::int64_t i = 0; i < width; ++i) {
      CubeId q = tree.cube_at(level, i);
      double need = demand[q];
      if (need <= 0.0) continue;
      for (int l = tree.leaf_begin(q); l < tree.leaf_end(q) && need > 0.0; ++l) {
        if (remaining[l] <= 0.0) continue;
        double take = std::min(need, remaining[l]);
        remaining[l] -= take;
        need -= take;
        out.family.fractions[q].push_back({l, take / mu.leaf_mass(l)});
      }
      if (need > 1e-9 * (demand[q] + 1.0)) {
        out.violating_cube = q;
        return out;
      }
    }
  }
  out.feasible = true;
  return out;
}

/// Least C with int sup_{R <= Q} (m_R 1_R) d omega <= C sigma(Q) over all
/// cubes Q (assertion (i) of the multiplier characterization).
inline double multiplier_test(const DyadicTree& tree, const CubeFamily& m, const Measure& sigma,
                              const Measure& omega) {
  double best = 0.0;
  std::vector<double> run(tree.cube_count(), 0.0);
  for (CubeId q = 0; q < tree.cube_count(); ++q) {
    if (sigma(q) == 0.0) continue;
    double acc = 0.0;
    collect_subtree(tree, q, [&](CubeId r) {
      run[r] = r == q ? m[r] : std::max(m[r], run[tree.parent(r)]);
      if (tree.is_leaf(r)) {
        int leaf = r - tree.cube_at(tree.depth(), 0);
        acc += omega.leaf_mass(leaf) * run[r];
      }
    });
    best = std::max(best, acc / sigma(q));
  }
  return best;
}

/// Family sigma(Q)/omega(Q) with cubes of zero omega-mass contributing 0;
/// feeding it to multiplier_test gives the Fujii-Wilson characteristic.
inline CubeFamily density_ratio_family(const DyadicTree& tree, const Measure& sigma,
                                       const Measure& omega) {
  CubeFamily m(tree, 0.0);
  for (CubeId q = 0; q < tree.cube_count(); ++q)
    m[q] = omega(q) > 0.0 ? sigma(q) / omega(q) : 0.0;
  return m;
}

/// Dyadic Fujii-Wilson A_infty characteristic of sigma with respect to
/// omega: sup_Q (1/sigma(Q)) int sup_{R<=Q} (sigma(R)/omega(R)) 1_R d omega.
inline double fw_characteristic(const DyadicTree& tree, const Measure& sigma,
                                const Measure& omega) {
  return multiplier_test(tree, density_ratio_family(tree, sigma, omega), sigma, omega);
}

/// Least alpha in the Coifman-Fefferman condition at proportion beta:
/// the worst over cubes of max{sigma(E)/sigma(Q) : E <= Q fractional,
/// omega(E) <= beta omega(Q)}, solved exactly per cube by fractional
/// greedy on leaves sorted by sigma/omega density.
inline double cf_alpha(const DyadicTree& tree, const Measure& sigma, const Measure& omega,
                       double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("cf_alpha: beta must be in (0,1)");
  double alpha = 0.0;
  std::vector<std::pair<double, int>> order;
  for (CubeId q = 0; q < tree.cube_count(); ++q) {
    if (sigma(q) == 0.0) continue;
    double budget = beta * omega(q);
    double taken = 0.0;
    order.clear();
    for (int l = tree.leaf_begin(q); l < tree.leaf_end(q); ++l) {
      if (omega.leaf_mass(l) == 0.0) {
        taken += sigma.leaf_mass(l);  // free for the taking
      } else if (sigma.leaf_mass(l) > 0.0) {
        order.push_back({sigma.leaf_mass(l) / omega.leaf_mass(l), l});
      }
    }
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    for (auto& [density, l] : order) {
      if (budget <= 0.0) break;
      double w = std::min(omega.leaf_mass(l), budget);
      taken += sigma.leaf_mass(l) * (w / omega.leaf_mass(l));
      budget -= w;
    }
    alpha = std::max(alpha, taken / sigma(q));
  }
  return std::min(alpha, 1.0);
}

/// Lambda_Q = (1/omega(Q)) sum_{R<=Q} lambda_R omega(R); 0 where omega
/// vanishes.
inline CubeFamily lambda_avg(const DyadicTree& tree, const CubeFamily& lambda,
                             const Measure& omega) {
  std::vector<double> w(tree.cube_count());
  for (CubeId q = 0; q < tree.cube_count(); ++q) w[q] = lambda[q] * omega(q);
  std::vector<double> s = subtree_sums(tree, w);
  CubeFamily out(tree, 0.0);
  for (CubeId q = 0; q < tree.cube_count(); ++q)
    out[q] = omega(q) > 0.0 ? s[q] / omega(q) : 0.0;
  return out;
}

enum class RhoMode { Sum, Sup };

/// The gamma-average Lambda_{gamma,Q} of the localized coefficient profile
/// rho_Q (sum or sup of lambda over [x, Q]), evaluated leafwise inside Q.
/// gamma < 0 with rho vanishing on positive omega-mass yields 0.
inline CubeFamily lambda_gamma(const DyadicTree& tree, const CubeFamily& lambda,
                               const Measure& omega, double gamma, RhoMode mode) {
  if (gamma == 0.0) throw std::invalid_argument("lambda_gamma: gamma must be nonzero");
  CubeFamily out(tree, 0.0);
  std::vector<double> run(tree.cube_count(), 0.0);
  std::vector<double> rho, w;
  for (CubeId q = 0; q < tree.cube_count(); ++q) {
    if (omega(q) == 0.0) continue;
    rho.clear();
    w.clear();
    collect_subtree(tree, q, [&](CubeId r) {
      if (r == q)
        run[r] = lambda[r];
      else
        run[r] = mode == RhoMode::Sum ? lambda[r] + run[tree.parent(r)]
                                      : std::max(lambda[r], run[tree.parent(r)]);
      if (tree.is_leaf(r)) {
        int leaf = r - tree.cube_at(tree.depth(), 0);
        rho.push_back(run[r]);
        w.push_back(omega.leaf_mass(leaf));
      }
    });
    out[q] = weighted_lq_mean(rho, w, gamma);
  }
  return out;
}

namespace detail {
/// omega/sigma ratio with the 0/0 convention; +inf when only sigma is 0.
inline double wratio(double num, double den) { return mass_ratio(num, den); }
}  // namespace detail

/// Discrete Wolff potential W^{p'}_{lambda,sigma}[omega] as a leaf
/// function. With `dual` set, evaluates the potential of the adjoint
/// operator: coefficients lambda_Q omega(Q)/sigma(Q), measures swapped,
/// at the exponent passed by the caller (q' for the standard pair).
inline LeafFunction wolff_potential(const DyadicTree& tree, const CubeFamily& lambda,
                                    const Measure& sigma, const Measure& omega, double p,
                                    bool dual = false) {
  if (!(p > 1.0) || std::isinf(p)) throw std::invalid_argument("wolff_potential: p must be in (1,inf)");
  if (dual) {
    CubeFamily adj(tree, 0.0);
    for (CubeId q = 0; q < tree.cube_count(); ++q)
      adj[q] = lambda[q] == 0.0 ? 0.0 : lambda[q] * detail::wratio(omega(q), sigma(q));
    return wolff_potential(tree, adj, omega, sigma, p, false);
  }
  double e = 1.0 / (p - 1.0);  // p' - 1
  CubeFamily big = lambda_avg(tree, lambda, omega);
  std::vector<double> coef(tree.cube_count(), 0.0);
  for (CubeId q = 0; q < tree.cube_count(); ++q) {
    if (lambda[q] == 0.0) continue;
    coef[q] = lambda[q] * std::pow(detail::wratio(omega(q), sigma(q)), e) * std::pow(big[q], e);
  }
  return LeafFunction(ancestor_sums(tree, coef));
}

/// The two potential-type condition values (V1, V2), normalized so both
/// are homogeneous of degree 1 in lambda: outer exponent (p-q)/(pq) after
/// the stated inner powers.
inline std::pair<double, double> wolff_condition(const DyadicTree& tree, const CubeFamily& lambda,
                                                 const Measure& sigma, const Measure& omega,
                                                 double p, double q) {
  if (!(q > 1.0 && q < p) || std::isinf(p))
    throw std::invalid_argument("wolff_condition: requires 1 < q < p < inf");
  double pc = holder_conjugate(p), qc = holder_conjugate(q);
  LeafFunction w1 = wolff_potential(tree, lambda, sigma, omega, p, false);
  LeafFunction w2 = wolff_potential(tree, lambda, sigma, omega, qc, true);
  double outer = (p - q) / (p * q);
  double v1 = integral_power(w1.values, omega.leaf_masses(), (p - 1.0) * q / (p - q), outer);
  double v2 = integral_power(w2.values, sigma.leaf_masses(), (qc - 1.0) * pc / (qc - pc), outer);
  return {v1, v2};
}

/// Integral expression I (dual = false) or I* (dual = true):
/// I  = (int (sum_Q lambda_Q (omega(Q)/sigma(Q))^{1/q} 1_Q)^{pq/(p-q)} dsigma)^{(p-q)/(pq)},
/// I* uses exponent 1/p and integrates in omega.
inline double integral_condition(const DyadicTree& tree, const CubeFamily& lambda,
                                 const Measure& sigma, const Measure& omega, double p, double q,
                                 bool dual = false) {
  if (!(q < p)) throw std::invalid_argument("integral_condition: requires q < p");
  double r = dual ? 1.0 / p : 1.0 / q;
  std::vector<double> coef(tree.cube_count(), 0.0);
  for (CubeId c = 0; c < tree.cube_count(); ++c) {
    if (lambda[c] == 0.0) continue;
    coef[c] = lambda[c] * std::pow(detail::wratio(omega(c), sigma(c)), r);
  }
  std::vector<double> x = ancestor_sums(tree, coef);
  const Measure& mu = dual ? omega : sigma;
  return integral_power(x, mu.leaf_masses(), p * q / (p - q), (p - q) / (p * q));
}

/// Sufficient (S) and necessary (N) condition values on the maximal-
/// operator scale; cubes with zero sigma-mass are excluded from the sup
/// and omega(Q) = 0 makes the mass ratio vanish.
inline std::pair<double, double> maximal_condition_values(const DyadicTree& tree,
                                                          const CubeFamily& lambda,
                                                          const Measure& sigma,
                                                          const Measure& omega, double p, double q,
                                                          double eps) {
  if (!(eps > 0.0 && eps < q)) throw std::invalid_argument("maximal_condition_values: need 0 < eps < q");
  if (!(q < p)) throw std::invalid_argument("maximal_condition_values: requires q < p");
  CubeFamily lam_q = lambda_gamma(tree, lambda, omega, q, RhoMode::Sup);
  CubeFamily lam_qe = lambda_gamma(tree, lambda, omega, q - eps, RhoMode::Sup);
  double re = q / (p - q);
  std::vector<double> ts(tree.cube_count(), 0.0), tn(tree.cube_count(), 0.0);
  for (CubeId c = 0; c < tree.cube_count(); ++c) {
    if (sigma(c) == 0.0) continue;  // excluded from the sup
    double ratio = omega(c) == 0.0 ? 0.0 : omega(c) / sigma(c);
    double rpow = std::pow(ratio, re);
    ts[c] = rpow * std::pow(lambda[c], q) * std::pow(lam_q[c], q * re);
    tn[c] = rpow * std::pow(lam_qe[c], p * re);
  }
  std::vector<double> xs = ancestor_maxima(tree, ts);
  std::vector<double> xn = ancestor_maxima(tree, tn);
  double outer = (p - q) / (p * q);
  double s = integral_power(xs, omega.leaf_masses(), 1.0, outer);
  double n = integral_power(xn, omega.leaf_masses(), 1.0, outer);
  return {s, n};
}

/// Value of the Verbitsky collection condition for one collection: builds
/// lambda_Q(x) = inf_{Q in col, x in Q} sup_{R in col, x in R <= Q} lambda_R
/// leafwise (leaves in no collection cube contribute 0) and evaluates
/// int sup_{x in Q in col} ((int_Q lambda_col^q domega)/sigma(Q))^{q/(p-q)}
/// lambda_col^q(x) domega(x).
inline double verbitsky_value(const DyadicTree& tree, const CubeFamily& lambda,
                              const Measure& sigma, const Measure& omega, double p, double q,
                              const CubeCollection& col) {
  if (col.empty()) throw std::invalid_argument("verbitsky_value: collection must be nonempty");
  if (!(q < p)) throw std::invalid_argument("verbitsky_value: requires q < p");
  int D = tree.depth();
  std::vector<double> lam_col(tree.leaf_count(), 0.0);
  std::vector<char> covered(tree.leaf_count(), 0);
  std::vector<double> suffix(D + 1);
  std::vector<char> in_col(D + 1);
  std::vector<double> chain(D + 1);
  for (int l = 0; l < tree.leaf_count(); ++l) {
    for (int j = 0; j <= D; ++j) {
      CubeId c = tree.ancestor_at_level(l, j);
      in_col[j] = col.contains(c) ? 1 : 0;
      chain[j] = lambda[c];
    }
    double run = 0.0;
    for (int j = D; j >= 0; --j) {
      if (in_col[j]) run = std::max(run, chain[j]);
      suffix[j] = run;  // sup over collection cubes R with l in R <= level-j ancestor
    }
    double inf_v = kInf;
    for (int j = 0; j <= D; ++j)
      if (in_col[j]) inf_v = std::min(inf_v, suffix[j]);
    if (std::isinf(inf_v)) continue;  // leaf in no collection cube
    covered[l] = 1;
    lam_col[l] = inf_v;
  }

  // w[c] = int_c lambda_col^q d omega, as subtree sums of leaf contributions.
  std::vector<double> per_cube(tree.cube_count(), 0.0);
  int first_leaf = tree.cube_at(D, 0);
  for (int l = 0; l < tree.leaf_count(); ++l)
    per_cube[first_leaf + l] = covered[l] ? omega.leaf_mass(l) * std::pow(lam_col[l], q) : 0.0;
  std::vector<double> w = subtree_sums(tree, per_cube);

  double total = 0.0;
  for (int l = 0; l < tree.leaf_count(); ++l) {
    if (!covered[l] || omega.leaf_mass(l) == 0.0) continue;
    double best = 0.0;
    bool any = false;
    for (int j = 0; j <= D; ++j) {
      CubeId c = tree.ancestor_at_level(l, j);
      if (!col.contains(c)) continue;
      any = true;
      best = std::max(best, std::pow(mass_ratio(w[c], sigma(c)), q / (p - q)));
    }
    if (any) total += omega.leaf_mass(l) * std::pow(lam_col[l], q) * best;
  }
  return total;
}

/// Value of the disjoint-set condition for one family:
/// int (sum_Q lambda_Q^q (omega(E_Q)/sigma(Q)) 1_Q)^{(p-q)/q} dsigma.
inline double disjoint_value(const DyadicTree& tree, const CubeFamily& lambda,
                             const Measure& sigma, const Measure& omega, double p, double q,
                             const DisjointFamily& family) {
  if (!(q < p)) throw std::invalid_argument("disjoint_value: requires q < p");
  family.validate(tree);
  std::vector<double> coef(tree.cube_count(), 0.0);
  for (CubeId c = 0; c < tree.cube_count(); ++c) {
    double we = family.set_mass(omega, c);
    if (we == 0.0 || lambda[c] == 0.0) continue;
    coef[c] = std::pow(lambda[c], q) * mass_ratio(we, sigma(c));
  }
  std::vector<double> x = ancestor_sums(tree, coef);
  return integral_power(x, sigma.leaf_masses(), (p - q) / q, 1.0);
}

/// Dyadic logarithmic bounded oscillation ratio:
/// sup over positive lambda_Q of (max_{R<=Q} lambda_R)/lambda_Q, +inf when
/// a zero coefficient has a positive descendant, 1 for vacuous families.
inline double dlbo_ratio(const DyadicTree& tree, const CubeFamily& lambda) {
  std::vector<double> smax(lambda.values);
  for (CubeId q = tree.cube_count() - 1; q > 0; --q)
    smax[tree.parent(q)] = std::max(smax[tree.parent(q)], smax[q]);
  double out = 1.0;
  for (CubeId q = 0; q < tree.cube_count(); ++q) {
    if (lambda[q] > 0.0)
      out = std::max(out, smax[q] / lambda[q]);
    else if (smax[q] > 0.0)
      return kInf;
  }
  return out;
}

struct EquivalentExpressions {
  double e1 = 0.0;
  double e2 = 0.0;
  double e3 = 0.0;
};

/// The three comparable expressions of the equivalent-expressions lemma,
/// reported raw (no outer roots).
inline EquivalentExpressions equivalent_expressions(const DyadicTree& tree, const CubeFamily& a,
                                                    double p, const Measure& mu) {
  if (!(p > 1.0) || std::isinf(p))
    throw std::invalid_argument("equivalent_expressions: p must be in (1,inf)");
  EquivalentExpressions out;
  std::vector<double> sums = ancestor_sums(tree, a.values);
  for (int l = 0; l < tree.leaf_count(); ++l)
    if (mu.leaf_mass(l) > 0.0) out.e1 += mu.leaf_mass(l) * std::pow(sums[l], p);

  std::vector<double> w(tree.cube_count());
  for (CubeId q = 0; q < tree.cube_count(); ++q) w[q] = a[q] * mu(q);
  std::vector<double> s = subtree_sums(tree, w);
  std::vector<double> avg(tree.cube_count(), 0.0);
  for (CubeId q = 0; q < tree.cube_count(); ++q) {
    if (mu(q) == 0.0) continue;
    avg[q] = s[q] / mu(q);
    if (a[q] > 0.0) out.e2 += a[q] * mu(q) * std::pow(avg[q], p - 1.0);
  }
  std::vector<double> peak = ancestor_maxima(tree, avg);
  for (int l = 0; l < tree.leaf_count(); ++l)
    if (mu.leaf_mass(l) > 0.0) out.e3 += mu.leaf_mass(l) * std::pow(peak[l], p);
  return out;
}

}  // namespace dytw
