#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dytw/lp_space.hpp"
#include "dytw/measure.hpp"
#include "dytw/numeric.hpp"
#include "dytw/optim.hpp"
#include "dytw/tree.hpp"

namespace dytw {

/// Result of a dual-norm or factorization search. `value` is always the
/// pairing re-evaluated at the feasible witness, so it is a true lower
/// bound by construction.
struct DualEstimate {
  double value = 0.0;
  CubeFamily witness;
  bool converged = true;
  int restarts_used = 0;
};

namespace detail {

/// Normalizes b to the unit ball of f^{pq}(mu) and returns the pairing at
/// the normalized point. Families with zero norm pair to zero under any
/// admissible mu, so they report 0.
inline double pairing_at_normalized(const DyadicTree& tree, const CubeFamily& a,
                                    std::vector<double> b, const LPExponents& dual,
                                    const Measure& mu, CubeFamily* out) {
  CubeFamily bf(std::move(b));
  double n = lp_norm(tree, bf, dual, mu);
  if (!(n > 0.0) || std::isinf(n)) {
    if (out) *out = CubeFamily(tree, 0.0);
    return 0.0;
  }
  for (double& v : bf.values) v /= n;
  if (out) *out = bf;
  return lp_pairing(tree, a, bf, mu);
}

inline DualEstimate dual_search(const DyadicTree& tree, const CubeFamily& a,
                                const LPExponents& dual, const Measure& mu,
                                const OptimizerOptions& opts) {
  int n = tree.cube_count();
  std::vector<std::vector<double>> seeds;
  seeds.push_back(std::vector<double>(n, 1.0));
  std::vector<double> sa(a.values);
  for (double& v : sa) v = std::max(v, 1e-300);
  seeds.push_back(sa);  // near-optimal when the space is self-dual
  std::vector<double> root_only(n, 1e-300);
  root_only[0] = 1.0;
  seeds.push_back(root_only);
  for (auto& s : opts.extra_seeds) seeds.push_back(s);

  auto objective = [&](const std::vector<double>& b) {
    CubeFamily bf{b};
    double nb = lp_norm(tree, bf, dual, mu);
    if (!(nb > 0.0) || std::isinf(nb)) return 0.0;
    return lp_pairing(tree, a, bf, mu) / nb;
  };
  AscentResult r = maximize_positive(n, objective, seeds, opts);

  DualEstimate est;
  est.converged = r.converged;
  est.restarts_used = r.restarts_used;
  est.value = pairing_at_normalized(tree, a, r.point, dual, mu, &est.witness);
  return est;
}

}  // namespace detail

/// Lower bound on the f^{p,q}(mu) norm via its duality formula:
/// sup { sum_Q a_Q b_Q mu(Q) : ||b||_{f^{p',q'}(mu)} <= 1 }.
/// The witness is feasible (normalized) and the reported value is the
/// pairing at the witness.
inline DualEstimate lp_dual_norm(const DyadicTree& tree, const CubeFamily& a,
                                 const LPExponents& e, const Measure& mu,
                                 const OptimizerOptions& opts = {}) {
  if (!(e.p >= 1.0) || !(e.q >= 1.0))
    throw std::invalid_argument("lp_dual_norm: requires p, q in [1, inf]");
  return detail::dual_search(tree, a, e.conjugate(), mu, opts);
}

/// Sub-one duality: sup { sum_Q a_Q b_Q mu(Q) : ||b||_{f^{inf,s}(mu)} <= 1 }
/// for s in (0,1], a lower bound on ||a||_{f^{1,inf}(mu)} up to a constant
/// depending on s. At s = 1 this is the usual (1,inf)-(inf,1) duality.
inline DualEstimate lp_dual_subone(const DyadicTree& tree, const CubeFamily& a, double s,
                                   const Measure& mu, const OptimizerOptions& opts = {}) {
  if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("lp_dual_subone: s must be in (0,1]");
  return detail::dual_search(tree, a, LPExponents(kInf, s), mu, opts);
}

/// Output of lp_factorize: c = a * b cube-wise (up to rounding), with the
/// attained norms recorded for the caller's comparability checks.
struct FactorizeResult {
  CubeFamily a;
  CubeFamily b;
  double norm_a = 0.0;
  double norm_b = 0.0;
  double norm_c = 0.0;
  bool converged = true;
};

/// Splits c into a * b minimizing ||a||_{f^{p1,q1}} ||b||_{f^{p2,q2}} by
/// local search over log-ratios on the support of c. The exponents must
/// satisfy the Holder relations 1/p = 1/p1 + 1/p2, 1/q = 1/q1 + 1/q2.
inline FactorizeResult lp_factorize(const DyadicTree& tree, const CubeFamily& c,
                                    const LPExponents& target, const LPExponents& part1,
                                    const LPExponents& part2, const Measure& mu,
                                    const OptimizerOptions& opts = {}) {
  auto inv = [](double x) { return std::isinf(x) ? 0.0 : 1.0 / x; };
  if (std::abs(inv(target.p) - inv(part1.p) - inv(part2.p)) > 1e-12 ||
      std::abs(inv(target.q) - inv(part1.q) - inv(part2.q)) > 1e-12)
    throw std::invalid_argument("lp_factorize: exponents violate the Holder relations");

  std::vector<int> support;
  for (CubeId q = 0; q < tree.cube_count(); ++q)
    if (c[q] > 0.0) support.push_back(q);

  FactorizeResult res;
  res.a = CubeFamily(tree, 0.0);
  res.b = CubeFamily(tree, 0.0);
  res.norm_c = lp_norm(tree, c, target, mu);
  if (support.empty()) return res;

  // x_i multiplies sqrt(c) in a and divides it in b; the product is fixed.
  auto assemble = [&](const std::vector<double>& x, CubeFamily& a, CubeFamily& b) {
    a = CubeFamily(tree, 0.0);
    b = CubeFamily(tree, 0.0);
    for (size_t i = 0; i < support.size(); ++i) {
      double r = std::sqrt(c[support[i]]);
      a[support[i]] = r * x[i];
      b[support[i]] = c[support[i]] / a[support[i]];
    }
  };
  auto objective = [&](const std::vector<double>& x) {
    CubeFamily a, b;
    assemble(x, a, b);
    double na = lp_norm(tree, a, part1, mu);
    double nb = lp_norm(tree, b, part2, mu);
    double prod = na * nb;
    if (!(prod > 0.0) || std::isinf(prod)) return 0.0;
    return 1.0 / prod;
  };

  std::vector<std::vector<double>> seeds;
  for (double t : {0.5, 0.25, 0.75}) {
    std::vector<double> x(support.size());
    for (size_t i = 0; i < support.size(); ++i)
      x[i] = std::pow(c[support[i]], t - 0.5);  // a = c^t, b = c^{1-t}
    seeds.push_back(std::move(x));
  }
  for (auto& s : opts.extra_seeds) seeds.push_back(s);

  AscentResult r = maximize_positive(static_cast<int>(support.size()), objective, seeds, opts);
  assemble(r.point, res.a, res.b);
  res.norm_a = lp_norm(tree, res.a, part1, mu);
  res.norm_b = lp_norm(tree, res.b, part2, mu);
  res.converged = r.converged;
  return res;
}

}  // namespace dytw
