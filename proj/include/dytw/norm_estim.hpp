#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dytw/conditions.hpp"
#include "dytw/instance.hpp"
#include "dytw/measure.hpp"
#include "dytw/numeric.hpp"
#include "dytw/operators.hpp"
#include "dytw/optim.hpp"
#include "dytw/tree.hpp"

namespace dytw {

/// Certified lower bound on an operator norm: the value is the Rayleigh
/// ratio at the stored witness, re-checkable exactly.
struct NormEstimate {
  double value = 0.0;
  LeafFunction witness_f;
  LeafFunction witness_g;  // filled by the alternating bilinear scheme
  bool converged = true;
  int restarts_used = 0;
};

/// A positive linear operator on leaf functions with its transpose in
/// plain coordinates: sum_l v_l (A f)_l = sum_l f_l (A^T v)_l.
struct PositiveLinearOp {
  std::function<std::vector<double>(const std::vector<double>&)> apply;
  std::function<std::vector<double>(const std::vector<double>&)> adjoint;
};

namespace detail {

inline PositiveLinearOp summation_op(const DyadicTree& tree, const CubeFamily& lambda,
                                     const Measure& sigma) {
  PositiveLinearOp op;
  auto lam = std::make_shared<CubeFamily>(lambda);
  op.apply = [&tree, lam, &sigma](const std::vector<double>& f) {
    return apply_summation(tree, *lam, sigma, LeafFunction(f)).values;
  };
  op.adjoint = [&tree, lam, &sigma](const std::vector<double>& v) {
    std::vector<double> per_cube(tree.cube_count(), 0.0);
    int first_leaf = tree.cube_at(tree.depth(), 0);
    for (int l = 0; l < tree.leaf_count(); ++l) per_cube[first_leaf + l] = v[l];
    std::vector<double> vol = subtree_sums(tree, per_cube);
    std::vector<double> coef(tree.cube_count(), 0.0);
    for (CubeId q = 0; q < tree.cube_count(); ++q)
      if (sigma(q) > 0.0) coef[q] = (*lam)[q] * vol[q] / sigma(q);
    std::vector<double> u = ancestor_sums(tree, coef);
    for (int l = 0; l < tree.leaf_count(); ++l) u[l] *= sigma.leaf_mass(l);
    return u;
  };
  return op;
}

/// Linearization of the maximal operator by a per-leaf cube selection;
/// selection[l] < 0 denotes the identically-zero row.
inline PositiveLinearOp selection_op(const DyadicTree& tree, const CubeFamily& lambda,
                                     const Measure& sigma, std::vector<CubeId> selection) {
  PositiveLinearOp op;
  auto sel = std::make_shared<std::vector<CubeId>>(std::move(selection));
  auto lam = std::make_shared<CubeFamily>(lambda);
  op.apply = [&tree, lam, &sigma, sel](const std::vector<double>& f) {
    std::vector<double> avg = all_cube_averages(tree, LeafFunction(f), sigma);
    std::vector<double> out(tree.leaf_count(), 0.0);
    for (int l = 0; l < tree.leaf_count(); ++l) {
      CubeId q = (*sel)[l];
      if (q >= 0) out[l] = (*lam)[q] * avg[q];
    }
    return out;
  };
  op.adjoint = [&tree, lam, &sigma, sel](const std::vector<double>& v) {
    std::vector<double> coef(tree.cube_count(), 0.0);
    for (int l = 0; l < tree.leaf_count(); ++l) {
      CubeId q = (*sel)[l];
      if (q >= 0 && sigma(q) > 0.0) coef[q] += v[l] * (*lam)[q] / sigma(q);
    }
    std::vector<double> u = ancestor_sums(tree, coef);
    for (int l = 0; l < tree.leaf_count(); ++l) u[l] *= sigma.leaf_mass(l);
    return u;
  };
  return op;
}

inline double weighted_norm(const std::vector<double>& v, const Measure& mu, double p) {
  return integral_power(v, mu.leaf_masses(), p, 1.0 / p);
}

/// Scales f to the unit sphere of L^p(mu); false when the norm vanishes.
inline bool normalize_lp(std::vector<double>& f, const Measure& mu, double p) {
  double n = weighted_norm(f, mu, p);
  if (!(n > 0.0) || std::isinf(n)) return false;
  for (double& x : f) x /= n;
  return true;
}

inline std::vector<std::vector<double>> leaf_seeds(const DyadicTree& tree,
                                                   const OptimizerOptions& opts) {
  std::vector<std::vector<double>> seeds;
  seeds.emplace_back(tree.leaf_count(), 1.0);
  int cap = std::min(tree.leaf_count(), 32);
  for (int l = 0; l < cap; ++l) {
    std::vector<double> e(tree.leaf_count(), 0.0);
    e[l] = 1.0;
    seeds.push_back(std::move(e));
  }
  for (auto& s : opts.extra_seeds)
    if (static_cast<int>(s.size()) == tree.leaf_count()) seeds.push_back(s);
  return seeds;
}

inline std::vector<double> restart_point(const DyadicTree& tree,
                                         const std::vector<std::vector<double>>& seeds, int r,
                                         std::uint64_t seed) {
  if (r < static_cast<int>(seeds.size())) return seeds[r];
  std::mt19937_64 rng(mix_seed(seed, r));
  std::vector<double> f(tree.leaf_count());
  for (double& x : f) x = exp_sample(rng);
  return f;
}

struct LinearTracker {
  NormEstimate best;
  int last_improve = 0;

  explicit LinearTracker(const DyadicTree& tree) { best.witness_f = LeafFunction(tree, 0.0); }
  void offer(double value, const std::vector<double>& f, int restart) {
    if (value > best.value) {
      best.value = value;
      best.witness_f = LeafFunction(f);
      last_improve = restart;
    }
  }
};

/// q = 1 is exact: ||L(f sigma)||_{L^1(omega)} = int f (L^T omega / sigma)
/// dsigma, so the dual density's L^{p'}(sigma) norm is the least constant
/// and the Holder extremizer is the witness.
inline void linear_norm_q1(const DyadicTree& tree, const PositiveLinearOp& op,
                           const Measure& sigma, const Measure& omega, double p,
                           LinearTracker& track) {
  double pc = holder_conjugate(p);
  std::vector<double> h = op.adjoint(omega.leaf_masses());
  for (int l = 0; l < tree.leaf_count(); ++l)
    h[l] = sigma.leaf_mass(l) > 0.0 ? h[l] / sigma.leaf_mass(l) : 0.0;
  std::vector<double> f(tree.leaf_count(), 0.0);
  for (int l = 0; l < tree.leaf_count(); ++l) f[l] = std::pow(h[l], pc - 1.0);
  if (!normalize_lp(f, sigma, p)) return;
  track.offer(weighted_norm(op.apply(f), omega, 1.0), f, 0);
}

/// Alternating maximization of the bilinear form over the two unit
/// spheres; each half-step is the exact Holder extremizer. Requires q > 1.
inline void linear_norm_bilinear(const DyadicTree& tree, const PositiveLinearOp& op,
                                 const Measure& sigma, const Measure& omega, double p, double q,
                                 const OptimizerOptions& opts, LinearTracker& track,
                                 LeafFunction* witness_g) {
  const double pc = holder_conjugate(p);
  const double qc = holder_conjugate(q);
  std::vector<std::vector<double>> seeds = leaf_seeds(tree, opts);
  int total = opts.restarts + static_cast<int>(seeds.size());
  for (int r = 0; r < total; ++r) {
    std::vector<double> g = restart_point(tree, seeds, r, opts.seed);
    if (!normalize_lp(g, omega, qc)) continue;
    double prev = 0.0;
    for (int it = 0; it < opts.max_iters; ++it) {
      std::vector<double> gw(tree.leaf_count());
      for (int l = 0; l < tree.leaf_count(); ++l) gw[l] = g[l] * omega.leaf_mass(l);
      std::vector<double> h = op.adjoint(gw);
      std::vector<double> f(tree.leaf_count(), 0.0);
      for (int l = 0; l < tree.leaf_count(); ++l) {
        double dens = sigma.leaf_mass(l) > 0.0 ? h[l] / sigma.leaf_mass(l) : 0.0;
        f[l] = std::pow(dens, pc - 1.0);
      }
      if (!normalize_lp(f, sigma, p)) break;
      std::vector<double> k = op.apply(f);
      double val = weighted_norm(k, omega, q);
      if (val > track.best.value && witness_g) *witness_g = LeafFunction(g);
      track.offer(val, f, r);
      for (int l = 0; l < tree.leaf_count(); ++l) k[l] = std::pow(k[l], q - 1.0);
      if (!normalize_lp(k, omega, qc)) break;
      g = std::move(k);
      if (val <= prev * (1.0 + opts.tolerance)) break;
      prev = val;
    }
  }
  track.best.restarts_used = total;
  track.best.converged = track.last_improve <= (3 * total) / 4;
}

/// Projected-gradient ascent of f -> ||L(f sigma)||_{L^q(omega)} over the
/// L^p(sigma) unit sphere of nonnegative functions, with geometric
/// backtracking. Works for every q > 0 (used as the primal cross-check
/// for q > 1 and as the main route for q < 1).
inline void linear_norm_gradient(const DyadicTree& tree, const PositiveLinearOp& op,
                                 const Measure& sigma, const Measure& omega, double p, double q,
                                 const OptimizerOptions& opts, LinearTracker& track) {
  std::vector<std::vector<double>> seeds = leaf_seeds(tree, opts);
  int total = opts.restarts + static_cast<int>(seeds.size());
  for (int r = 0; r < total; ++r) {
    std::vector<double> f = restart_point(tree, seeds, r, opts.seed);
    if (!normalize_lp(f, sigma, p)) continue;
    double cur = weighted_norm(op.apply(f), omega, q);
    track.offer(cur, f, r);
    for (int it = 0; it < opts.max_iters; ++it) {
      std::vector<double> k = op.apply(f);
      std::vector<double> v(tree.leaf_count(), 0.0);
      for (int l = 0; l < tree.leaf_count(); ++l)
        if (k[l] > 0.0 && omega.leaf_mass(l) > 0.0)
          v[l] = omega.leaf_mass(l) * std::pow(k[l], q - 1.0);
      std::vector<double> grad = op.adjoint(v);
      double gmax = 0.0;
      for (double x : grad) gmax = std::max(gmax, std::abs(x));
      if (gmax == 0.0) break;
      double step = opts.initial_step;
      bool accepted = false;
      for (int bt = 0; bt < opts.max_backtracks; ++bt) {
        std::vector<double> fn(tree.leaf_count());
        for (int l = 0; l < tree.leaf_count(); ++l)
          fn[l] = std::max(0.0, f[l] + step * grad[l] / gmax);
        if (normalize_lp(fn, sigma, p)) {
          double val = weighted_norm(op.apply(fn), omega, q);
          if (val > cur * (1.0 + opts.tolerance)) {
            f = std::move(fn);
            cur = val;
            accepted = true;
            break;
          }
        }
        step *= opts.step_shrink;
      }
      if (!accepted) break;
      track.offer(cur, f, r);
    }
  }
  track.best.restarts_used = total;
  track.best.converged = track.last_improve <= (3 * total) / 4;
}

/// Finishing pass: log-space coordinate ascent from the best point found,
/// which irons out the last fraction of a percent the first-order steps
/// leave behind near interior optima.
inline void log_polish(const DyadicTree& tree,
                       const std::function<double(const std::vector<double>&)>& ratio,
                       const OptimizerOptions& opts, LinearTracker& track) {
  if (!(track.best.value > 0.0)) return;
  std::vector<double> s0 = track.best.witness_f.values;
  for (double& v : s0) v = std::max(v, 1e-12);
  OptimizerOptions polish = opts;
  polish.restarts = 0;
  polish.max_iters = std::min(opts.max_iters, 200);
  AscentResult ar = maximize_positive(tree.leaf_count(), ratio, {s0}, polish);
  track.offer(ar.value, ar.point, track.last_improve);
}

/// Dispatch per exponent range: closed form at q = 1, alternating
/// bilinear above, projected gradient below.
inline NormEstimate estimate_linear(const DyadicTree& tree, const PositiveLinearOp& op,
                                    const Measure& sigma, const Measure& omega, double p, double q,
                                    const OptimizerOptions& opts) {
  LinearTracker track(tree);
  auto ratio = [&](const std::vector<double>& f) {
    double den = weighted_norm(f, sigma, p);
    if (!(den > 0.0)) return 0.0;
    return weighted_norm(op.apply(f), omega, q) / den;
  };
  if (q == 1.0) {
    linear_norm_q1(tree, op, sigma, omega, p, track);
    track.best.restarts_used = 1;
  } else if (q > 1.0) {
    linear_norm_bilinear(tree, op, sigma, omega, p, q, opts, track, &track.best.witness_g);
    log_polish(tree, ratio, opts, track);
  } else {
    linear_norm_gradient(tree, op, sigma, omega, p, q, opts, track);
    log_polish(tree, ratio, opts, track);
  }
  if (track.best.value > 0.0) track.best.value = ratio(track.best.witness_f.values);
  return track.best;
}

inline bool degenerate(const CubeFamily& lambda, const Measure& sigma, const Measure& omega) {
  double lmax = 0.0;
  for (double v : lambda.values) lmax = std::max(lmax, v);
  return lmax == 0.0 || sigma.total() == 0.0 || omega.total() == 0.0;
}

}  // namespace detail

/// Rayleigh ratio ||T_lambda(f sigma)||_{L^q(omega)} / ||f||_{L^p(sigma)};
/// what every summation-norm estimate re-checks at its witness.
inline double rayleigh_summation(const Instance& inst, const LeafFunction& f) {
  double den = lebesgue_norm(inst.tree, f, inst.p, inst.sigma);
  if (!(den > 0.0)) return 0.0;
  LeafFunction tf = apply_summation(inst.tree, inst.lambda, inst.sigma, f);
  return lebesgue_norm(inst.tree, tf, inst.q, inst.omega) / den;
}

/// Same for the maximal operator.
inline double rayleigh_maximal(const Instance& inst, const LeafFunction& f) {
  double den = lebesgue_norm(inst.tree, f, inst.p, inst.sigma);
  if (!(den > 0.0)) return 0.0;
  LeafFunction mf = apply_maximal(inst.tree, inst.lambda, inst.sigma, f).values;
  return lebesgue_norm(inst.tree, mf, inst.q, inst.omega) / den;
}

/// How estimate_norm_summation attacks the problem; Auto follows the
/// exponent range (alternating bilinear for q > 1, projected gradient
/// for q <= 1, with q = 1 solved exactly through its dual density).
enum class SummationMethod { Auto, Bilinear, Gradient };

namespace detail {

/// Coefficients are scaled to unit maximum before optimizing, so the
/// reported value is homogeneous of degree 1 in lambda by construction.
inline NormEstimate estimate_summation_core(const DyadicTree& tree, const CubeFamily& lambda,
                                            const Measure& sigma, const Measure& omega, double p,
                                            double q, const OptimizerOptions& opts,
                                            SummationMethod method) {
  NormEstimate zero;
  zero.witness_f = LeafFunction(tree, 0.0);
  if (degenerate(lambda, sigma, omega)) return zero;
  double scale = 0.0;
  for (double v : lambda.values) scale = std::max(scale, v);
  CubeFamily unit(lambda.values);
  for (double& v : unit.values) v /= scale;
  PositiveLinearOp op = summation_op(tree, unit, sigma);

  auto ratio = [&](const std::vector<double>& f) {
    double den = weighted_norm(f, sigma, p);
    if (!(den > 0.0)) return 0.0;
    return weighted_norm(op.apply(f), omega, q) / den;
  };
  NormEstimate est;
  if (method == SummationMethod::Auto) {
    est = estimate_linear(tree, op, sigma, omega, p, q, opts);
  } else if (method == SummationMethod::Bilinear) {
    if (!(q > 1.0)) throw std::invalid_argument("bilinear scheme requires q > 1");
    LinearTracker track(tree);
    linear_norm_bilinear(tree, op, sigma, omega, p, q, opts, track, &track.best.witness_g);
    log_polish(tree, ratio, opts, track);
    est = track.best;
  } else {
    LinearTracker track(tree);
    linear_norm_gradient(tree, op, sigma, omega, p, q, opts, track);
    log_polish(tree, ratio, opts, track);
    est = track.best;
  }
  if (est.value > 0.0) {
    double den = weighted_norm(est.witness_f.values, sigma, p);
    est.value = scale * weighted_norm(op.apply(est.witness_f.values), omega, q) / den;
  }
  return est;
}

/// Subgradient ascent of the maximal-operator Rayleigh ratio through the
/// per-leaf arg-max linearization, with backtracking on the true objective.
inline void maximal_subgradient(const DyadicTree& tree, const CubeFamily& lambda,
                                const Measure& sigma, const Measure& omega, double p, double q,
                                const OptimizerOptions& opts, LinearTracker& track) {
  std::vector<std::vector<double>> seeds = leaf_seeds(tree, opts);
  int total = opts.restarts + static_cast<int>(seeds.size());
  for (int r = 0; r < total; ++r) {
    std::vector<double> f = restart_point(tree, seeds, r, opts.seed);
    if (!normalize_lp(f, sigma, p)) continue;
    MaximalApply ma = apply_maximal(tree, lambda, sigma, LeafFunction(f));
    double cur = weighted_norm(ma.values.values, omega, q);
    track.offer(cur, f, r);
    for (int it = 0; it < opts.max_iters; ++it) {
      PositiveLinearOp lin = selection_op(tree, lambda, sigma, ma.argmax);
      std::vector<double> v(tree.leaf_count(), 0.0);
      for (int l = 0; l < tree.leaf_count(); ++l)
        if (ma.values[l] > 0.0 && omega.leaf_mass(l) > 0.0)
          v[l] = omega.leaf_mass(l) * std::pow(ma.values[l], q - 1.0);
      std::vector<double> grad = lin.adjoint(v);
      double gmax = 0.0;
      for (double x : grad) gmax = std::max(gmax, std::abs(x));
      if (gmax == 0.0) break;
      double step = opts.initial_step;
      bool accepted = false;
      for (int bt = 0; bt < opts.max_backtracks; ++bt) {
        std::vector<double> fn(tree.leaf_count());
        for (int l = 0; l < tree.leaf_count(); ++l)
          fn[l] = std::max(0.0, f[l] + step * grad[l] / gmax);
        if (normalize_lp(fn, sigma, p)) {
          MaximalApply man = apply_maximal(tree, lambda, sigma, LeafFunction(fn));
          double val = weighted_norm(man.values.values, omega, q);
          if (val > cur * (1.0 + opts.tolerance)) {
            f = std::move(fn);
            ma = std::move(man);
            cur = val;
            accepted = true;
            break;
          }
        }
        step *= opts.step_shrink;
      }
      if (!accepted) break;
      track.offer(cur, f, r);
    }
  }
  track.best.restarts_used = total;
  track.best.converged = track.last_improve <= (3 * total) / 4;
}

/// Exhaustive linearization: sup_f ratio(M) equals the max over per-leaf
/// selections of the linearized operator norm, and zero rows are
/// dominated, so only cubes with positive coefficient and mass are
/// enumerated. Exact on tiny trees (up to the inner solver). Witnesses
/// are re-evaluated under the true maximal operator, which dominates.
/// Whether the selection space fit under the cap is written to `ran`.
inline void maximal_enumeration(const DyadicTree& tree, const CubeFamily& lambda,
                                const Measure& sigma, const Measure& omega, double p, double q,
                                const OptimizerOptions& opts, LinearTracker& track,
                                bool* ran = nullptr) {
  if (ran) *ran = false;
  std::vector<std::vector<CubeId>> cands(tree.leaf_count());
  std::int64_t count = 1;
  for (int l = 0; l < tree.leaf_count() && count <= opts.selection_cap; ++l) {
    for (int j = 0; j <= tree.depth(); ++j) {
      CubeId c = tree.ancestor_at_level(l, j);
      if (lambda[c] > 0.0 && sigma(c) > 0.0) cands[l].push_back(c);
    }
    count *= std::max<std::int64_t>(1, static_cast<std::int64_t>(cands[l].size()));
  }
  if (count > opts.selection_cap) return;
  if (ran) *ran = true;
  auto true_ratio = [&](const std::vector<double>& f) {
    double den = weighted_norm(f, sigma, p);
    if (!(den > 0.0)) return 0.0;
    return weighted_norm(apply_maximal(tree, lambda, sigma, LeafFunction(f)).values.values, omega,
                         q) /
           den;
  };
  std::vector<CubeId> sel(tree.leaf_count(), -1);
  std::vector<int> idx(tree.leaf_count(), 0);
  OptimizerOptions inner = opts.with_restarts(4);
  inner.max_iters = std::min(opts.max_iters, 120);
  while (true) {
    for (int l = 0; l < tree.leaf_count(); ++l)
      sel[l] = cands[l].empty() ? -1 : cands[l][idx[l]];
    PositiveLinearOp lin = selection_op(tree, lambda, sigma, sel);
    NormEstimate e = estimate_linear(tree, lin, sigma, omega, p, q, inner);
    if (e.value > 0.0) track.offer(true_ratio(e.witness_f.values), e.witness_f.values, 0);
    int l = 0;
    for (; l < tree.leaf_count(); ++l) {
      if (cands[l].empty()) continue;
      if (++idx[l] < static_cast<int>(cands[l].size())) break;
      idx[l] = 0;
    }
    if (l == tree.leaf_count()) break;
  }
}

/// Maximal-operator core shared by estimate_norm_maximal and the
/// maximal-pair characterization (which swaps measure roles and dual
/// exponents, so it bypasses the Instance exponent-gap validation).
inline NormEstimate estimate_maximal_core(const DyadicTree& tree, const CubeFamily& lambda,
                                          const Measure& sigma, const Measure& omega, double p,
                                          double q, const OptimizerOptions& opts) {
  NormEstimate best;
  best.witness_f = LeafFunction(tree, 0.0);
  if (degenerate(lambda, sigma, omega)) return best;
  double scale = 0.0;
  for (double v : lambda.values) scale = std::max(scale, v);
  CubeFamily unit(lambda.values);
  for (double& v : unit.values) v /= scale;

  auto ratio = [&](const std::vector<double>& f) {
    double den = weighted_norm(f, sigma, p);
    if (!(den > 0.0)) return 0.0;
    return weighted_norm(apply_maximal(tree, unit, sigma, LeafFunction(f)).values.values, omega,
                         q) /
           den;
  };
  LinearTracker track(tree);
  maximal_subgradient(tree, unit, sigma, omega, p, q, opts, track);
  maximal_enumeration(tree, unit, sigma, omega, p, q, opts, track);
  log_polish(tree, ratio, opts, track);

  best = track.best;
  if (best.value > 0.0) best.value = scale * ratio(best.witness_f.values);
  return best;
}

}  // namespace detail

/// Best-constant estimate for ||T_lambda(. sigma)||_{L^p(sigma) -> L^q(omega)}.
/// Degenerate instances (lambda, sigma or omega identically zero) report 0.
inline NormEstimate estimate_norm_summation(const Instance& inst,
                                            const OptimizerOptions& opts = {},
                                            SummationMethod method = SummationMethod::Auto) {
  return detail::estimate_summation_core(inst.tree, inst.lambda, inst.sigma, inst.omega, inst.p,
                                         inst.q, opts, method);
}

/// Best-constant estimate for ||M_lambda(. sigma)||_{L^p(sigma) -> L^q(omega)}.
inline NormEstimate estimate_norm_maximal(const Instance& inst, const OptimizerOptions& opts = {}) {
  return detail::estimate_maximal_core(inst.tree, inst.lambda, inst.sigma, inst.omega, inst.p,
                                       inst.q, opts);
}

enum class OperatorKind { Summation, Maximal };

/// Brute-force lower bound: maximizes the Rayleigh ratio over a logarithmic
/// grid per leaf (resolution points spanning 1e-3..1e3) plus every leaf-
/// subset indicator. Ground truth for estimator regression on tiny trees.
inline double grid_oracle(const Instance& inst, int resolution,
                          OperatorKind kind = OperatorKind::Summation, int leaf_cap = 4) {
  const DyadicTree& tree = inst.tree;
  int L = tree.leaf_count();
  if (L > leaf_cap) throw std::invalid_argument("grid_oracle: instance too large");
  if (resolution < 2) throw std::invalid_argument("grid_oracle: resolution must be >= 2");

  auto ratio = [&](const std::vector<double>& f) {
    LeafFunction lf(f);
    double den = lebesgue_norm(tree, lf, inst.p, inst.sigma);
    if (!(den > 0.0)) return 0.0;
    LeafFunction num = kind == OperatorKind::Summation
                           ? apply_summation(tree, inst.lambda, inst.sigma, lf)
                           : apply_maximal(tree, inst.lambda, inst.sigma, lf).values;
    return lebesgue_norm(tree, num, inst.q, inst.omega) / den;
  };

  double best = 0.0;
  for (int mask = 1; mask < (1 << L); ++mask) {
    std::vector<double> f(L, 0.0);
    for (int l = 0; l < L; ++l) f[l] = (mask >> l) & 1 ? 1.0 : 0.0;
    best = std::max(best, ratio(f));
  }
  std::vector<double> gridv(resolution);
  for (int r = 0; r < resolution; ++r)
    gridv[r] = std::pow(10.0, -3.0 + 6.0 * r / (resolution - 1));
  std::vector<int> idx(L, 0);
  std::vector<double> f(L);
  while (true) {
    for (int l = 0; l < L; ++l) f[l] = gridv[idx[l]];
    best = std::max(best, ratio(f));
    int l = 0;
    for (; l < L; ++l) {
      if (++idx[l] < resolution) break;
      idx[l] = 0;
    }
    if (l == L) break;
  }
  return best;
}

/// The two maximal-operator norms whose sum characterizes the summation
/// norm for 1 < q < p: n1 uses coefficients Lambda_Q on L^p(sigma) ->
/// L^q(omega); n2 uses (omega/sigma) Lambda_Q with the measures and the
/// dual exponents swapped.
inline std::pair<NormEstimate, NormEstimate> maximal_pair_norms(
    const DyadicTree& tree, const CubeFamily& lambda, const Measure& sigma, const Measure& omega,
    double p, double q, const OptimizerOptions& opts = {}) {
  if (!(q > 1.0 && q < p) || std::isinf(p))
    throw std::invalid_argument("maximal_pair_norms: requires 1 < q < p < inf");
  CubeFamily big = lambda_avg(tree, lambda, omega);
  NormEstimate n1 = detail::estimate_maximal_core(tree, big, sigma, omega, p, q, opts);
  CubeFamily swapped(tree, 0.0);
  for (CubeId c = 0; c < tree.cube_count(); ++c) {
    // cubes with vanishing sigma or omega never enter the bilinear form
    if (sigma(c) > 0.0 && omega(c) > 0.0) swapped[c] = big[c] * omega(c) / sigma(c);
  }
  NormEstimate n2 = detail::estimate_maximal_core(tree, swapped, omega, sigma,
                                                  holder_conjugate(q), holder_conjugate(p), opts);
  return {n1, n2};
}

enum class ExtremalKind { Verbitsky, Disjoint };

/// Randomized local search for the extremal configuration of the
/// collection condition (add/remove cubes) or the disjoint-set condition
/// (reallocate leaf fractions among ancestors). The result is a certified
/// lower bound on the respective supremum, with its witness.
inline ConditionReport search_extremal(ExtremalKind kind, const Instance& inst,
                                       const OptimizerOptions& opts = {}) {
  const DyadicTree& tree = inst.tree;
  ConditionReport rep;
  if (kind == ExtremalKind::Verbitsky) {
    rep.name = "verbitsky";
    int n = tree.cube_count();
    auto value_of = [&](const std::vector<char>& mask) {
      std::vector<CubeId> qs;
      for (CubeId c = 0; c < n; ++c)
        if (mask[c]) qs.push_back(c);
      if (qs.empty()) return 0.0;
      return verbitsky_value(tree, inst.lambda, inst.sigma, inst.omega, inst.p, inst.q,
                             CubeCollection(std::move(qs)));
    };
    std::vector<std::vector<char>> starts;
    std::vector<char> root_only(n, 0);
    root_only[0] = 1;
    starts.push_back(root_only);
    starts.push_back(std::vector<char>(n, 1));
    int random_starts = std::max(1, opts.restarts / 8);
    for (int r = 0; r < random_starts; ++r) {
      std::mt19937_64 rng(mix_seed(opts.seed, 1000 + r));
      std::vector<char> m(n, 0);
      for (CubeId c = 0; c < n; ++c) m[c] = uniform01(rng) < 0.5 ? 1 : 0;
      if (std::count(m.begin(), m.end(), char(1)) == 0) m[0] = 1;
      starts.push_back(std::move(m));
    }
    std::vector<char> best_mask = root_only;
    double best = value_of(root_only);
    for (auto& start : starts) {
      std::vector<char> mask = start;
      double cur = value_of(mask);
      bool improved = true;
      while (improved) {
        improved = false;
        for (CubeId c = 0; c < n; ++c) {
          mask[c] ^= 1;
          if (std::count(mask.begin(), mask.end(), char(1)) == 0) {
            mask[c] ^= 1;
            continue;
          }
          double v = value_of(mask);
          if (v > cur * (1.0 + 1e-12)) {
            cur = v;
            improved = true;
          } else {
            mask[c] ^= 1;
          }
        }
      }
      if (cur > best) {
        best = cur;
        best_mask = mask;
      }
    }
    std::vector<CubeId> qs;
    for (CubeId c = 0; c < n; ++c)
      if (best_mask[c]) qs.push_back(c);
    rep.value = best;
    rep.witness_collection = CubeCollection(std::move(qs));
    return rep;
  }

  rep.name = "disjoint";
  int L = tree.leaf_count();
  int D = tree.depth();
  // x[l*(D+1)+j]: share of leaf l assigned to its level-j ancestor.
  auto family_of = [&](const std::vector<double>& x) {
    DisjointFamily fam(tree);
    for (int l = 0; l < L; ++l) {
      double total = 0.0;
      for (int j = 0; j <= D; ++j) total += x[l * (D + 1) + j];
      if (total <= 0.0) continue;
      for (int j = 0; j <= D; ++j) {
        double share = x[l * (D + 1) + j] / total;
        if (share > 0.0) fam.fractions[tree.ancestor_at_level(l, j)].push_back({l, share});
      }
    }
    return fam;
  };
  auto value_of = [&](const std::vector<double>& x) {
    return disjoint_value(tree, inst.lambda, inst.sigma, inst.omega, inst.p, inst.q, family_of(x));
  };
  std::vector<std::vector<double>> starts;
  for (int j = 0; j <= D; ++j) {
    std::vector<double> x(L * (D + 1), 0.0);
    for (int l = 0; l < L; ++l) x[l * (D + 1) + j] = 1.0;
    starts.push_back(std::move(x));
  }
  int random_starts = std::max(1, opts.restarts / 8);
  for (int r = 0; r < random_starts; ++r) {
    std::mt19937_64 rng(mix_seed(opts.seed, 2000 + r));
    std::vector<double> x(L * (D + 1));
    for (double& v : x) v = exp_sample(rng);
    starts.push_back(std::move(x));
  }
  double best = 0.0;
  std::vector<double> best_x = starts[0];
  for (auto& start : starts) {
    std::vector<double> x = start;
    double cur = value_of(x);
    bool improved = true;
    int sweeps = 0;
    while (improved && sweeps++ < 50) {
      improved = false;
      for (int l = 0; l < L; ++l) {
        for (int j = 0; j <= D; ++j) {
          for (int k = 0; k <= D; ++k) {
            if (k == j || x[l * (D + 1) + j] <= 0.0) continue;
            std::vector<double> xn = x;
            double delta = xn[l * (D + 1) + j];
            xn[l * (D + 1) + j] = 0.0;
            xn[l * (D + 1) + k] += delta;
            double v = value_of(xn);
            if (v > cur * (1.0 + 1e-12)) {
              x = std::move(xn);
              cur = v;
              improved = true;
            }
          }
        }
      }
    }
    if (cur > best) {
      best = cur;
      best_x = x;
    }
  }
  rep.value = best;
  rep.witness_family = family_of(best_x);
  return rep;
}

/// Optimization estimate of the least constant in the multiplier
/// characterization's assertion (ii): sup over families a of
/// ||{m_Q a_Q}||_{f^{1,inf}(omega)} / ||a||_{f^{1,inf}(sigma)}.
/// Seeded with every per-cube indicator family {R <= Q}, which already
/// attains the assertion-(i) value.
inline AscentResult multiplier_bilinear_constant(const DyadicTree& tree, const CubeFamily& m,
                                                 const Measure& sigma, const Measure& omega,
                                                 const OptimizerOptions& opts = {}) {
  int n = tree.cube_count();
  LPExponents one_inf(1.0, kInf);
  auto objective = [&](const std::vector<double>& a) {
    CubeFamily fa{a};
    double den = lp_norm(tree, fa, one_inf, sigma);
    if (!(den > 0.0) || std::isinf(den)) return 0.0;
    CubeFamily ma(tree, 0.0);
    for (CubeId c = 0; c < n; ++c) ma[c] = m[c] * fa[c];
    return lp_norm(tree, ma, one_inf, omega) / den;
  };
  std::vector<std::vector<double>> seeds;
  for (CubeId q = 0; q < n; ++q) {
    std::vector<double> a(n, 1e-300);
    collect_subtree(tree, q, [&](CubeId r) { a[r] = 1.0; });
    seeds.push_back(std::move(a));
  }
  return maximize_positive(n, objective, seeds, opts);
}

}  // namespace dytw
