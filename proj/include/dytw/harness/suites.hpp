#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "dytw/harness/generate.hpp"
#include "dytw/harness/report.hpp"
#include "dytw/harness/serialize.hpp"
#include "dytw/lp_dual.hpp"
#include "dytw/norm_estim.hpp"

namespace dytw {

/// Knobs shared by every suite; instance counts are fixed per suite.
struct SuiteConfig {
  std::uint64_t seed = 20240801;
  int restarts = 24;
  int max_iters = 250;

  OptimizerOptions optimizer(std::uint64_t stream) const {
    OptimizerOptions o;
    o.restarts = restarts;
    o.max_iters = max_iters;
    o.seed = mix_seed(seed, stream);
    return o;
  }
};

struct SuiteResult {
  std::string name;
  bool passed = true;
  std::vector<std::string> lines;  // human-readable findings
  std::string csv;                 // machine-readable rows, header first

  void note(const std::string& line) { lines.push_back(line); }
  void require(bool ok, const std::string& line) {
    if (!ok) {
      passed = false;
      lines.push_back("FAIL: " + line);
    }
  }
};

namespace detail {

inline Instance suite_instance(const SuiteConfig& cfg, int index, double p, double q,
                               bool equal_measures = false) {
  InstanceSpec spec;
  spec.dimension = 1;
  spec.depth = 2 + index % 3;
  spec.sigma_gen = index % 7 == 3 ? MeasureGen::SingleHeavyLeaf : MeasureGen::IndependentExponential;
  spec.omega_gen = index % 11 == 5 ? MeasureGen::SingleHeavyLeaf : MeasureGen::IndependentExponential;
  spec.lambda_gen = LambdaGen::RandomSparse;
  spec.lambda_density = 0.5;
  spec.p = p;
  spec.q = q;
  spec.seed = mix_seed(cfg.seed, 7000 + index);
  Instance inst = generate_instance(spec);
  if (!equal_measures) return inst;
  return Instance(inst.tree, inst.sigma, inst.sigma, inst.lambda, p, q);
}

/// Selection-enumeration value on its own (no subgradient), used as the
/// oracle for the maximal estimator; 0 when the cap was exceeded.
inline double enumeration_value(const Instance& inst, const OptimizerOptions& opts) {
  double scale = 0.0;
  for (double v : inst.lambda.values) scale = std::max(scale, v);
  if (scale == 0.0) return 0.0;
  CubeFamily unit(inst.lambda.values);
  for (double& v : unit.values) v /= scale;
  LinearTracker track(inst.tree);
  bool ran = false;
  maximal_enumeration(inst.tree, unit, inst.sigma, inst.omega, inst.p, inst.q, opts, track, &ran);
  return ran ? scale * track.best.value : 0.0;
}

}  // namespace detail

/// Criterion 1: closed-form anchors m^{1/q-1/p} for single-cube lambda.
inline SuiteResult suite_anchors(const SuiteConfig& cfg) {
  SuiteResult res;
  res.name = "anchors";
  res.csv = csv_row({"m", "p", "q", "expect", "estimate_T", "estimate_M", "S", "N", "max_rel_err"});
  double worst = 0.0;
  int idx = 0;
  for (double m : {2.0, 4.0, 8.0}) {
    for (auto& pq : {std::pair{2.0, 1.0}, std::pair{3.0, 2.0}, std::pair{2.0, 0.5}}) {
      Instance inst = single_cube_uniform_instance(m, pq.first, pq.second);
      double expect = std::pow(m, 1.0 / pq.second - 1.0 / pq.first);
      OptimizerOptions opt = cfg.optimizer(100 + idx++);
      double est_t = estimate_norm_summation(inst, opt).value;
      double est_m = estimate_norm_maximal(inst, opt).value;
      double rel = 0.0;
      std::vector<double> svals, nvals;
      for (double frac : {0.25, 0.5}) {
        auto [s, n] = maximal_condition_values(inst.tree, inst.lambda, inst.sigma, inst.omega,
                                               inst.p, inst.q, frac * inst.q);
        svals.push_back(s);
        nvals.push_back(n);
        rel = std::max({rel, std::abs(s - expect) / expect, std::abs(n - expect) / expect});
      }
      rel = std::max({rel, std::abs(est_t - expect) / expect, std::abs(est_m - expect) / expect});
      worst = std::max(worst, rel);
      res.require(rel <= 1e-4, "anchor m=" + format_double(m) + " p=" + format_double(pq.first) +
                                   " q=" + format_double(pq.second) +
                                   " rel_err=" + format_double(rel));
      res.csv += csv_row({format_double(m), format_double(pq.first), format_double(pq.second),
                          format_double(expect), format_double(est_t), format_double(est_m),
                          format_double(svals[0]), format_double(nvals[0]), format_double(rel)});
    }
  }
  res.note("max relative error " + format_double(worst) + " (tolerance 1e-4)");
  return res;
}

/// Criterion 2: estimators within 2% of the brute-force oracles on tiny
/// trees (grid for the summation operator, selection enumeration for the
/// maximal operator).
inline SuiteResult suite_oracle(const SuiteConfig& cfg) {
  SuiteResult res;
  res.name = "oracle";
  res.csv = csv_row({"digest", "p", "q", "grid_oracle", "estimate_T", "rel_T", "enum_value",
                     "estimate_M", "rel_M"});
  const std::pair<double, double> exps[] = {{2.0, 1.0}, {3.0, 2.0}, {2.0, 0.8}, {2.0, 0.5},
                                            {3.0, 1.5}};
  double worst_t = 0.0, worst_m = 0.0;
  for (int i = 0; i < 20; ++i) {
    auto [p, q] = exps[i % 5];
    InstanceSpec spec;
    spec.dimension = 1;
    spec.depth = 1 + i % 2;  // at most 4 leaves
    spec.lambda_gen = LambdaGen::RandomSparse;
    spec.lambda_density = 0.6;
    spec.p = p;
    spec.q = q;
    spec.seed = mix_seed(cfg.seed, 7100 + i);
    Instance inst = generate_instance(spec);
    OptimizerOptions opt = cfg.optimizer(200 + i);
    double oracle = grid_oracle(inst, 60);
    double est_t = estimate_norm_summation(inst, opt).value;
    double rel_t = oracle > 0.0 ? std::abs(est_t - oracle) / oracle : 0.0;
    double enum_v = detail::enumeration_value(inst, opt);
    double est_m = estimate_norm_maximal(inst, opt).value;
    double rel_m = enum_v > 0.0 ? std::abs(est_m - enum_v) / enum_v : 0.0;
    worst_t = std::max(worst_t, rel_t);
    worst_m = std::max(worst_m, rel_m);
    res.require(rel_t <= 0.02, "summation estimate off oracle by " + format_double(rel_t) +
                                   " on instance " + std::to_string(i));
    res.require(rel_m <= 0.02, "maximal estimate off enumeration by " + format_double(rel_m) +
                                   " on instance " + std::to_string(i));
    res.csv += csv_row({instance_digest(inst), format_double(p), format_double(q),
                        format_double(oracle), format_double(est_t), format_double(rel_t),
                        format_double(enum_v), format_double(est_m), format_double(rel_m)});
  }
  res.note("max deviation: summation " + format_double(worst_t) + ", maximal " +
           format_double(worst_m) + " (tolerance 0.02)");
  return res;
}

/// Criterion 3: the scale of conditions brackets the maximal norm with
/// K = 100, and Lambda^sup monotonicity in gamma holds cube-wise.
inline SuiteResult suite_prop21(const SuiteConfig& cfg) {
  SuiteResult res;
  res.name = "prop21";
  res.csv = csv_row({"digest", "p", "q", "eps", "S", "N", "estimate_M", "N_over_M", "M_over_S"});
  const double K = 100.0;
  double max_nm = 0.0, max_ms = 0.0;
  const std::tuple<double, double, double> configs[] = {{2.0, 1.0, 0.25}, {3.0, 2.0, 0.5}};
  for (int i = 0; i < 200; ++i) {
    Instance shape = detail::suite_instance(cfg, i, 2.0, 1.0);
    for (auto& [p, q, eps] : configs) {
      Instance inst(shape.tree, shape.sigma, shape.omega, shape.lambda, p, q);
      auto [s, n] = maximal_condition_values(inst.tree, inst.lambda, inst.sigma, inst.omega, p, q,
                                             eps);
      double est = estimate_norm_maximal(inst, cfg.optimizer(300 + i)).value;
      double nm = est > 0.0 ? n / est : (n > 0.0 ? kInf : 0.0);
      double ms = s > 0.0 ? est / s : (est > 0.0 ? kInf : 0.0);
      max_nm = std::max(max_nm, nm);
      max_ms = std::max(max_ms, ms);
      res.require(nm <= K, "N exceeds K*estimate on instance " + std::to_string(i) +
                               " (ratio " + format_double(nm) + ")");
      res.require(ms <= K, "estimate exceeds K*S on instance " + std::to_string(i) + " (ratio " +
                               format_double(ms) + ")");
      // gamma-monotonicity of the localized averages, cube by cube
      const double gammas[] = {0.25 * q, 0.5 * q, q - eps, q, 1.5 * q, 2.0 * q};
      CubeFamily prev(inst.tree, 0.0);
      bool first = true;
      for (double g : gammas) {
        CubeFamily cur = lambda_gamma(inst.tree, inst.lambda, inst.omega, g, RhoMode::Sup);
        if (!first) {
          for (CubeId c = 0; c < inst.tree.cube_count(); ++c)
            res.require(cur[c] >= prev[c] * (1.0 - 1e-9),
                        "Lambda^sup not monotone in gamma at cube " + inst.tree.path(c));
        }
        prev = cur;
        first = false;
      }
      res.csv += csv_row({instance_digest(inst), format_double(p), format_double(q),
                          format_double(eps), format_double(s), format_double(n),
                          format_double(est), format_double(nm), format_double(ms)});
    }
  }
  res.note("max N/estimate " + format_double(max_nm) + ", max estimate/S " + format_double(max_ms) +
           " (K = 100)");
  return res;
}

/// Criterion 4: under sigma = omega both Fujii-Wilson characteristics are
/// 1 and the integral expression tracks the summation norm within 50.
inline SuiteResult suite_prop22(const SuiteConfig& cfg) {
  SuiteResult res;
  res.name = "prop22";
  res.csv = csv_row({"digest", "p", "q", "estimate_T", "I", "Istar", "T_over_I", "I_over_T"});
  double band_lo = kInf, band_hi = 0.0;
  const std::pair<double, double> configs[] = {{2.0, 0.5}, {3.0, 2.0}};
  for (int i = 0; i < 200; ++i) {
    Instance shape = detail::suite_instance(cfg, i, 2.0, 0.5, /*equal_measures=*/true);
    for (auto& [p, q] : configs) {
      Instance inst(shape.tree, shape.sigma, shape.omega, shape.lambda, p, q);
      double fw = fw_characteristic(inst.tree, inst.sigma, inst.omega);
      res.require(std::abs(fw - 1.0) <= 1e-9, "FW characteristic must be 1 when sigma = omega");
      double est = estimate_norm_summation(inst, cfg.optimizer(400 + i)).value;
      double I = integral_condition(inst.tree, inst.lambda, inst.sigma, inst.omega, p, q, false);
      double Istar = integral_condition(inst.tree, inst.lambda, inst.sigma, inst.omega, p, q, true);
      if (est == 0.0 && I == 0.0) continue;
      double hi = est / I, lo = I / est;
      band_lo = std::min(band_lo, est / I);
      band_hi = std::max(band_hi, est / I);
      res.require(hi <= 50.0 && lo <= 50.0, "T vs I outside factor 50 on instance " +
                                                std::to_string(i) + " (T/I " + format_double(hi) +
                                                ")");
      if (q > 1.0) {
        double hi2 = est / Istar, lo2 = Istar / est;
        res.require(hi2 <= 50.0 && lo2 <= 50.0, "T vs I* outside factor 50 on instance " +
                                                    std::to_string(i));
      }
      res.csv += csv_row({instance_digest(inst), format_double(p), format_double(q),
                          format_double(est), format_double(I), format_double(Istar),
                          format_double(hi), format_double(lo)});
    }
  }
  res.note("T/I band [" + format_double(band_lo) + ", " + format_double(band_hi) +
           "] (allowed [1/50, 50])");
  return res;
}

/// Criterion 5: maximal-pair characterization at (3,2).
inline SuiteResult suite_prop23(const SuiteConfig& cfg) {
  SuiteResult res;
  res.name = "prop23";
  res.csv = csv_row({"digest", "estimate_T", "n1", "n2", "T_over_pair"});
  std::vector<double> ratios;
  for (int i = 0; i < 100; ++i) {
    Instance inst = detail::suite_instance(cfg, i, 3.0, 2.0);
    OptimizerOptions opt = cfg.optimizer(500 + i);
    double est = estimate_norm_summation(inst, opt).value;
    auto [n1, n2] = maximal_pair_norms(inst.tree, inst.lambda, inst.sigma, inst.omega, 3.0, 2.0,
                                       opt);
    double pair = n1.value + n2.value;
    if (est == 0.0 && pair == 0.0) continue;
    double ratio = est / pair;
    ratios.push_back(ratio);
    res.require(ratio >= 1.0 / 50.0 && ratio <= 50.0,
                "T/(n1+n2) outside [1/50, 50] on instance " + std::to_string(i) + " (" +
                    format_double(ratio) + ")");
    res.csv += csv_row({instance_digest(inst), format_double(est), format_double(n1.value),
                        format_double(n2.value), format_double(ratio)});
  }
  std::sort(ratios.begin(), ratios.end());
  if (!ratios.empty())
    res.note("T/(n1+n2): min " + format_double(ratios.front()) + ", median " +
             format_double(ratios[ratios.size() / 2]) + ", max " + format_double(ratios.back()));
  return res;
}

/// Criterion 6: Wolff potential conditions scale linearly in lambda and
/// track the summation norm within two orders of magnitude at (3,2).
inline SuiteResult suite_wolff(const SuiteConfig& cfg) {
  SuiteResult res;
  res.name = "wolff";
  res.csv = csv_row({"digest", "estimate_T", "V1", "V2", "T_over_maxV"});
  double band_lo = kInf, band_hi = 0.0;
  for (int i = 0; i < 100; ++i) {
    Instance inst = detail::suite_instance(cfg, i, 3.0, 2.0);
    auto [v1, v2] = wolff_condition(inst.tree, inst.lambda, inst.sigma, inst.omega, 3.0, 2.0);
    CubeFamily doubled = inst.lambda;
    for (double& v : doubled.values) v *= 2.0;
    auto [w1, w2] = wolff_condition(inst.tree, doubled, inst.sigma, inst.omega, 3.0, 2.0);
    if (v1 > 0.0)
      res.require(std::abs(w1 - 2.0 * v1) <= 1e-12 * w1, "V1 homogeneity failed at instance " +
                                                             std::to_string(i));
    if (v2 > 0.0)
      res.require(std::abs(w2 - 2.0 * v2) <= 1e-12 * w2, "V2 homogeneity failed at instance " +
                                                             std::to_string(i));
    double est = estimate_norm_summation(inst, cfg.optimizer(600 + i)).value;
    double maxv = std::max(v1, v2);
    if (est == 0.0 && maxv == 0.0) continue;
    double ratio = est / maxv;
    band_lo = std::min(band_lo, ratio);
    band_hi = std::max(band_hi, ratio);
    res.require(ratio >= 0.01 && ratio <= 100.0, "T/max(V1,V2) outside [1/100, 100] on instance " +
                                                     std::to_string(i) + " (" +
                                                     format_double(ratio) + ")");
    res.csv += csv_row({instance_digest(inst), format_double(est), format_double(v1),
                        format_double(v2), format_double(ratio)});
  }
  res.note("T/max(V1,V2) band [" + format_double(band_lo) + ", " + format_double(band_hi) + "]");
  return res;
}

/// Criterion 7: exact Holder direction and the duality reverse direction.
inline SuiteResult suite_holder_direction(const SuiteConfig& cfg) {
  SuiteResult res;
  res.name = "holder-direction";
  res.csv = csv_row({"sample", "p", "q", "pairing", "norm_product", "dual", "norm",
                     "dual_over_norm"});
  double min_dual_ratio = kInf;
  for (int i = 0; i < 200; ++i) {
    DyadicTree tree = build_tree(1, 2 + i % 3);
    std::mt19937_64 rng(mix_seed(cfg.seed, 7200 + i));
    std::vector<double> masses(tree.leaf_count());
    for (double& x : masses) x = exp_sample(rng);
    Measure mu(tree, masses);
    CubeFamily a(tree, 0.0), b(tree, 0.0);
    for (CubeId c = 0; c < tree.cube_count(); ++c) {
      a[c] = uniform01(rng) < 0.25 ? 0.0 : exp_sample(rng);
      b[c] = uniform01(rng) < 0.25 ? 0.0 : exp_sample(rng);
    }
    LPExponents e = i % 2 == 0 ? LPExponents(2.0, 2.0) : LPExponents(3.0, 1.5);
    LPExponents ec = e.conjugate();
    double pairing = lp_pairing(tree, a, b, mu);
    double prod = lp_norm(tree, a, e, mu) * lp_norm(tree, b, ec, mu);
    res.require(pairing <= prod * (1.0 + 1e-9), "Holder direction violated at sample " +
                                                    std::to_string(i));
    OptimizerOptions opt = cfg.optimizer(700 + i);
    opt.restarts = std::min(cfg.restarts, 12);
    double norm = lp_norm(tree, a, e, mu);
    double dual = lp_dual_norm(tree, a, e, mu, opt).value;
    double ratio = norm > 0.0 ? dual / norm : 1.0;
    min_dual_ratio = std::min(min_dual_ratio, ratio);
    res.require(dual >= norm / 16.0, "dual estimate below norm/16 at sample " + std::to_string(i) +
                                         " (ratio " + format_double(ratio) + ")");
    res.require(dual <= norm * (1.0 + 1e-9), "dual estimate exceeds the norm at sample " +
                                                 std::to_string(i));
    res.csv += csv_row({std::to_string(i), format_double(e.p), format_double(e.q),
                        format_double(pairing), format_double(prod), format_double(dual),
                        format_double(norm), format_double(ratio)});
  }
  res.note("min dual/norm ratio " + format_double(min_dual_ratio) + " (must stay above 1/16)");
  return res;
}

/// Criterion 8: Carleson families extract sparse witnesses at the
/// Carleson norm; the tight two-level fixture fails below it.
inline SuiteResult suite_sparse_carleson(const SuiteConfig& cfg) {
  SuiteResult res;
  res.name = "sparse-carleson";
  res.csv = csv_row({"sample", "carleson", "feasible", "max_mass_deficit"});
  for (int i = 0; i < 100; ++i) {
    DyadicTree tree = build_tree(1, 2 + i % 3);
    std::mt19937_64 rng(mix_seed(cfg.seed, 7300 + i));
    std::vector<double> masses(tree.leaf_count());
    for (double& x : masses) x = uniform01(rng) < 0.15 ? 0.0 : exp_sample(rng);
    Measure mu(tree, masses);
    CubeFamily b(tree, 0.0);
    for (CubeId c = 0; c < tree.cube_count(); ++c)
      b[c] = uniform01(rng) < 0.3 ? 0.0 : exp_sample(rng);
    CarlesonNorm cn = carleson_norm(tree, b, mu);
    if (cn.value == 0.0) continue;
    double C = cn.value * (1.0 + 1e-9);
    SparseExtract se = sparse_extract(tree, b, mu, C);
    res.require(se.feasible, "extraction infeasible at the Carleson norm, sample " +
                                 std::to_string(i));
    double deficit = 0.0;
    if (se.feasible) {
      se.family.validate(tree, 1e-12);
      for (CubeId c = 0; c < tree.cube_count(); ++c) {
        double need = b[c] * mu(c) / C;
        if (need > 0.0)
          deficit = std::max(deficit, (need - se.family.set_mass(mu, c)) / need);
      }
      res.require(deficit <= 1e-9, "sparse mass bound missed by " + format_double(deficit));
    }
    res.csv += csv_row({std::to_string(i), format_double(cn.value), se.feasible ? "1" : "0",
                        format_double(deficit)});
  }
  // tight fixture: demands 4/3 + 2/3 exhaust the root at C = 0.75
  DyadicTree t2 = build_tree(1, 1);
  Measure mu2(t2, {1.0, 1.0});
  CubeFamily b2(t2, 0.0);
  b2[0] = 0.5;
  b2[t2.cube_at(1, 0)] = 0.5;
  double cn2 = carleson_norm(t2, b2, mu2).value;
  res.require(sparse_extract(t2, b2, mu2, cn2 * (1.0 + 1e-9)).feasible,
              "tight fixture must extract at its Carleson norm");
  res.require(!sparse_extract(t2, b2, mu2, 0.8 * cn2).feasible,
              "tight fixture must fail at 0.8x the Carleson norm");
  res.note("tight fixture carleson " + format_double(cn2));
  return res;
}

/// Criterion 9: the multiplier test at the density-ratio family equals the
/// Fujii-Wilson characteristic exactly; the optimization estimate of the
/// assertion-(ii) constant stays within factor 16.
inline SuiteResult suite_multiplier(const SuiteConfig& cfg) {
  SuiteResult res;
  res.name = "multiplier";
  res.csv = csv_row({"digest", "fw", "multiplier_test", "bilinear_estimate"});
  for (int i = 0; i < 100; ++i) {
    Instance inst = detail::suite_instance(cfg, i, 2.0, 1.0);
    CubeFamily m = density_ratio_family(inst.tree, inst.sigma, inst.omega);
    double fw = fw_characteristic(inst.tree, inst.sigma, inst.omega);
    double mt = multiplier_test(inst.tree, m, inst.sigma, inst.omega);
    res.require(mt == fw, "multiplier_test at the ratio family must equal fw exactly");
    double bil = std::numeric_limits<double>::quiet_NaN();
    if (i < 5) {
      OptimizerOptions opt = cfg.optimizer(800 + i);
      opt.restarts = std::min(cfg.restarts, 8);
      bil = multiplier_bilinear_constant(inst.tree, m, inst.sigma, inst.omega, opt).value;
      res.require(bil >= fw / 16.0 && bil <= fw * (1.0 + 1e-6),
                  "assertion-(ii) estimate out of band at instance " + std::to_string(i));
    }
    res.csv += csv_row({instance_digest(inst), format_double(fw), format_double(mt),
                        format_double(bil)});
  }
  return res;
}

/// Criterion 10: equivalent expressions collapse on single cubes and stay
/// comparable within 32 at p = 2.
inline SuiteResult suite_lemma34(const SuiteConfig& cfg) {
  SuiteResult res;
  res.name = "lemma34";
  res.csv = csv_row({"sample", "e1", "e2", "e3", "max_pairwise_ratio"});
  {
    DyadicTree tree = build_tree(1, 2);
    Measure mu(tree, {1.0, 1.0, 1.0, 1.0});
    CubeFamily a(tree, 0.0);
    a[0] = 0.75;
    EquivalentExpressions e = equivalent_expressions(tree, a, 2.0, mu);
    res.require(e.e1 == e.e2 && e.e1 == e.e3, "single-cube expressions must agree exactly");
  }
  double worst = 1.0;
  for (int i = 0; i < 200; ++i) {
    DyadicTree tree = build_tree(1, 2 + i % 3);
    std::mt19937_64 rng(mix_seed(cfg.seed, 7400 + i));
    std::vector<double> masses(tree.leaf_count());
    for (double& x : masses) x = uniform01(rng) < 0.1 ? 0.0 : exp_sample(rng);
    Measure mu(tree, masses);
    CubeFamily a(tree, 0.0);
    for (CubeId c = 0; c < tree.cube_count(); ++c)
      a[c] = uniform01(rng) < 0.3 ? 0.0 : exp_sample(rng);
    EquivalentExpressions e = equivalent_expressions(tree, a, 2.0, mu);
    double ratio = 1.0;
    if (e.e1 > 0.0) {
      double hi = std::max({e.e1, e.e2, e.e3});
      double lo = std::min({e.e1, e.e2, e.e3});
      ratio = hi / lo;
      worst = std::max(worst, ratio);
      res.require(ratio <= 32.0, "pairwise ratio above 32 at sample " + std::to_string(i));
    }
    res.csv += csv_row({std::to_string(i), format_double(e.e1), format_double(e.e2),
                        format_double(e.e3), format_double(ratio)});
  }
  res.note("max pairwise ratio " + format_double(worst) + " (bound 32)");
  return res;
}

/// Criterion 11: dyadic Hardy-Littlewood maximal inequality with the p'
/// constant, exact.
inline SuiteResult suite_hl_maximal(const SuiteConfig& cfg) {
  SuiteResult res;
  res.name = "hl-maximal";
  res.csv = csv_row({"sample", "p", "lhs", "rhs_with_constant", "ratio"});
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    DyadicTree tree = build_tree(1, 2 + i % 3);
    std::mt19937_64 rng(mix_seed(cfg.seed, 7500 + i));
    std::vector<double> masses(tree.leaf_count());
    for (double& x : masses) x = uniform01(rng) < 0.15 ? 0.0 : exp_sample(rng);
    Measure mu(tree, masses);
    LeafFunction f(tree, 0.0);
    for (int l = 0; l < tree.leaf_count(); ++l)
      f[l] = uniform01(rng) < 0.2 ? 0.0 : exp_sample(rng);
    double p = i % 3 == 0 ? 1.5 : (i % 3 == 1 ? 2.0 : 4.0);
    double pc = p / (p - 1.0);
    double lhs = lebesgue_norm(tree, hl_maximal(tree, f, mu), p, mu);
    double rhs = pc * lebesgue_norm(tree, f, p, mu);
    double ratio = rhs > 0.0 ? lhs / rhs : 0.0;
    worst = std::max(worst, ratio);
    res.require(lhs <= rhs * (1.0 + 1e-12), "HL inequality violated at sample " +
                                                std::to_string(i));
    res.csv += csv_row({std::to_string(i), format_double(p), format_double(lhs),
                        format_double(rhs), format_double(ratio)});
  }
  res.note("max ||Mf||/(p'||f||) " + format_double(worst) + " (must be <= 1)");
  return res;
}

inline SuiteResult run_suite(const std::string& name, const SuiteConfig& cfg);

/// Criterion 12: identical seeds reproduce byte-identical CSV reports,
/// and instance serialization round-trips exactly.
inline SuiteResult suite_determinism(const SuiteConfig& cfg) {
  SuiteResult res;
  res.name = "determinism";
  res.csv = csv_row({"check", "identical"});
  for (const char* suite : {"hl-maximal", "lemma34", "anchors"}) {
    SuiteResult first = run_suite(suite, cfg);
    SuiteResult second = run_suite(suite, cfg);
    bool same = first.csv == second.csv;
    res.require(same, std::string(suite) + " CSV differs between identical-seed runs");
    res.csv += csv_row({suite, same ? "1" : "0"});
  }
  InstanceSpec spec;
  spec.depth = 3;
  spec.seed = mix_seed(cfg.seed, 9001);
  spec.p = 3.0;
  spec.q = 2.0;
  Instance inst = generate_instance(spec);
  std::string once = instance_to_json(inst).dump();
  std::string twice = instance_to_json(instance_from_json(nlohmann::json::parse(once))).dump();
  bool same = once == twice;
  res.require(same, "instance serialization round-trip changed the file");
  res.csv += csv_row({"instance-roundtrip", same ? "1" : "0"});
  return res;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "anchors",   "oracle", "prop21",     "prop22",          "prop23",  "wolff",
      "holder-direction", "sparse-carleson", "multiplier", "lemma34", "hl-maximal",
      "determinism"};
  return names;
}

inline SuiteResult run_suite(const std::string& name, const SuiteConfig& cfg) {
  if (name == "anchors") return suite_anchors(cfg);
  if (name == "oracle") return suite_oracle(cfg);
  if (name == "prop21") return suite_prop21(cfg);
  if (name == "prop22") return suite_prop22(cfg);
  if (name == "prop23") return suite_prop23(cfg);
  if (name == "wolff") return suite_wolff(cfg);
  if (name == "holder-direction") return suite_holder_direction(cfg);
  if (name == "sparse-carleson") return suite_sparse_carleson(cfg);
  if (name == "multiplier") return suite_multiplier(cfg);
  if (name == "lemma34") return suite_lemma34(cfg);
  if (name == "hl-maximal") return suite_hl_maximal(cfg);
  if (name == "determinism") return suite_determinism(cfg);
  std::string known;
  for (auto& n : suite_names()) known += (known.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown suite '" + name + "'; available: " + known);
}

}  // namespace dytw
