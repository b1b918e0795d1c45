#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dytw/lp_dual.hpp"
#include "dytw/lp_space.hpp"
#include "dytw/measure.hpp"
#include "dytw/optim.hpp"
#include "dytw/tree.hpp"

using namespace dytw;

namespace {

// Naive reference for every exponent regime: ancestors collected by hand,
// powers applied termwise. Independent of the lp_norm implementation path.
double lp_norm_reference(const DyadicTree& t, const CubeFamily& a, double p, double q,
                         const Measure& mu) {
  auto inner_at_leaf = [&](int l) {
    if (std::isinf(q)) {
      double m = 0.0;
      for (int j = 0; j <= t.depth(); ++j) m = std::max(m, a[t.ancestor_at_level(l, j)]);
      return m;
    }
    double s = 0.0;
    for (int j = 0; j <= t.depth(); ++j) s += std::pow(a[t.ancestor_at_level(l, j)], q);
    return std::pow(s, 1.0 / q);
  };
  if (std::isinf(p) && std::isinf(q)) {
    double m = 0.0;
    for (CubeId c = 0; c < t.cube_count(); ++c) m = std::max(m, a[c]);
    return m;
  }
  if (std::isinf(p)) {
    double best = 0.0;
    for (CubeId c = 0; c < t.cube_count(); ++c) {
      if (mu(c) == 0.0) continue;
      double s = 0.0;
      for (CubeId r = 0; r < t.cube_count(); ++r) {
        bool inside = t.level(r) >= t.level(c) &&
                      t.leaf_begin(r) >= t.leaf_begin(c) && t.leaf_end(r) <= t.leaf_end(c);
        if (inside) s += std::pow(a[r], q) * mu(r);
      }
      best = std::max(best, std::pow(s / mu(c), 1.0 / q));
    }
    return best;
  }
  double acc = 0.0;
  for (int l = 0; l < t.leaf_count(); ++l)
    acc += mu.leaf_mass(l) * std::pow(inner_at_leaf(l), p);
  return std::pow(acc, 1.0 / p);
}

CubeFamily random_family(const DyadicTree& t, std::mt19937_64& rng, bool strictly_positive) {
  CubeFamily a(t, 0.0);
  for (CubeId c = 0; c < t.cube_count(); ++c) {
    double v = exp_sample(rng);
    a[c] = strictly_positive ? v + 0.05 : (uniform01(rng) < 0.25 ? 0.0 : v);
  }
  return a;
}

Measure random_measure(const DyadicTree& t, std::mt19937_64& rng) {
  std::vector<double> m(t.leaf_count());
  for (double& x : m) x = exp_sample(rng);
  return Measure(t, m);
}

}  // namespace

TEST(LpExponents, Validation) {
  EXPECT_THROW(LPExponents(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(LPExponents(2.0, 0.0), std::invalid_argument);
  EXPECT_NO_THROW(LPExponents(2.0, -1.0));
  LPExponents e(2.0, 2.0);
  EXPECT_DOUBLE_EQ(e.conjugate().p, 2.0);
  EXPECT_DOUBLE_EQ(holder_conjugate(1.0), kInf);
  EXPECT_DOUBLE_EQ(holder_conjugate(kInf), 1.0);
  EXPECT_DOUBLE_EQ(holder_conjugate(3.0), 1.5);
}

TEST(LpNorm, SingleCubeCollapse) {
  DyadicTree t = build_tree(1, 2);
  Measure mu(t, {0.5, 0.5, 0.5, 0.5});
  CubeFamily a(t, 0.0);
  a[0] = 1.0;
  EXPECT_NEAR(lp_norm(t, a, {2.0, 7.0}, mu), std::sqrt(2.0), 1e-12);
}

TEST(LpNorm, InfOneEqualsCarlesonExpression) {
  DyadicTree t = build_tree(1, 3);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    CubeFamily a = random_family(t, rng, false);
    Measure mu = random_measure(t, rng);
    double direct = 0.0;
    for (CubeId c = 0; c < t.cube_count(); ++c) {
      if (mu(c) == 0.0) continue;
      double s = 0.0;
      for (CubeId r = 0; r < t.cube_count(); ++r) {
        bool inside = t.level(r) >= t.level(c) &&
                      t.leaf_begin(r) >= t.leaf_begin(c) && t.leaf_end(r) <= t.leaf_end(c);
        if (inside) s += a[r] * mu(r);
      }
      direct = std::max(direct, s / mu(c));
    }
    EXPECT_NEAR(lp_norm(t, a, {kInf, 1.0}, mu), direct, 1e-12 * (1.0 + direct));
  }
}

TEST(LpNorm, NegativeExponentFixtureFrozen) {
  // depth-2 fixture, strictly positive a, q = -1, p = 2.
  DyadicTree t = build_tree(1, 2);
  Measure mu(t, {1.0, 1.0, 1.0, 1.0});
  CubeFamily a(t, 0.0);
  a[t.cube_from_path("0:0")] = 1.0;
  a[t.cube_from_path("1:0")] = 0.5;
  a[t.cube_from_path("1:1")] = 2.0;
  a[t.cube_from_path("2:0")] = 1.5;
  a[t.cube_from_path("2:1")] = 1.0;
  a[t.cube_from_path("2:2")] = 0.25;
  a[t.cube_from_path("2:3")] = 3.0;
  double got = lp_norm(t, a, {2.0, -1.0}, mu);
  EXPECT_NEAR(got, 0.6837094980223328, 1e-12);
  EXPECT_NEAR(got, lp_norm_reference(t, a, 2.0, -1.0, mu), 1e-12);
}

TEST(LpNorm, MatchesReferenceAcrossRegimes) {
  DyadicTree t = build_tree(1, 3);
  std::mt19937_64 rng(21);
  const double regimes[][2] = {{0.7, 1.3}, {2.0, 2.0}, {3.0, 0.5},  {2.0, kInf},
                               {kInf, 2.0}, {kInf, kInf}, {1.0, 1.0}, {2.5, -0.5}};
  for (int trial = 0; trial < 10; ++trial) {
    CubeFamily a = random_family(t, rng, true);
    Measure mu = random_measure(t, rng);
    for (auto& pq : regimes) {
      double ref = lp_norm_reference(t, a, pq[0], pq[1], mu);
      double got = lp_norm(t, a, {pq[0], pq[1]}, mu);
      EXPECT_NEAR(got, ref, 1e-9 * (1.0 + ref)) << "p=" << pq[0] << " q=" << pq[1];
    }
  }
}

TEST(LpNorm, ZeroUnderNegativeQLimitConvention) {
  DyadicTree t = build_tree(1, 1);
  Measure mu(t, {1.0, 1.0});
  CubeFamily a(t, 1.0);
  a[t.cube_at(1, 0)] = 0.0;  // zero on a positive-mass region
  // leaves under the zero cube contribute 0 in the (p,q) finite case
  double v = lp_norm(t, a, {2.0, -2.0}, mu);
  double expect = std::pow(std::pow(2.0, -1.0), 0.5);  // only right leaf: (1+1)^{-1/2} over mass 1
  EXPECT_NEAR(v, expect, 1e-12);
  // in the (inf,q) case only cubes whose subtree holds a zero collapse
  EXPECT_DOUBLE_EQ(lp_norm(t, a, {kInf, -2.0}, mu), 1.0);
  a[t.cube_at(1, 1)] = 0.0;
  EXPECT_DOUBLE_EQ(lp_norm(t, a, {kInf, -2.0}, mu), 0.0);
  EXPECT_DOUBLE_EQ(lp_norm(t, a, {2.0, -2.0}, mu), 0.0);
}

TEST(LpNorm, ScalingHomogeneity) {
  DyadicTree t = build_tree(1, 2);
  std::mt19937_64 rng(31);
  CubeFamily a = random_family(t, rng, true);
  Measure mu = random_measure(t, rng);
  const double regimes[][2] = {{2.0, 1.0}, {0.5, -1.0}, {kInf, 0.5}, {3.0, kInf}};
  for (auto& pq : regimes) {
    double base = lp_norm(t, a, {pq[0], pq[1]}, mu);
    CubeFamily ta = a;
    for (double& v : ta.values) v *= 3.5;
    EXPECT_NEAR(lp_norm(t, ta, {pq[0], pq[1]}, mu), 3.5 * base, 1e-9 * (1.0 + base));
  }
}

TEST(LpNorm, PowerScalingIdentity) {
  // ||a||_{f^{p,q}} = ||a^r||_{f^{p/r,q/r}}^{1/r}
  DyadicTree t = build_tree(1, 2);
  std::mt19937_64 rng(41);
  CubeFamily a = random_family(t, rng, true);
  Measure mu = random_measure(t, rng);
  for (double r : {2.0, 0.5, 3.0}) {
    for (auto& pq : {std::pair{2.0, 1.0}, std::pair{3.0, 1.5}}) {
      CubeFamily ar = a;
      for (double& v : ar.values) v = std::pow(v, r);
      double lhs = lp_norm(t, a, {pq.first, pq.second}, mu);
      double rhs = std::pow(lp_norm(t, ar, {pq.first / r, pq.second / r}, mu), 1.0 / r);
      EXPECT_NEAR(lhs, rhs, 1e-10 * (1.0 + lhs));
    }
  }
}

TEST(LpNorm, MonotoneInEachEntry) {
  DyadicTree t = build_tree(1, 2);
  std::mt19937_64 rng(51);
  CubeFamily a = random_family(t, rng, true);
  Measure mu = random_measure(t, rng);
  for (auto& pq : {std::pair{2.0, 2.0}, std::pair{kInf, 1.0}, std::pair{2.0, kInf}}) {
    double base = lp_norm(t, a, {pq.first, pq.second}, mu);
    for (CubeId c = 0; c < t.cube_count(); ++c) {
      CubeFamily b = a;
      b[c] += 0.7;
      EXPECT_GE(lp_norm(t, b, {pq.first, pq.second}, mu), base - 1e-12);
    }
  }
}

TEST(LpPairing, BasicsAndBilinearity) {
  DyadicTree t = build_tree(1, 1);
  Measure mu(t, {1.0, 1.0});
  CubeFamily a(t, 0.0), b(t, 0.0);
  a[0] = 1.0;
  b[0] = 1.0;
  EXPECT_DOUBLE_EQ(lp_pairing(t, a, b, mu), 2.0);
  CubeFamily zero(t, 0.0);
  EXPECT_DOUBLE_EQ(lp_pairing(t, a, zero, mu), 0.0);
  std::mt19937_64 rng(61);
  CubeFamily x = random_family(t, rng, false), y = random_family(t, rng, false);
  CubeFamily x2 = x;
  for (double& v : x2.values) v *= 2.0;
  EXPECT_DOUBLE_EQ(lp_pairing(t, x2, y, mu), 2.0 * lp_pairing(t, x, y, mu));
}

TEST(LpHolder, PairingBoundedByNormProductConstantOne) {
  DyadicTree t = build_tree(1, 3);
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 200; ++trial) {
    CubeFamily a = random_family(t, rng, false);
    CubeFamily b = random_family(t, rng, false);
    Measure mu = random_measure(t, rng);
    for (auto& pq : {std::pair{2.0, 2.0}, std::pair{3.0, 1.5}, std::pair{2.0, kInf},
                     std::pair{2.5, 1.0}}) {
      LPExponents e(pq.first, pq.second);
      LPExponents ec = e.conjugate();
      double lhs = lp_pairing(t, a, b, mu);
      double rhs = lp_norm(t, a, e, mu) * lp_norm(t, b, ec, mu);
      EXPECT_LE(lhs, rhs + 1e-9 * (1.0 + rhs));
    }
  }
}

TEST(LpDualNorm, SingleCubeSelfDualExact) {
  DyadicTree t = build_tree(1, 1);
  Measure mu(t, {1.0, 1.0});
  CubeFamily a(t, 0.0);
  a[0] = 1.0;
  OptimizerOptions opts;
  opts.restarts = 8;
  opts.max_iters = 120;
  DualEstimate est = lp_dual_norm(t, a, {2.0, 2.0}, mu, opts);
  EXPECT_NEAR(est.value, std::sqrt(2.0), 1e-6);
  // witness feasible
  EXPECT_LE(lp_norm(t, est.witness, LPExponents(2.0, 2.0).conjugate(), mu), 1.0 + 1e-9);
}

TEST(LpDualNorm, ZeroFamilyGivesZero) {
  DyadicTree t = build_tree(1, 1);
  Measure mu(t, {1.0, 1.0});
  CubeFamily a(t, 0.0);
  DualEstimate est = lp_dual_norm(t, a, {2.0, 2.0}, mu, OptimizerOptions{}.with_restarts(2));
  EXPECT_DOUBLE_EQ(est.value, 0.0);
}

TEST(LpDualNorm, TwoSidedComparabilityOnFixture) {
  DyadicTree t = build_tree(1, 2);
  std::mt19937_64 rng(81);
  OptimizerOptions opts;
  opts.restarts = 12;
  opts.max_iters = 150;
  for (int trial = 0; trial < 5; ++trial) {
    CubeFamily a = random_family(t, rng, false);
    Measure mu = random_measure(t, rng);
    for (auto& pq : {std::pair{2.0, 2.0}, std::pair{3.0, 1.5}, std::pair{1.5, 3.0}}) {
      LPExponents e(pq.first, pq.second);
      double norm = lp_norm(t, a, e, mu);
      DualEstimate est = lp_dual_norm(t, a, e, mu, opts.with_seed(mix_seed(881, trial)));
      EXPECT_LE(est.value, norm * (1.0 + 1e-9));
      EXPECT_GE(est.value, norm / 16.0);
      EXPECT_LE(lp_norm(t, est.witness, e.conjugate(), mu), 1.0 + 1e-9);
    }
  }
}

TEST(LpDualSubone, RootWitnessLowerBound) {
  DyadicTree t = build_tree(1, 2);
  Measure mu(t, {0.5, 0.5, 0.5, 0.5});
  CubeFamily a(t, 0.0);
  a[0] = 1.0;
  for (double s : {1.0, 0.5, 0.25}) {
    DualEstimate est = lp_dual_subone(t, a, s, mu, OptimizerOptions{}.with_restarts(6));
    EXPECT_GE(est.value, mu(0) - 1e-9) << "s=" << s;
  }
  CubeFamily zero(t, 0.0);
  EXPECT_DOUBLE_EQ(lp_dual_subone(t, zero, 0.5, mu, OptimizerOptions{}.with_restarts(2)).value,
                   0.0);
}

TEST(LpDualSubone, AgreesWithDualNormAtSOne) {
  DyadicTree t = build_tree(1, 2);
  std::mt19937_64 rng(91);
  CubeFamily a = random_family(t, rng, false);
  Measure mu = random_measure(t, rng);
  OptimizerOptions opts;
  opts.restarts = 16;
  opts.max_iters = 150;
  double v1 = lp_dual_subone(t, a, 1.0, mu, opts).value;
  double v2 = lp_dual_norm(t, a, {1.0, kInf}, mu, opts).value;
  EXPECT_NEAR(v1, v2, 2e-2 * (1.0 + std::max(v1, v2)));
  // ratio to the f^{1,inf} norm stays within a generous two-sided band
  double norm = lp_norm(t, a, {1.0, kInf}, mu);
  double v_half = lp_dual_subone(t, a, 0.5, mu, opts).value;
  EXPECT_GE(v_half, norm / 16.0);
  EXPECT_LE(v_half, norm * 16.0);
  RecordProperty("ratio_s_half", v_half / norm);
}

TEST(LpFactorize, SingleCubeExact) {
  DyadicTree t = build_tree(1, 1);
  Measure mu(t, {1.0, 1.0});
  CubeFamily c(t, 0.0);
  c[0] = 1.0;
  LPExponents target(2.0, 2.0), p1(4.0, 4.0), p2(4.0, 4.0);
  FactorizeResult r = lp_factorize(t, c, target, p1, p2, mu, OptimizerOptions{}.with_restarts(4));
  EXPECT_NEAR(r.a[0] * r.b[0], 1.0, 1e-12);
  EXPECT_NEAR(r.norm_a * r.norm_b, r.norm_c, 1e-6);
}

TEST(LpFactorize, ZeroFamily) {
  DyadicTree t = build_tree(1, 1);
  Measure mu(t, {1.0, 1.0});
  CubeFamily c(t, 0.0);
  FactorizeResult r =
      lp_factorize(t, c, {2.0, 2.0}, {4.0, 4.0}, {4.0, 4.0}, mu, OptimizerOptions{}.with_restarts(2));
  for (CubeId q = 0; q < t.cube_count(); ++q) {
    EXPECT_DOUBLE_EQ(r.a[q], 0.0);
    EXPECT_DOUBLE_EQ(r.b[q], 0.0);
  }
}

TEST(LpFactorize, HolderRelationViolationRejected) {
  DyadicTree t = build_tree(1, 1);
  Measure mu(t, {1.0, 1.0});
  CubeFamily c(t, 1.0);
  EXPECT_THROW(lp_factorize(t, c, {2.0, 2.0}, {3.0, 4.0}, {4.0, 4.0}, mu),
               std::invalid_argument);
}

TEST(LpFactorize, SubOneSplitWithinFactorSixteen) {
  // the f^{p/q,inf} x f^{inf,1/(1-q)} split at (p,q) = (2, 0.5)
  DyadicTree t = build_tree(1, 2);
  std::mt19937_64 rng(101);
  CubeFamily c = random_family(t, rng, false);
  Measure mu = random_measure(t, rng);
  double p = 2.0, q = 0.5;
  LPExponents target(p / q, 1.0 / (1.0 - q));
  LPExponents part1(p / q, kInf);
  LPExponents part2(kInf, 1.0 / (1.0 - q));
  OptimizerOptions opts;
  opts.restarts = 16;
  opts.max_iters = 200;
  FactorizeResult r = lp_factorize(t, c, target, part1, part2, mu, opts);
  for (CubeId qq = 0; qq < t.cube_count(); ++qq)
    EXPECT_NEAR(r.a[qq] * r.b[qq], c[qq], 1e-12 * (1.0 + c[qq]));
  EXPECT_LE(r.norm_a * r.norm_b, 16.0 * r.norm_c);
  RecordProperty("product_over_norm", r.norm_a * r.norm_b / r.norm_c);
}
