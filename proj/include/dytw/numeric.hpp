#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace dytw {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Minimal admissible gap p - q; powers like pq/(p-q) stay representable.
inline constexpr double kMinExponentGap = 0.05;

/// Holder conjugate p' = p/(p-1) on [1, inf], with 1' = inf and inf' = 1.
inline double holder_conjugate(double p) {
  if (p < 1.0) throw std::invalid_argument("holder_conjugate requires p >= 1");
  if (p == 1.0) return kInf;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

/// num/den with the usual convention 0/0 := 0 (more generally: a zero
/// numerator wins, so mass ratios over empty cubes vanish).
inline double mass_ratio(double num, double den) {
  if (num == 0.0) return 0.0;
  return num / den;  // +inf when den == 0 < num
}

/// (sum_i v_i^e)^{1/e} for e != 0, computed with the largest (e>0) or
/// smallest (e<0) entry factored out so intermediate powers cannot overflow.
/// A zero entry under e < 0 yields 0 (the documented limit convention:
/// the inner sum is +inf and the outer power 1/e < 0 maps it to 0).
inline double lq_sum(std::span<const double> v, double e) {
  if (v.empty()) return 0.0;
  if (e > 0.0) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    if (m == 0.0) return 0.0;
    if (std::isinf(m)) return kInf;
    double s = 0.0;
    for (double x : v) s += std::pow(x / m, e);
    return m * std::pow(s, 1.0 / e);
  }
  double m = kInf;
  for (double x : v) m = std::min(m, x);
  if (m == 0.0) return 0.0;
  if (std::isinf(m)) return kInf;
  double s = 0.0;
  for (double x : v) s += std::pow(x / m, e);
  return m * std::pow(s, 1.0 / e);
}

/// ((sum_i w_i v_i^e) / total)^{1/e}; total defaults to sum_i w_i when
/// negative. Entries with w_i = 0 are skipped. Same overflow-safe
/// factoring and zero conventions as lq_sum.
inline double weighted_lq_mean(std::span<const double> v, std::span<const double> w, double e,
                               double total = -1.0) {
  if (total < 0.0) {
    total = 0.0;
    for (double x : w) total += x;
  }
  if (total == 0.0) return 0.0;
  double m = e > 0.0 ? 0.0 : kInf;
  for (size_t i = 0; i < v.size(); ++i) {
    if (w[i] == 0.0) continue;
    m = e > 0.0 ? std::max(m, v[i]) : std::min(m, v[i]);
  }
  if (m == 0.0) return 0.0;
  if (std::isinf(m)) return kInf;
  double s = 0.0;
  for (size_t i = 0; i < v.size(); ++i) {
    if (w[i] == 0.0) continue;
    s += w[i] * std::pow(v[i] / m, e);
  }
  return m * std::pow(s / total, 1.0 / e);
}

/// (integral X^E dmu)^F evaluated as m^{EF} (sum mu (X/m)^E)^F with the
/// max over positive-mass leaves factored out; with EF == 1 (the usual
/// homogeneity normalization) no intermediate quantity overflows.
inline double integral_power(std::span<const double> x, std::span<const double> mass, double e,
                             double f) {
  double m = 0.0;
  for (size_t i = 0; i < x.size(); ++i)
    if (mass[i] > 0.0) m = std::max(m, x[i]);
  if (m == 0.0) return 0.0;
  if (std::isinf(m)) return kInf;
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i)
    if (mass[i] > 0.0) s += mass[i] * std::pow(x[i] / m, e);
  return std::pow(m, e * f) * std::pow(s, f);
}

}  // namespace dytw
