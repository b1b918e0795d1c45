#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace dytw {

/// Shared knobs for the seeded multi-restart ascent loops. Restarts draw
/// independent streams derived from the master seed, so results do not
/// depend on evaluation order.
struct OptimizerOptions {
  int restarts = 64;
  int max_iters = 400;
  double initial_step = 1.0;   // geometric backtracking starts here
  double step_shrink = 0.5;
  int max_backtracks = 40;
  double tolerance = 1e-8;     // relative improvement considered progress
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
  int selection_cap = 20000;   // max enumerated linearizations (maximal op)
  /// Extra starting points (witness transfer); evaluated before random draws.
  std::vector<std::vector<double>> extra_seeds;

  OptimizerOptions with_seed(std::uint64_t s) const {
    OptimizerOptions o = *this;
    o.seed = s;
    return o;
  }
  OptimizerOptions with_restarts(int r) const {
    OptimizerOptions o = *this;
    o.restarts = r;
    return o;
  }
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Inverse-CDF exponential; avoids the implementation-defined
/// std::exponential_distribution so streams are identical everywhere.
inline double exp_sample(std::mt19937_64& rng) {
  return -std::log1p(-uniform01(rng));
}

struct AscentResult {
  double value = 0.0;
  std::vector<double> point;
  bool converged = true;
  int restarts_used = 0;
};

/// Maximizes a positively homogeneous-of-degree-zero objective over the
/// strictly positive orthant by finite-difference ascent in log space,
/// with geometric backtracking and seeded restarts. The objective must
/// accept any positive vector; the best evaluated point is returned.
inline AscentResult maximize_positive(int dim,
                                      const std::function<double(const std::vector<double>&)>& fn,
                                      const std::vector<std::vector<double>>& seeds,
                                      const OptimizerOptions& opts) {
  AscentResult best;
  best.point.assign(dim, 1.0);
  best.value = dim == 0 ? 0.0 : fn(best.point);
  int last_improve_restart = 0;

  const double fd_step = 1e-5;
  int total = opts.restarts + static_cast<int>(seeds.size());
  for (int r = 0; r < total; ++r) {
    std::vector<double> x(dim, 1.0);
    if (r < static_cast<int>(seeds.size())) {
      x = seeds[r];
      for (double& v : x) v = std::max(v, 1e-300);
    } else {
      std::mt19937_64 rng(mix_seed(opts.seed, r));
      for (double& v : x) v = std::max(exp_sample(rng), 1e-12);
    }
    std::vector<double> u(dim);
    for (int i = 0; i < dim; ++i) u[i] = std::log(x[i]);

    double cur = fn(x);
    if (cur > best.value) {
      best.value = cur;
      best.point = x;
      last_improve_restart = r;
    }
    if (!(cur > 0.0) || std::isinf(cur)) continue;

    std::vector<double> grad(dim), xt(dim);
    bool stalled_early = false;
    for (int it = 0; it < opts.max_iters; ++it) {
      double gnorm = 0.0;
      for (int i = 0; i < dim; ++i) {
        double save = u[i];
        u[i] = save + fd_step;
        for (int k = 0; k < dim; ++k) xt[k] = std::exp(u[k]);
        double up = fn(xt);
        u[i] = save - fd_step;
        for (int k = 0; k < dim; ++k) xt[k] = std::exp(u[k]);
        double dn = fn(xt);
        u[i] = save;
        grad[i] = (up > 0.0 && dn > 0.0 && std::isfinite(up) && std::isfinite(dn))
                      ? (std::log(up) - std::log(dn)) / (2 * fd_step)
                      : 0.0;
        gnorm = std::max(gnorm, std::abs(grad[i]));
      }
      if (gnorm == 0.0) {
        stalled_early = true;
        break;
      }
      double step = opts.initial_step;
      bool accepted = false;
      for (int bt = 0; bt < opts.max_backtracks; ++bt) {
        for (int i = 0; i < dim; ++i) xt[i] = std::exp(u[i] + step * grad[i] / gnorm);
        double cand = fn(xt);
        if (std::isfinite(cand) && cand > cur * (1.0 + opts.tolerance)) {
          cur = cand;
          for (int i = 0; i < dim; ++i) u[i] = std::log(xt[i]);
          accepted = true;
          break;
        }
        step *= opts.step_shrink;
      }
      if (!accepted) {
        stalled_early = true;
        break;
      }
      if (cur > best.value) {
        best.value = cur;
        for (int i = 0; i < dim; ++i) best.point[i] = std::exp(u[i]);
        last_improve_restart = r;
      }
    }
    (void)stalled_early;
  }
  best.restarts_used = total;
  best.converged = total == 0 || last_improve_restart <= (3 * total) / 4;
  return best;
}

}  // namespace dytw
