#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dytw/instance.hpp"
#include "dytw/operators.hpp"
#include "dytw/optim.hpp"

namespace dytw {

enum class MeasureGen { Uniform, IndependentExponential, SingleHeavyLeaf, Explicit };
enum class LambdaGen { Explicit, RandomSparse, Riesz };

inline const char* to_string(MeasureGen g) {
  switch (g) {
    case MeasureGen::Uniform: return "uniform";
    case MeasureGen::IndependentExponential: return "independent-exponential";
    case MeasureGen::SingleHeavyLeaf: return "single-heavy-leaf";
    default: return "explicit";
  }
}
inline const char* to_string(LambdaGen g) {
  switch (g) {
    case LambdaGen::Explicit: return "explicit";
    case LambdaGen::RandomSparse: return "random-sparse";
    default: return "riesz";
  }
}

inline MeasureGen measure_gen_from_string(const std::string& s) {
  if (s == "uniform") return MeasureGen::Uniform;
  if (s == "independent-exponential") return MeasureGen::IndependentExponential;
  if (s == "single-heavy-leaf") return MeasureGen::SingleHeavyLeaf;
  if (s == "explicit") return MeasureGen::Explicit;
  throw std::invalid_argument("unknown measure generator: " + s);
}
inline LambdaGen lambda_gen_from_string(const std::string& s) {
  if (s == "explicit") return LambdaGen::Explicit;
  if (s == "random-sparse") return LambdaGen::RandomSparse;
  if (s == "riesz") return LambdaGen::Riesz;
  throw std::invalid_argument("unknown lambda generator: " + s);
}

/// Everything needed to produce one Instance deterministically from a seed.
struct InstanceSpec {
  int dimension = 1;
  int depth = 2;
  MeasureGen sigma_gen = MeasureGen::IndependentExponential;
  MeasureGen omega_gen = MeasureGen::IndependentExponential;
  std::vector<double> sigma_explicit;
  std::vector<double> omega_explicit;
  LambdaGen lambda_gen = LambdaGen::RandomSparse;
  double lambda_density = 0.5;
  double riesz_alpha = 0.5;
  std::map<std::string, double> lambda_explicit;  // cube path -> value
  double p = 2.0;
  double q = 1.0;
  std::uint64_t seed = 1;
};

namespace detail {

inline std::vector<double> generate_masses(const DyadicTree& tree, MeasureGen gen,
                                           const std::vector<double>& explicit_masses,
                                           std::uint64_t stream, const char* field) {
  int n = tree.leaf_count();
  switch (gen) {
    case MeasureGen::Uniform:
      return std::vector<double>(n, 1.0);
    case MeasureGen::IndependentExponential: {
      std::mt19937_64 rng(stream);
      std::vector<double> m(n);
      for (double& x : m) x = exp_sample(rng);
      return m;
    }
    case MeasureGen::SingleHeavyLeaf: {
      std::mt19937_64 rng(stream);
      std::vector<double> m(n, 1.0 / n);
      m[static_cast<int>(rng() % n)] = static_cast<double>(n);
      return m;
    }
    case MeasureGen::Explicit:
      if (static_cast<int>(explicit_masses.size()) != n)
        throw std::invalid_argument(std::string(field) +
                                    ": explicit mass list must have one entry per leaf");
      return explicit_masses;
  }
  throw std::invalid_argument(std::string(field) + ": unknown generator");
}

}  // namespace detail

/// Single-cube anchor: lambda on the root alone, uniform equal measures.
/// Both operator norms and the S/N condition values collapse to the
/// closed form (total mass)^{1/q - 1/p} on it.
inline Instance single_cube_uniform_instance(double total_mass, double p, double q,
                                             int depth = 2) {
  DyadicTree tree = build_tree(1, depth);
  Measure mu(tree, std::vector<double>(tree.leaf_count(), total_mass / tree.leaf_count()));
  CubeFamily lam(tree, 0.0);
  lam[0] = 1.0;
  return Instance(std::move(tree), mu, mu, std::move(lam), p, q);
}

/// Deterministic instance construction; throws std::invalid_argument
/// naming the offending field on validation failures.
inline Instance generate_instance(const InstanceSpec& spec) {
  if (spec.dimension < 1) throw std::invalid_argument("spec.dimension: must be >= 1");
  if (spec.depth < 0) throw std::invalid_argument("spec.depth: must be >= 0");
  if (!(spec.q <= spec.p - kMinExponentGap))
    throw std::invalid_argument("spec.q: requires q < p with gap >= 0.05");
  DyadicTree tree = build_tree(spec.dimension, spec.depth);
  Measure sigma(tree, detail::generate_masses(tree, spec.sigma_gen, spec.sigma_explicit,
                                              mix_seed(spec.seed, 1), "spec.sigma"));
  Measure omega(tree, detail::generate_masses(tree, spec.omega_gen, spec.omega_explicit,
                                              mix_seed(spec.seed, 2), "spec.omega"));
  CubeFamily lambda(tree, 0.0);
  switch (spec.lambda_gen) {
    case LambdaGen::Explicit:
      for (auto& [path, value] : spec.lambda_explicit) {
        if (!(value >= 0.0))
          throw std::invalid_argument("spec.lambda[" + path + "]: must be >= 0");
        lambda[tree.cube_from_path(path)] = value;
      }
      break;
    case LambdaGen::RandomSparse: {
      if (!(spec.lambda_density > 0.0 && spec.lambda_density <= 1.0))
        throw std::invalid_argument("spec.lambda_density: must be in (0,1]");
      std::mt19937_64 rng(mix_seed(spec.seed, 3));
      bool any = false;
      for (CubeId c = 0; c < tree.cube_count(); ++c) {
        double u = uniform01(rng), v = exp_sample(rng);
        if (u < spec.lambda_density) {
          lambda[c] = v;
          any = true;
        }
      }
      if (!any) lambda[0] = 1.0;
      break;
    }
    case LambdaGen::Riesz:
      if (!(spec.riesz_alpha > 0.0 && spec.riesz_alpha < spec.dimension))
        throw std::invalid_argument("spec.riesz_alpha: must be in (0, dimension)");
      lambda = riesz_coefficients(tree, sigma, spec.riesz_alpha);
      break;
  }
  return Instance(std::move(tree), std::move(sigma), std::move(omega), std::move(lambda), spec.p,
                  spec.q);
}

}  // namespace dytw
