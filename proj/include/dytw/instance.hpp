#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "dytw/measure.hpp"
#include "dytw/numeric.hpp"
#include "dytw/tree.hpp"

namespace dytw {

/// One two-weight problem: tree, measures sigma and omega, coefficient
/// family lambda, and exponents p in (1,inf), q in (0,p).
struct Instance {
  DyadicTree tree;
  Measure sigma;
  Measure omega;
  CubeFamily lambda;
  double p = 2.0;
  double q = 1.0;

  Instance(DyadicTree t, Measure s, Measure w, CubeFamily l, double p_, double q_)
      : tree(std::move(t)),
        sigma(std::move(s)),
        omega(std::move(w)),
        lambda(std::move(l)),
        p(p_),
        q(q_) {
    validate();
  }

  void validate() const {
    if (!(p > 1.0) || std::isinf(p)) throw std::invalid_argument("instance: p must be in (1,inf)");
    if (!(q > 0.0)) throw std::invalid_argument("instance: q must be in (0,inf)");
    if (!(q <= p - kMinExponentGap))
      throw std::invalid_argument("instance: requires q < p with gap p - q >= 0.05");
    if (sigma.leaf_count() != tree.leaf_count() || omega.leaf_count() != tree.leaf_count())
      throw std::invalid_argument("instance: measure defined on a different tree");
    if (lambda.size() != tree.cube_count())
      throw std::invalid_argument("instance: lambda defined on a different tree");
    for (double v : lambda.values)
      if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument("instance: lambda values must be finite and >= 0");
  }
};

}  // namespace dytw
