#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <string>

#include "spreach/errors.hpp"

namespace spreach {

/// Terminal payoff l(z). The target set is the strict sub-zero level set
/// {l < 0}; lipschitz_bound and saturation describe the builder's envelope.
struct PayoffFn {
  std::function<double(const Eigen::VectorXd&)> ell;
  double lipschitz_bound = 0.0;
  double saturation = 0.0;
  int dim = 0;

  double operator()(const Eigen::VectorXd& z) const { return ell(z); }
};

/// Piecewise-linear payoff for a box target, capped above:
///   l(z) = min( max over constrained dims of slope * sdist_i(z_i), cap )
/// where sdist is the signed distance to the interval [lower_i, upper_i]
/// (negative inside). Infinite bounds give one-sided constraints; dims in
/// free_dims (or with both bounds infinite) contribute nothing, supporting
/// cylindrical targets.
inline PayoffFn build_payoff_box(const Eigen::VectorXd& target_lower,
                                 const Eigen::VectorXd& target_upper, double slope,
                                 double cap, const std::set<int>& free_dims = {}) {
  if (target_lower.size() != target_upper.size())
    throw Error::dimension("payoff: target_lower/target_upper length mismatch");
  if (!(slope > 0.0)) throw Error::domain("payoff: slope must be > 0");
  if (!(cap > 0.0)) throw Error::domain("payoff: cap must be > 0");
  const int n = static_cast<int>(target_lower.size());

  std::vector<int> constrained;
  for (int i = 0; i < n; ++i) {
    if (free_dims.count(i)) continue;
    const double lo = target_lower[i], hi = target_upper[i];
    const bool lo_inf = std::isinf(lo) && lo < 0, hi_inf = std::isinf(hi) && hi > 0;
    if (lo_inf && hi_inf) continue;
    if (std::isnan(lo) || std::isnan(hi) || (std::isinf(lo) && lo > 0) ||
        (std::isinf(hi) && hi < 0))
      throw Error::domain("payoff: invalid bound in dimension " + std::to_string(i));
    if (!lo_inf && !hi_inf && lo >= hi)
      throw Error::domain("payoff: empty target in dimension " + std::to_string(i));
    constrained.push_back(i);
  }
  if (constrained.empty())
    throw Error::domain("payoff: target must constrain at least one dimension");

  const Eigen::VectorXd lo = target_lower, hi = target_upper;
  PayoffFn p;
  p.dim = n;
  p.lipschitz_bound = slope;
  p.saturation = cap;
  p.ell = [lo, hi, slope, cap, constrained](const Eigen::VectorXd& z) -> double {
    double worst = -std::numeric_limits<double>::infinity();
    for (int i : constrained) {
      double sd;
      const bool lo_inf = std::isinf(lo[i]), hi_inf = std::isinf(hi[i]);
      if (lo_inf)
        sd = z[i] - hi[i];
      else if (hi_inf)
        sd = lo[i] - z[i];
      else {
        const double c = 0.5 * (lo[i] + hi[i]), r = 0.5 * (hi[i] - lo[i]);
        sd = std::abs(z[i] - c) - r;
      }
      worst = std::max(worst, slope * sd);
    }
    return std::min(worst, cap);
  };
  return p;
}

}  // namespace spreach
