#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "spreach/errors.hpp"
#include "spreach/grid.hpp"
#include "spreach/payoff.hpp"
#include "spreach/systems.hpp"
#include "spreach/value_field.hpp"

namespace spreach {

struct SolveOptions {
  double cfl = 0.5;                    // monotonicity requires <= 1
  enum class Scheme { euler, rk2 } scheme = Scheme::euler;
  bool track_extremes = false;
  std::vector<double> snapshot_times;  // t values in [t_final, 0]
  int snapshot_count = 0;              // alternative: evenly spaced incl. endpoints
  bool snapshot_extremes = false;
  bool cache_dynamics = true;          // bit-identical either way
  double min_dt = 1e-12;
  bool allow_high_dimension = false;   // lifts the full-solve guard n_z + n_y <= 3
  std::size_t cache_budget_doubles = 1u << 27;
};

namespace detail {

/// Precomputed per-node data for the Lax-Friedrichs update: the lattice of
/// dynamics values (u-major combo order) and the per-axis dissipation
/// coefficients alpha_d = max over the lattice of |F_d|.
struct NodeDynamics {
  long n_combo = 0;
  long nu = 0, nd = 0;
  bool cached = false;
  std::vector<double> f_values;  // [node][combo][dim] when cached
  std::vector<double> alpha;     // [node][dim]
  std::vector<double> alpha_max; // [dim]
};

inline NodeDynamics prepare_dynamics(const ReducedSystem& red, const Grid& grid,
                                     const SolveOptions& opts) {
  NodeDynamics dyn;
  dyn.nu = red.u_set.lattice_size();
  dyn.nd = red.d_set.lattice_size();
  dyn.n_combo = dyn.nu * dyn.nd;
  const int dim = grid.dim();
  const std::size_t need =
      static_cast<std::size_t>(grid.size()) * dyn.n_combo * dim;
  dyn.cached = opts.cache_dynamics && need <= opts.cache_budget_doubles;
  if (dyn.cached) dyn.f_values.reserve(need);
  dyn.alpha.assign(static_cast<std::size_t>(grid.size()) * dim, 0.0);
  dyn.alpha_max.assign(dim, 0.0);

  std::vector<double> scratch;
  for (long node = 0; node < grid.size(); ++node) {
    const Eigen::VectorXd z = grid.point(node);
    fill_lattice_values(red, z, scratch);
    double* a = dyn.alpha.data() + node * dim;
    for (long k = 0; k < dyn.n_combo; ++k)
      for (int c = 0; c < dim; ++c)
        a[c] = std::max(a[c], std::abs(scratch[k * dim + c]));
    for (int c = 0; c < dim; ++c) dyn.alpha_max[c] = std::max(dyn.alpha_max[c], a[c]);
    if (dyn.cached) dyn.f_values.insert(dyn.f_values.end(), scratch.begin(), scratch.end());
  }
  return dyn;
}

/// One explicit update of the whole grid: out = v + dtau * (H(pbar) + D)
/// with local LF dissipation D = sum_d alpha_d (p+_d - p-_d)/2. Boundary
/// nodes use the one-sided difference on both sides (linear-extrapolation
/// ghost layer), which zeroes the jump there.
class LaxFriedrichsUpdater {
 public:
  LaxFriedrichsUpdater(const ReducedSystem& red, const Grid& grid, const NodeDynamics& dyn)
      : red_(red), grid_(grid), dyn_(dyn), dim_(grid.dim()) {
    inv_dx_.resize(dim_);
    for (int d = 0; d < dim_; ++d) inv_dx_[d] = 1.0 / grid.spacing(d);
  }

  void step(const std::vector<double>& v, double dtau, std::vector<double>& out) {
    out.resize(v.size());
    std::vector<int> multi(dim_, 0);
    std::vector<double> pbar(dim_), pjump(dim_);
    std::vector<double> scratch;
    const int dim = dim_;
    for (long node = 0; node < grid_.size(); ++node) {
      const double vc = v[node];
      for (int d = 0; d < dim; ++d) {
        const long s = grid_.stride(d);
        const int i = multi[d];
        const int n = grid_.axis(d).nodes;
        double pm, pp;
        if (i == 0) {
          pm = pp = (v[node + s] - vc) * inv_dx_[d];
        } else if (i == n - 1) {
          pm = pp = (vc - v[node - s]) * inv_dx_[d];
        } else {
          pm = (vc - v[node - s]) * inv_dx_[d];
          pp = (v[node + s] - vc) * inv_dx_[d];
        }
        pbar[d] = 0.5 * (pm + pp);
        pjump[d] = pp - pm;
      }
      const double* fvals;
      if (dyn_.cached) {
        fvals = dyn_.f_values.data() + node * dyn_.n_combo * dim;
      } else {
        fill_lattice_values(red_, grid_.point(node), scratch);
        fvals = scratch.data();
      }
      const double ham =
          minmax_over(fvals, dim, dyn_.nu, dyn_.nd, pbar.data()).first;
      const double* a = dyn_.alpha.data() + node * dim;
      double diss = 0.0;
      for (int d = 0; d < dim; ++d) diss += a[d] * pjump[d] * 0.5;
      out[node] = vc + dtau * (ham + diss);
      // odometer: advance multi-index, last axis fastest
      for (int d = dim - 1; d >= 0; --d) {
        if (++multi[d] < grid_.axis(d).nodes) break;
        multi[d] = 0;
      }
    }
  }

 private:
  const ReducedSystem& red_;
  const Grid& grid_;
  const NodeDynamics& dyn_;
  int dim_;
  std::vector<double> inv_dx_;
};

inline std::vector<double> snapshot_taus(double tau_final, const SolveOptions& opts) {
  std::vector<double> taus;
  for (double t : opts.snapshot_times) {
    if (t > 0.0 || -t > tau_final + 1e-12)
      throw Error::config("snapshot time " + std::to_string(t) +
                          " outside [t_final, 0]");
    taus.push_back(-t);
  }
  if (opts.snapshot_count >= 2) {
    for (int k = 0; k < opts.snapshot_count; ++k)
      taus.push_back(tau_final * k / (opts.snapshot_count - 1));
  }
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-15; }),
             taus.end());
  return taus;
}

}  // namespace detail

/// Solve the terminal-value Hamilton-Jacobi-Isaacs equation
///   dV/dt + H(z, grad V) = 0,  V(0,.) = l,  H = min_u max_d lambda.F
/// backward to t_final with a monotone local Lax-Friedrichs scheme and
/// explicit Euler (or Heun) stepping in tau = -t. The returned field
/// approximates the game value V(t_final, .); running extremes approximate
/// min/max of V over [t_final, 0] per node when tracked.
inline ValueField solve_value(const ReducedSystem& red, const PayoffFn& ell,
                              const Grid& grid, double t_final,
                              const SolveOptions& opts = {}) {
  if (t_final > 0.0) throw Error::domain("t_final must be <= 0");
  if (grid.dim() != red.n_z)
    throw Error::dimension("grid dimension " + std::to_string(grid.dim()) +
                           " does not match dynamics dimension " + std::to_string(red.n_z));
  if (!(opts.cfl > 0.0) || opts.cfl > 1.0)
    throw Error::config("cfl must lie in (0, 1]");

  ValueField field;
  field.grid = grid;
  field.provenance = "value:" + red.provenance;
  field.stats.cfl = opts.cfl;
  field.stats.scheme = opts.scheme == SolveOptions::Scheme::euler ? "euler" : "rk2";

  field.values.resize(grid.size());
  for (long i = 0; i < grid.size(); ++i) field.values[i] = ell(grid.point(i));

  const bool extremes = opts.track_extremes;
  if (extremes) {
    field.running_min = field.values;
    field.running_max = field.values;
  }

  const double tau_final = -t_final;
  const auto snap_taus = detail::snapshot_taus(tau_final, opts);
  std::size_t next_snap = 0;
  auto record_snapshot = [&](double tau) {
    Snapshot s;
    s.time = tau == 0.0 ? 0.0 : -tau;
    s.values = field.values;
    if (opts.snapshot_extremes && extremes) {
      s.running_min = field.running_min;
      s.running_max = field.running_max;
    }
    field.snapshots.push_back(std::move(s));
  };
  if (next_snap < snap_taus.size() && snap_taus[next_snap] <= 1e-15) {
    record_snapshot(0.0);
    ++next_snap;
  }

  if (tau_final > 0.0) {
    const auto dyn = detail::prepare_dynamics(red, grid, opts);
    double denom = 0.0;
    for (int d = 0; d < grid.dim(); ++d) denom += dyn.alpha_max[d] / grid.spacing(d);
    const double dt_cfl = denom > 0.0 ? opts.cfl / denom : tau_final;
    if (dt_cfl < opts.min_dt)
      throw Error::numeric("CFL step underflow: dt = " + std::to_string(dt_cfl));
    field.stats.dt = dt_cfl;

    detail::LaxFriedrichsUpdater updater(red, grid, dyn);
    std::vector<double> next(field.values.size());
    std::vector<double> mid;  // rk2 stage
    double tau = 0.0;
    int steps = 0;
    while (true) {
      const double remaining = tau_final - tau;
      if (remaining <= tau_final * 1e-14) break;
      double dt = std::min(dt_cfl, remaining);
      if (next_snap < snap_taus.size())
        dt = std::min(dt, std::max(snap_taus[next_snap] - tau, 0.0));

      if (dt > 0.0) {
        if (opts.scheme == SolveOptions::Scheme::euler) {
          updater.step(field.values, dt, next);
        } else {
          updater.step(field.values, dt, mid);
          updater.step(mid, dt, next);
          for (std::size_t i = 0; i < next.size(); ++i)
            next[i] = 0.5 * (field.values[i] + next[i]);
        }
        field.values.swap(next);
        tau += dt;
        ++steps;

        double vmin = field.values[0], vmax = field.values[0];
        if (extremes) {
          for (std::size_t i = 0; i < field.values.size(); ++i) {
            const double v = field.values[i];
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
            field.running_min[i] = std::min(field.running_min[i], v);
            field.running_max[i] = std::max(field.running_max[i], v);
          }
        } else {
          for (const double v : field.values) {
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
          }
        }
        if (!std::isfinite(vmin) || !std::isfinite(vmax))
          throw Error::numeric("solver diverged at step " + std::to_string(steps));
      }

      if (next_snap < snap_taus.size() && tau >= snap_taus[next_snap] - 1e-15) {
        record_snapshot(snap_taus[next_snap]);
        ++next_snap;
      }
    }
    field.stats.steps = steps;
  }

  field.time = t_final;
  return field;
}

/// Value of the reduced (slow-only) game.
inline ValueField solve_reduced_value(const ReducedSystem& red, const PayoffFn& ell,
                                      const Grid& grid, double t_final,
                                      const SolveOptions& opts = {}) {
  ValueField f = solve_value(red, ell, grid, t_final, opts);
  f.provenance = "reduced:" + red.provenance;
  return f;
}

/// Value of the full SP game over the joint state x = (z, y). The payoff
/// reads the z block only. Desk-scale guard: n_z + n_y <= 3 unless lifted.
inline ValueField solve_full_value(const SPSystem& sys, double eps, const PayoffFn& ell,
                                   const Grid& grid, double t_final,
                                   const SolveOptions& opts = {}) {
  if (sys.n_z + sys.n_y > 3 && !opts.allow_high_dimension)
    throw Error::config("full solve in dimension " + std::to_string(sys.n_z + sys.n_y) +
                        " refused; set allow_high_dimension to override");
  const ReducedSystem joint = joint_system(sys, eps);
  ValueField f = solve_value(joint, ell, grid, t_final, opts);
  f.provenance = "full:" + sys.name + ":eps=" + std::to_string(eps);
  return f;
}

}  // namespace spreach
