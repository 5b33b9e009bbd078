#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "spreach/errors.hpp"
#include "spreach/grid.hpp"

namespace spreach {

struct SolveStats {
  int steps = 0;
  double dt = 0.0;
  double cfl = 0.0;
  std::string scheme = "euler";
};

/// One retained time slice of a solve. Extremes are the running min/max of
/// the value over the window [time, 0] and may be empty when not tracked.
struct Snapshot {
  double time = 0.0;
  std::vector<double> values;
  std::vector<double> running_min;
  std::vector<double> running_max;
};

/// Gridded value function V(time, .), row-major node storage. When tracked,
/// running_min/running_max hold min/max of V over all accepted steps in
/// [time, 0] pointwise (the discrete-time tube companions).
struct ValueField {
  Grid grid;
  double time = 0.0;
  std::vector<double> values;
  std::vector<double> running_min;
  std::vector<double> running_max;
  std::vector<Snapshot> snapshots;  // in solve order: t = 0 first, t_final last
  SolveStats stats;
  std::string provenance = "sampled";

  bool has_extremes() const {
    return running_min.size() == values.size() && running_max.size() == values.size();
  }
};

namespace detail {

struct CellLocation {
  std::vector<int> base;     // lower node index per dim
  std::vector<double> frac;  // in [0,1]
};

inline CellLocation locate_cell(const Grid& grid, const Eigen::VectorXd& x) {
  if (x.size() != grid.dim())
    throw Error::dimension("interpolate: point has dimension " + std::to_string(x.size()) +
                           ", grid has " + std::to_string(grid.dim()));
  CellLocation loc;
  loc.base.resize(grid.dim());
  loc.frac.resize(grid.dim());
  for (int d = 0; d < grid.dim(); ++d) {
    const auto& ax = grid.axis(d);
    const double tol = 1e-12 * (ax.max - ax.min);
    if (x[d] < ax.min - tol || x[d] > ax.max + tol)
      throw Error::domain("interpolate: coordinate " + std::to_string(x[d]) +
                          " outside axis '" + ax.name + "' [" + std::to_string(ax.min) +
                          ", " + std::to_string(ax.max) + "]");
    const double h = grid.spacing(d);
    int i = static_cast<int>(std::floor((x[d] - ax.min) / h));
    i = std::clamp(i, 0, ax.nodes - 2);
    loc.base[d] = i;
    loc.frac[d] = std::clamp((x[d] - grid.coord(d, i)) / h, 0.0, 1.0);
  }
  return loc;
}

inline double interpolate_values(const Grid& grid, const std::vector<double>& values,
                                 const CellLocation& loc) {
  const int n = grid.dim();
  const unsigned corners = 1u << n;
  double acc = 0.0;
  for (unsigned c = 0; c < corners; ++c) {
    double w = 1.0;
    long idx = 0;
    for (int d = 0; d < n; ++d) {
      const bool hi = (c >> d) & 1u;
      w *= hi ? loc.frac[d] : 1.0 - loc.frac[d];
      idx += grid.stride(d) * (loc.base[d] + (hi ? 1 : 0));
    }
    acc += w * values[idx];
  }
  return acc;
}

inline double interpolate_at(const Grid& grid, const std::vector<double>& values,
                             const Eigen::VectorXd& x) {
  return interpolate_values(grid, values, locate_cell(grid, x));
}

/// Central-difference gradient of the multilinear interpolant, stencil width
/// one grid spacing per dimension. Requires x at least one cell inside.
inline Eigen::VectorXd gradient_values(const Grid& grid, const std::vector<double>& values,
                                       const Eigen::VectorXd& x) {
  if (x.size() != grid.dim())
    throw Error::dimension("gradient: point/grid dimension mismatch");
  for (int d = 0; d < grid.dim(); ++d) {
    const auto& ax = grid.axis(d);
    const double h = grid.spacing(d);
    const double tol = 1e-12 * (ax.max - ax.min);
    if (x[d] < ax.min + h - tol || x[d] > ax.max - h + tol)
      throw Error::domain("gradient: point within one cell of the boundary on axis '" +
                          ax.name + "'");
  }
  Eigen::VectorXd g(grid.dim());
  Eigen::VectorXd probe = x;
  for (int d = 0; d < grid.dim(); ++d) {
    const double h = grid.spacing(d);
    probe[d] = x[d] + h;
    const double vp = interpolate_at(grid, values, probe);
    probe[d] = x[d] - h;
    const double vm = interpolate_at(grid, values, probe);
    probe[d] = x[d];
    g[d] = (vp - vm) / (2.0 * h);
  }
  return g;
}

}  // namespace detail

/// Multilinear interpolation of the stored values at x.
inline double interpolate_value(const ValueField& field, const Eigen::VectorXd& x) {
  return detail::interpolate_at(field.grid, field.values, x);
}

/// Central-difference gradient of the interpolated field, stencil width one
/// grid spacing per dimension. Requires x at least one cell inside the grid.
inline Eigen::VectorXd gradient_at(const ValueField& field, const Eigen::VectorXd& x) {
  return detail::gradient_values(field.grid, field.values, x);
}

/// Largest |V_full(z,y) - V_reduced(z)| over the full grid. The reduced
/// field's axes must match the leading axes of the full grid node-for-node.
inline double max_abs_gap_over_y(const ValueField& full, const ValueField& reduced) {
  const int nz = reduced.grid.dim();
  if (!full.grid.same_axes_prefix(reduced.grid, nz))
    throw Error::config("gap: z-axes of the two fields do not coincide");
  long y_count = 1;
  for (int d = nz; d < full.grid.dim(); ++d) y_count *= full.grid.axis(d).nodes;
  double worst = 0.0;
  for (long zi = 0; zi < reduced.grid.size(); ++zi) {
    const double vr = reduced.values[zi];
    const long base = zi * y_count;
    for (long yi = 0; yi < y_count; ++yi)
      worst = std::max(worst, std::abs(full.values[base + yi] - vr));
  }
  return worst;
}

}  // namespace spreach
