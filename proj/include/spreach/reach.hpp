#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "spreach/errors.hpp"
#include "spreach/value_field.hpp"

namespace spreach {

enum class ReachKind { brs, brt_inner, bst_outer };

/// Level-set approximations of a reachable set at margin eta:
/// inner_mask = {source < -eta}, outer_mask = {source < +eta}, where source
/// is the value (BRS), the running min (BRT) or the running max (BST). Masks
/// are over the slow grid; the fast factor of the product set is implicit.
/// Nodes exactly at the level fall outside (strict comparison).
struct ReachBounds {
  Grid grid;
  double eta = 0.0;
  double t = 0.0;
  ReachKind kind = ReachKind::brs;
  std::vector<std::uint8_t> inner_mask;
  std::vector<std::uint8_t> outer_mask;
  std::vector<double> source_values;  // the field the masks were cut from

  long inner_count() const {
    return std::count(inner_mask.begin(), inner_mask.end(), std::uint8_t{1});
  }
  long outer_count() const {
    return std::count(outer_mask.begin(), outer_mask.end(), std::uint8_t{1});
  }
};

namespace detail {

inline ReachBounds cut_masks(const ValueField& field, const std::vector<double>& source,
                             double eta, ReachKind kind) {
  if (!(eta > 0.0)) throw Error::domain("reach bounds: eta must be > 0");
  ReachBounds rb;
  rb.grid = field.grid;
  rb.eta = eta;
  rb.t = field.time;
  rb.kind = kind;
  rb.source_values = source;
  rb.inner_mask.resize(source.size());
  rb.outer_mask.resize(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    rb.inner_mask[i] = source[i] < -eta ? 1 : 0;
    rb.outer_mask[i] = source[i] < eta ? 1 : 0;
  }
  return rb;
}

}  // namespace detail

/// Inner/outer backward-reachable-set approximation from the value at one time.
inline ReachBounds brs_bounds(const ValueField& field, double eta) {
  return detail::cut_masks(field, field.values, eta, ReachKind::brs);
}

/// Tube bounds from the running extremes: the reach tube's inner
/// approximation cuts the running min, the stay tube's outer approximation
/// cuts the running max. Both masks of each bound are populated consistently.
inline std::pair<ReachBounds, ReachBounds> tube_bounds(const ValueField& field,
                                                       double eta) {
  if (!field.has_extremes())
    throw Error::config("tube bounds: field has no running extremes");
  ReachBounds brt = detail::cut_masks(field, field.running_min, eta, ReachKind::brt_inner);
  ReachBounds bst = detail::cut_masks(field, field.running_max, eta, ReachKind::bst_outer);
  return {std::move(brt), std::move(bst)};
}

struct ContainmentViolation {
  long z_node = 0;
  long full_node = 0;
  std::vector<double> coords;  // full-state coordinates
  double v_bar = 0.0;          // source value behind the mask
  double v_eps = 0.0;
  std::string inclusion;       // "inner" or "outer"
};

struct ContainmentReport {
  long checked_nodes = 0;
  int dilation_cells = 0;
  std::vector<ContainmentViolation> violations;
  bool verdict = false;
  long inner_nodes = 0;   // |inner mask| over z
  long zero_set_nodes = 0;  // |{V_eps <= 0}| over (z, y)
};

/// Node-level check of the sandwich
///   inner_mask x Y  subset  {V_eps <= 0}  subset  outer_mask x Y
/// with the permissive side of each inclusion dilated by dilation_cells
/// (Chebyshev metric) to absorb O(dx) scheme error. The z-axes of the mask
/// grid and the full grid must coincide node-for-node.
inline ContainmentReport check_containment(const ReachBounds& bounds,
                                           const ValueField& full_field,
                                           int dilation_cells = 1) {
  const Grid& zg = bounds.grid;
  const Grid& fg = full_field.grid;
  const int nz = zg.dim();
  if (!fg.same_axes_prefix(zg, nz))
    throw Error::config("containment: z-axes of mask grid and full grid differ");
  if (dilation_cells < 0) throw Error::config("containment: dilation must be >= 0");

  ContainmentReport rep;
  rep.dilation_cells = dilation_cells;
  rep.inner_nodes = bounds.inner_count();

  const int nf = fg.dim();
  std::vector<int> multi(nf);
  const int k = dilation_cells;

  // dilated lookup: any node within Chebyshev distance k satisfying pred
  auto neighborhood_any = [&](const std::vector<int>& center, auto&& pred, int dims) {
    std::vector<int> probe(center);
    std::function<bool(int)> rec = [&](int d) -> bool {
      if (d == dims) return pred(probe);
      const int n = fg.axis(d).nodes;
      for (int off = -k; off <= k; ++off) {
        const int i = center[d] + off;
        if (i < 0 || i >= n) continue;
        probe[d] = i;
        if (rec(d + 1)) return true;
      }
      probe[d] = center[d];
      return false;
    };
    return rec(0);
  };

  for (long node = 0; node < fg.size(); ++node) {
    fg.unindex(node, multi);
    long z_node = 0;
    for (int d = 0; d < nz; ++d) z_node = z_node * zg.axis(d).nodes + multi[d];
    const double v_eps = full_field.values[node];
    ++rep.checked_nodes;

    if (bounds.inner_mask[z_node]) {
      // inner x Y subset of dilated {V_eps <= 0}
      auto pred = [&](const std::vector<int>& probe) {
        long idx = 0;
        for (int d = 0; d < nf; ++d) idx += fg.stride(d) * probe[d];
        return full_field.values[idx] <= 0.0;
      };
      if (!(k == 0 ? v_eps <= 0.0 : neighborhood_any(multi, pred, nf))) {
        ContainmentViolation v;
        v.z_node = z_node;
        v.full_node = node;
        const Eigen::VectorXd p = fg.point(node);
        v.coords.assign(p.data(), p.data() + p.size());
        v.v_bar = bounds.source_values[z_node];
        v.v_eps = v_eps;
        v.inclusion = "inner";
        rep.violations.push_back(std::move(v));
      }
    }

    if (v_eps <= 0.0) {
      ++rep.zero_set_nodes;
      // {V_eps <= 0} subset of dilated (outer x Y); the product set is a
      // cylinder in y, so dilation only matters along the z axes.
      auto pred = [&](const std::vector<int>& probe) {
        long zi = 0;
        for (int d = 0; d < nz; ++d) zi = zi * zg.axis(d).nodes + probe[d];
        return bounds.outer_mask[zi] != 0;
      };
      if (!(k == 0 ? bounds.outer_mask[z_node] != 0 : neighborhood_any(multi, pred, nz))) {
        ContainmentViolation v;
        v.z_node = z_node;
        v.full_node = node;
        const Eigen::VectorXd p = fg.point(node);
        v.coords.assign(p.data(), p.data() + p.size());
        v.v_bar = bounds.source_values[z_node];
        v.v_eps = v_eps;
        v.inclusion = "outer";
        rep.violations.push_back(std::move(v));
      }
    }
  }
  rep.verdict = rep.violations.empty();
  return rep;
}

}  // namespace spreach
