#pragma once

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "spreach/errors.hpp"
#include "spreach/value_field.hpp"

namespace spreach {

struct Polyline {
  std::vector<std::array<double, 2>> pts;
  bool closed = false;
  int dim_a = 0;  // grid axes the two columns refer to
  int dim_b = 1;
};

/// Crossings of a 1-D field with a level, linearly interpolated between
/// nodes. Sorted ascending; exact node hits are included once.
inline std::vector<double> level_crossings_1d(const ValueField& field, double level) {
  if (field.grid.dim() != 1)
    throw Error::dimension("level_crossings_1d: field must be one-dimensional");
  std::vector<double> out;
  const auto& v = field.values;
  const Grid& g = field.grid;
  for (long i = 0; i + 1 < g.size(); ++i) {
    const double a = v[i] - level, b = v[i + 1] - level;
    if (a == 0.0) out.push_back(g.coord(0, static_cast<int>(i)));
    if ((a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)) {
      const double t = a / (a - b);
      out.push_back(g.coord(0, static_cast<int>(i)) + t * g.spacing(0));
    }
  }
  if (!v.empty() && v.back() == level) out.push_back(g.axis(0).max);
  return out;
}

namespace detail {

struct SegmentKey {
  double x, y;
  bool operator<(const SegmentKey& o) const {
    if (x != o.x) return x < o.x;
    return y < o.y;
  }
  bool operator==(const SegmentKey& o) const { return x == o.x && y == o.y; }
};

/// Chain loose segments into polylines. Endpoints of adjacent segments are
/// bitwise equal (each comes from the same edge-interpolation arithmetic),
/// so exact keys work. Open chains are traced first from the smallest
/// endpoint key, then remaining cycles; ordering is deterministic.
inline std::vector<Polyline> chain_segments(
    std::vector<std::array<SegmentKey, 2>>& segs, int dim_a, int dim_b) {
  std::map<SegmentKey, std::vector<std::size_t>> at;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    at[segs[i][0]].push_back(i);
    at[segs[i][1]].push_back(i);
  }
  std::vector<bool> used(segs.size(), false);
  std::vector<Polyline> out;

  auto trace = [&](std::size_t start_seg, const SegmentKey& start_pt) {
    Polyline pl;
    pl.dim_a = dim_a;
    pl.dim_b = dim_b;
    SegmentKey cur = start_pt;
    std::size_t seg = start_seg;
    pl.pts.push_back({cur.x, cur.y});
    while (true) {
      used[seg] = true;
      const auto& s = segs[seg];
      cur = (s[0] == cur) ? s[1] : s[0];
      pl.pts.push_back({cur.x, cur.y});
      const auto& cand = at[cur];
      std::size_t next = segs.size();
      for (std::size_t c : cand)
        if (!used[c]) {
          next = c;
          break;
        }
      if (next == segs.size()) break;
      seg = next;
    }
    pl.closed = pl.pts.size() > 2 && pl.pts.front() == pl.pts.back();
    out.push_back(std::move(pl));
  };

  // open chains start at endpoints with odd degree of unused segments
  for (const auto& [key, ids] : at) {
    long unused = 0;
    for (std::size_t i : ids)
      if (!used[i]) ++unused;
    if (unused == 1) {
      for (std::size_t i : ids)
        if (!used[i]) trace(i, key);
    }
  }
  for (const auto& [key, ids] : at) {
    for (std::size_t i : ids)
      if (!used[i]) trace(i, key);
  }
  return out;
}

}  // namespace detail

/// Marching-squares contour of {V = level} on a 2-D slice of the field.
/// slice_spec pins dims beyond the two free ones to node coordinates
/// (off-grid coordinates are an error). Saddle cells are disambiguated by
/// comparing the cell mean against the level. Vertices lie on cell edges
/// with linear interpolation, so |V(vertex) - level| <= 1e-9.
inline std::vector<Polyline> extract_contours(const ValueField& field, double level,
                                              const std::map<int, double>& slice_spec = {}) {
  const Grid& g = field.grid;
  std::vector<int> fixed_index(g.dim(), -1);
  std::vector<int> free_dims;
  for (int d = 0; d < g.dim(); ++d) {
    auto it = slice_spec.find(d);
    if (it == slice_spec.end()) {
      free_dims.push_back(d);
      continue;
    }
    const auto& ax = g.axis(d);
    const double h = g.spacing(d);
    const double rel = (it->second - ax.min) / h;
    const int i = static_cast<int>(std::lround(rel));
    if (i < 0 || i >= ax.nodes || std::abs(rel - i) > 1e-9)
      throw Error::domain("contour: slice coordinate " + std::to_string(it->second) +
                          " is not a node of axis '" + ax.name + "'");
    fixed_index[d] = i;
  }
  if (free_dims.size() != 2)
    throw Error::domain("contour: slicing must leave exactly 2 free dimensions, got " +
                        std::to_string(free_dims.size()));

  const int da = free_dims[0], db = free_dims[1];
  const int na = g.axis(da).nodes, nb = g.axis(db).nodes;

  long base = 0;
  for (int d = 0; d < g.dim(); ++d)
    if (fixed_index[d] >= 0) base += g.stride(d) * fixed_index[d];
  auto value_at = [&](int ia, int ib) {
    return field.values[base + g.stride(da) * ia + g.stride(db) * ib];
  };
  auto coord_a = [&](int ia) { return g.coord(da, ia); };
  auto coord_b = [&](int ib) { return g.coord(db, ib); };

  // edge interpolation: point between two nodes where V crosses the level
  auto lerp_a = [&](int ia, int ib) -> detail::SegmentKey {
    const double v0 = value_at(ia, ib), v1 = value_at(ia + 1, ib);
    const double t = (level - v0) / (v1 - v0);
    return {coord_a(ia) + t * (coord_a(ia + 1) - coord_a(ia)), coord_b(ib)};
  };
  auto lerp_b = [&](int ia, int ib) -> detail::SegmentKey {
    const double v0 = value_at(ia, ib), v1 = value_at(ia, ib + 1);
    const double t = (level - v0) / (v1 - v0);
    return {coord_a(ia), coord_b(ib) + t * (coord_b(ib + 1) - coord_b(ib))};
  };

  std::vector<std::array<detail::SegmentKey, 2>> segs;
  for (int ia = 0; ia + 1 < na; ++ia) {
    for (int ib = 0; ib + 1 < nb; ++ib) {
      const double v00 = value_at(ia, ib), v10 = value_at(ia + 1, ib);
      const double v11 = value_at(ia + 1, ib + 1), v01 = value_at(ia, ib + 1);
      int c = 0;
      if (v00 < level) c |= 1;
      if (v10 < level) c |= 2;
      if (v11 < level) c |= 4;
      if (v01 < level) c |= 8;
      if (c == 0 || c == 15) continue;
      // edges: 0 bottom (a varies), 1 right (b varies), 2 top, 3 left
      auto e0 = [&] { return lerp_a(ia, ib); };
      auto e1 = [&] { return lerp_b(ia + 1, ib); };
      auto e2 = [&] { return lerp_a(ia, ib + 1); };
      auto e3 = [&] { return lerp_b(ia, ib); };
      switch (c) {
        case 1:
        case 14: segs.push_back({e3(), e0()}); break;
        case 2:
        case 13: segs.push_back({e0(), e1()}); break;
        case 4:
        case 11: segs.push_back({e1(), e2()}); break;
        case 8:
        case 7: segs.push_back({e2(), e3()}); break;
        case 3:
        case 12: segs.push_back({e3(), e1()}); break;
        case 6:
        case 9: segs.push_back({e0(), e2()}); break;
        case 5:
        case 10: {
          const bool center_inside = 0.25 * (v00 + v10 + v11 + v01) < level;
          const bool corners_inside = (c == 5);
          if (center_inside == corners_inside) {
            // band connecting the two inside corners through the middle
            segs.push_back({e3(), e2()});
            segs.push_back({e0(), e1()});
          } else {
            segs.push_back({e3(), e0()});
            segs.push_back({e1(), e2()});
          }
          break;
        }
        default: break;
      }
    }
  }
  return detail::chain_segments(segs, da, db);
}

}  // namespace spreach
