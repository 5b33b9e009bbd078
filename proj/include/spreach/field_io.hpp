#pragma once

#include <bit>
#include <cstring>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "spreach/errors.hpp"
#include "spreach/io_util.hpp"
#include "spreach/reach.hpp"
#include "spreach/sim.hpp"
#include "spreach/value_field.hpp"

namespace spreach {

/// CSV field format: '#'-prefixed metadata lines (format tag, time,
/// provenance, axes), a header row naming axis columns and value columns,
/// then one node per row in row-major order. Numbers use shortest
/// round-trip notation, so a re-read reproduces the field exactly.
inline std::string field_to_csv(const ValueField& field) {
  std::ostringstream os;
  const Grid& g = field.grid;
  os << "# spreach-field v1\n";
  os << "# time " << fmt_double(field.time) << "\n";
  os << "# provenance " << field.provenance << "\n";
  os << "# axes " << g.dim() << "\n";
  for (int d = 0; d < g.dim(); ++d)
    os << "# axis " << g.axis(d).name << " " << g.axis(d).nodes << " "
       << fmt_double(g.axis(d).min) << " " << fmt_double(g.axis(d).max) << "\n";
  const bool ext = field.has_extremes();
  for (int d = 0; d < g.dim(); ++d) os << g.axis(d).name << ",";
  os << "value";
  if (ext) os << ",running_min,running_max";
  os << "\n";
  std::vector<int> multi(g.dim(), 0);
  for (long i = 0; i < g.size(); ++i) {
    for (int d = 0; d < g.dim(); ++d) os << fmt_double(g.coord(d, multi[d])) << ",";
    os << fmt_double(field.values[i]);
    if (ext)
      os << "," << fmt_double(field.running_min[i]) << ","
         << fmt_double(field.running_max[i]);
    os << "\n";
    for (int d = g.dim() - 1; d >= 0; --d) {
      if (++multi[d] < g.axis(d).nodes) break;
      multi[d] = 0;
    }
  }
  return os.str();
}

inline ValueField field_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  ValueField field;
  std::vector<GridAxis> axes;
  int declared_axes = -1;
  bool got_header = false;
  bool has_ext = false;
  long row = 0;

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto tok = split(line, ' ');
      if (tok.size() >= 2 && tok[1] == "time" && tok.size() >= 3)
        field.time = parse_double(tok[2]);
      else if (tok.size() >= 3 && tok[1] == "provenance")
        field.provenance = std::string(line.substr(std::string("# provenance ").size()));
      else if (tok.size() >= 3 && tok[1] == "axes")
        declared_axes = static_cast<int>(parse_long(tok[2]));
      else if (tok.size() >= 6 && tok[1] == "axis")
        axes.push_back({std::string(tok[2]), static_cast<int>(parse_long(tok[3])),
                        parse_double(tok[4]), parse_double(tok[5])});
      continue;
    }
    if (!got_header) {
      if (declared_axes < 0 || static_cast<int>(axes.size()) != declared_axes)
        throw Error::io("field csv: axis metadata missing or inconsistent");
      field.grid = Grid(axes);
      const auto cols = split(line, ',');
      has_ext = cols.size() == axes.size() + 3;
      if (!has_ext && cols.size() != axes.size() + 1)
        throw Error::io("field csv: unexpected header column count");
      field.values.resize(field.grid.size());
      if (has_ext) {
        field.running_min.resize(field.grid.size());
        field.running_max.resize(field.grid.size());
      }
      got_header = true;
      continue;
    }
    const auto cols = split(line, ',');
    const std::size_t expect = axes.size() + (has_ext ? 3 : 1);
    if (cols.size() != expect) throw Error::io("field csv: bad column count in data row");
    if (row >= field.grid.size()) throw Error::io("field csv: too many data rows");
    field.values[row] = parse_double(cols[axes.size()]);
    if (has_ext) {
      field.running_min[row] = parse_double(cols[axes.size() + 1]);
      field.running_max[row] = parse_double(cols[axes.size() + 2]);
    }
    ++row;
  }
  if (!got_header || row != field.grid.size())
    throw Error::io("field csv: row count does not match grid size");
  return field;
}

namespace detail {

static_assert(std::endian::native == std::endian::little,
              "field binary writer assumes a little-endian host");

template <typename T>
inline void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
inline T take(const std::string& in, std::size_t& off) {
  if (off + sizeof(T) > in.size()) throw Error::io("field binary: truncated");
  T v;
  std::memcpy(&v, in.data() + off, sizeof(T));
  off += sizeof(T);
  return v;
}

}  // namespace detail

/// Compact binary container: magic "SPRF", u32 version, axes (name, nodes,
/// bounds), time, flags, then little-endian 64-bit floats.
inline std::string field_to_binary(const ValueField& field) {
  std::string out;
  out += "SPRF";
  detail::put<std::uint32_t>(out, 1);
  const Grid& g = field.grid;
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim()));
  for (int d = 0; d < g.dim(); ++d) {
    const auto& ax = g.axis(d);
    detail::put<std::uint16_t>(out, static_cast<std::uint16_t>(ax.name.size()));
    out += ax.name;
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(ax.nodes));
    detail::put<double>(out, ax.min);
    detail::put<double>(out, ax.max);
  }
  detail::put<double>(out, field.time);
  detail::put<std::uint8_t>(out, field.has_extremes() ? 1 : 0);
  detail::put<std::uint64_t>(out, static_cast<std::uint64_t>(field.values.size()));
  auto put_array = [&out](const std::vector<double>& a) {
    for (double v : a) detail::put<double>(out, v);
  };
  put_array(field.values);
  if (field.has_extremes()) {
    put_array(field.running_min);
    put_array(field.running_max);
  }
  return out;
}

inline ValueField field_from_binary(const std::string& in) {
  std::size_t off = 0;
  if (in.size() < 8 || in.compare(0, 4, "SPRF") != 0)
    throw Error::io("field binary: bad magic");
  off = 4;
  const auto version = detail::take<std::uint32_t>(in, off);
  if (version != 1) throw Error::io("field binary: unsupported version");
  const auto ndims = detail::take<std::uint32_t>(in, off);
  std::vector<GridAxis> axes;
  for (std::uint32_t d = 0; d < ndims; ++d) {
    const auto name_len = detail::take<std::uint16_t>(in, off);
    if (off + name_len > in.size()) throw Error::io("field binary: truncated");
    std::string name = in.substr(off, name_len);
    off += name_len;
    const auto nodes = detail::take<std::uint32_t>(in, off);
    const double mn = detail::take<double>(in, off);
    const double mx = detail::take<double>(in, off);
    axes.push_back({std::move(name), static_cast<int>(nodes), mn, mx});
  }
  ValueField field;
  field.grid = Grid(axes);
  field.time = detail::take<double>(in, off);
  const auto flags = detail::take<std::uint8_t>(in, off);
  const auto count = detail::take<std::uint64_t>(in, off);
  if (count != static_cast<std::uint64_t>(field.grid.size()))
    throw Error::io("field binary: node count mismatch");
  auto take_array = [&](std::vector<double>& a) {
    a.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) a[i] = detail::take<double>(in, off);
  };
  take_array(field.values);
  if (flags & 1) {
    take_array(field.running_min);
    take_array(field.running_max);
  }
  field.provenance = "loaded";
  return field;
}

/// Mask CSV: node coordinates, the source value the masks were cut from,
/// and 0/1 inner/outer flags, row-major.
inline std::string masks_to_csv(const ReachBounds& rb) {
  std::ostringstream os;
  const Grid& g = rb.grid;
  os << "# spreach-masks v1\n";
  os << "# kind "
     << (rb.kind == ReachKind::brs ? "brs"
                                   : rb.kind == ReachKind::brt_inner ? "brt-inner" : "bst-outer")
     << "\n";
  os << "# eta " << fmt_double(rb.eta) << "\n";
  os << "# t " << fmt_double(rb.t) << "\n";
  for (int d = 0; d < g.dim(); ++d) os << g.axis(d).name << ",";
  os << "source_value,inner,outer\n";
  std::vector<int> multi(g.dim(), 0);
  for (long i = 0; i < g.size(); ++i) {
    for (int d = 0; d < g.dim(); ++d) os << fmt_double(g.coord(d, multi[d])) << ",";
    os << fmt_double(rb.source_values[i]) << "," << int(rb.inner_mask[i]) << ","
       << int(rb.outer_mask[i]) << "\n";
    for (int d = g.dim() - 1; d >= 0; --d) {
      if (++multi[d] < g.axis(d).nodes) break;
      multi[d] = 0;
    }
  }
  return os.str();
}

/// Trajectory CSV: time, state components, applied u and d (the values held
/// on the segment starting at that row; the final row repeats the last).
inline std::string trajectory_to_csv(const Trajectory& traj) {
  std::ostringstream os;
  const int nz = traj.z.empty() ? 0 : static_cast<int>(traj.z[0].size());
  const int ny = traj.y.empty() ? 0 : static_cast<int>(traj.y[0].size());
  const int nu = traj.u_applied.empty() ? 0 : static_cast<int>(traj.u_applied[0].size());
  const int nd = traj.d_applied.empty() ? 0 : static_cast<int>(traj.d_applied[0].size());
  os << "# spreach-trajectory v1\n";
  os << "time";
  for (int i = 0; i < nz; ++i) os << ",z" << i;
  for (int i = 0; i < ny; ++i) os << ",y" << i;
  for (int i = 0; i < nu; ++i) os << ",u" << i;
  for (int i = 0; i < nd; ++i) os << ",d" << i;
  os << "\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    os << fmt_double(traj.times[k]);
    for (int i = 0; i < nz; ++i) os << "," << fmt_double(traj.z[k][i]);
    for (int i = 0; i < ny; ++i) os << "," << fmt_double(traj.y[k][i]);
    if (nu > 0) {
      const std::size_t seg = std::min(k, traj.u_applied.size() - 1);
      for (int i = 0; i < nu; ++i) os << "," << fmt_double(traj.u_applied[seg][i]);
    }
    if (nd > 0) {
      const std::size_t seg = std::min(k, traj.d_applied.size() - 1);
      for (int i = 0; i < nd; ++i) os << "," << fmt_double(traj.d_applied[seg][i]);
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace spreach
