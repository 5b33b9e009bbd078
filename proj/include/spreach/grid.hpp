#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "spreach/errors.hpp"

namespace spreach {

struct GridAxis {
  std::string name;
  int nodes = 0;
  double min = 0.0;
  double max = 0.0;
};

/// Rectangular node grid. Row-major linearization (last axis fastest) is the
/// canonical ordering for value arrays, masks and file exports.
class Grid {
 public:
  Grid() = default;

  explicit Grid(std::vector<GridAxis> axes, int ghost_layers = 1)
      : axes_(std::move(axes)), ghost_layers_(ghost_layers) {
    if (axes_.empty()) throw Error::domain("Grid: needs at least one axis");
    size_ = 1;
    strides_.assign(axes_.size(), 1);
    for (const auto& ax : axes_) {
      if (ax.nodes < 3)
        throw Error::domain("Grid axis '" + ax.name + "': node count must be >= 3");
      if (!(ax.min < ax.max))
        throw Error::domain("Grid axis '" + ax.name + "': min must be < max");
      size_ *= ax.nodes;
      if (size_ > 1'000'000'000L) throw Error::config("Grid: total node count too large");
    }
    for (int d = dim() - 2; d >= 0; --d)
      strides_[d] = strides_[d + 1] * axes_[d + 1].nodes;
  }

  /// Uniform axes over a box, named x0, x1, ...
  static Grid uniform(const std::vector<double>& min, const std::vector<double>& max,
                      const std::vector<int>& nodes, const std::string& prefix = "x") {
    if (min.size() != max.size() || min.size() != nodes.size())
      throw Error::dimension("Grid::uniform: min/max/nodes length mismatch");
    std::vector<GridAxis> axes(min.size());
    for (size_t d = 0; d < min.size(); ++d)
      axes[d] = {prefix + std::to_string(d), nodes[d], min[d], max[d]};
    return Grid(std::move(axes));
  }

  int dim() const { return static_cast<int>(axes_.size()); }
  long size() const { return size_; }
  const std::vector<GridAxis>& axes() const { return axes_; }
  const GridAxis& axis(int d) const { return axes_[d]; }
  int ghost_layers() const { return ghost_layers_; }
  long stride(int d) const { return strides_[d]; }

  double spacing(int d) const {
    return (axes_[d].max - axes_[d].min) / (axes_[d].nodes - 1);
  }

  double coord(int d, int i) const {
    if (i == 0) return axes_[d].min;
    if (i == axes_[d].nodes - 1) return axes_[d].max;
    return axes_[d].min + spacing(d) * i;
  }

  long index(const std::vector<int>& multi) const {
    long idx = 0;
    for (int d = 0; d < dim(); ++d) idx += strides_[d] * multi[d];
    return idx;
  }

  void unindex(long idx, std::vector<int>& multi) const {
    multi.resize(axes_.size());
    for (int d = dim() - 1; d >= 0; --d) {
      multi[d] = static_cast<int>(idx % axes_[d].nodes);
      idx /= axes_[d].nodes;
    }
  }

  Eigen::VectorXd point(long idx) const {
    std::vector<int> multi;
    unindex(idx, multi);
    Eigen::VectorXd p(dim());
    for (int d = 0; d < dim(); ++d) p[d] = coord(d, multi[d]);
    return p;
  }

  /// Axis-wise equality of shape and bounds (used to match z-grids).
  bool same_axes_prefix(const Grid& other, int count) const {
    if (count > dim() || count > other.dim()) return false;
    for (int d = 0; d < count; ++d) {
      const auto& a = axes_[d];
      const auto& b = other.axes_[d];
      if (a.nodes != b.nodes || a.min != b.min || a.max != b.max) return false;
    }
    return true;
  }

  bool operator==(const Grid& other) const {
    return dim() == other.dim() && same_axes_prefix(other, dim());
  }

 private:
  std::vector<GridAxis> axes_;
  int ghost_layers_ = 1;
  long size_ = 0;
  std::vector<long> strides_;
};

}  // namespace spreach
