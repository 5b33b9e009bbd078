#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "spreach/errors.hpp"

namespace spreach {

/// Compact axis-aligned box in R^n with a discretization count attached.
/// Searches over the box (Hamiltonian min/max, stability sweeps) run on the
/// regular sample lattice; the lattice always contains the box vertices, so
/// for dynamics monotone or affine in each coordinate the discretized
/// optimum equals the exact one.
struct BoxSet {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  int samples_per_dim = 2;

  BoxSet() = default;
  BoxSet(Eigen::VectorXd lo, Eigen::VectorXd up, int samples = 2)
      : lower(std::move(lo)), upper(std::move(up)), samples_per_dim(samples) {
    validate();
  }

  static BoxSet cube(double lo, double up, int dims, int samples = 2) {
    return BoxSet(Eigen::VectorXd::Constant(dims, lo),
                  Eigen::VectorXd::Constant(dims, up), samples);
  }

  int dim() const { return static_cast<int>(lower.size()); }

  void validate() const {
    if (lower.size() != upper.size())
      throw Error::dimension("BoxSet: lower has " + std::to_string(lower.size()) +
                             " entries, upper has " + std::to_string(upper.size()));
    for (int i = 0; i < dim(); ++i) {
      if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]))
        throw Error::domain("BoxSet: non-finite bound in dimension " + std::to_string(i));
      if (lower[i] > upper[i])
        throw Error::domain("BoxSet: lower > upper in dimension " + std::to_string(i));
    }
    if (samples_per_dim < 2)
      throw Error::domain("BoxSet: samples_per_dim must be >= 2, got " +
                          std::to_string(samples_per_dim));
  }

  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const {
    if (x.size() != lower.size()) return false;
    for (int i = 0; i < dim(); ++i)
      if (x[i] < lower[i] - tol || x[i] > upper[i] + tol) return false;
    return true;
  }

  /// i-th sample along dimension d; endpoints are returned exactly.
  double sample_coord(int d, int i) const {
    if (i == 0) return lower[d];
    if (i == samples_per_dim - 1) return upper[d];
    const double step = (upper[d] - lower[d]) / (samples_per_dim - 1);
    return lower[d] + step * i;
  }

  long lattice_size() const {
    long n = 1;
    for (int i = 0; i < dim(); ++i) {
      n *= samples_per_dim;
      if (n > (1L << 31))
        throw Error::domain("BoxSet: sample lattice too large");
    }
    return n;
  }

  /// k-th lattice point in row-major order (dimension 0 slowest).
  Eigen::VectorXd lattice_point(long k) const {
    Eigen::VectorXd p(dim());
    for (int d = dim() - 1; d >= 0; --d) {
      p[d] = sample_coord(d, static_cast<int>(k % samples_per_dim));
      k /= samples_per_dim;
    }
    return p;
  }

  /// Vertex selected by bitmask (bit d set -> upper bound in dimension d).
  Eigen::VectorXd vertex(unsigned mask) const {
    Eigen::VectorXd p(dim());
    for (int d = 0; d < dim(); ++d) p[d] = (mask >> d) & 1u ? upper[d] : lower[d];
    return p;
  }

  long vertex_count() const { return 1L << dim(); }
};

}  // namespace spreach
