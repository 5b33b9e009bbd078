#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "spreach/box_set.hpp"
#include "spreach/errors.hpp"

namespace spreach {

using DriftFn = std::function<Eigen::VectorXd(
    const Eigen::VectorXd& z, const Eigen::VectorXd& u, const Eigen::VectorXd& d)>;
using CouplingFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd& z)>;
using FastMatrixFn = std::function<Eigen::MatrixXd(
    const Eigen::VectorXd& z, const Eigen::VectorXd& u, const Eigen::VectorXd& d)>;

/// Two-timescale game dynamics
///   zdot = f(z,u,d) + M(z) A(z,u,d) y
///   eps * ydot = g(z,u,d) + A(z,u,d) y
/// with compact control/disturbance boxes. The timescale parameter eps is
/// not stored; it is supplied per evaluation or per solve.
struct SPSystem {
  int n_z = 0;
  int n_y = 0;
  DriftFn f;        // slow drift, R^{n_z}
  DriftFn g;        // fast drift, R^{n_y}
  CouplingFn M;     // n_z x n_y
  FastMatrixFn A;   // n_y x n_y
  BoxSet u_set;
  BoxSet d_set;
  std::string name = "unnamed";
};

/// Slow-only dynamics zdot = F(z,u,d). Either derived from an SPSystem
/// (F = f - M g) or handwritten.
struct ReducedSystem {
  int n_z = 0;
  DriftFn F;
  BoxSet u_set;
  BoxSet d_set;
  std::string provenance = "handwritten";
};

namespace detail {

inline void require_dim(const Eigen::VectorXd& v, int n, const char* field) {
  if (v.size() != n)
    throw Error::dimension(std::string(field) + " has length " +
                           std::to_string(v.size()) + ", expected " + std::to_string(n));
}

inline void require_in_box(const Eigen::VectorXd& v, const BoxSet& box, const char* field) {
  if (!box.contains(v, 1e-12))
    throw Error::domain(std::string(field) + " lies outside its box set");
}

/// min over u-blocks of (max over d within the block) of lambda . F,
/// over combo values laid out u-major: fvals[(ku*nd + kd)*dim + c].
/// Strict comparisons keep the first optimum, so the lowest lattice
/// index wins ties in both directions.
inline std::pair<double, long> minmax_over(const double* fvals, int dim, long nu,
                                           long nd, const double* lambda) {
  double best = std::numeric_limits<double>::infinity();
  long best_u = 0;
  for (long ku = 0; ku < nu; ++ku) {
    double worst = -std::numeric_limits<double>::infinity();
    const double* block = fvals + ku * nd * dim;
    for (long kd = 0; kd < nd; ++kd) {
      const double* fv = block + kd * dim;
      double s = 0.0;
      for (int c = 0; c < dim; ++c) s += lambda[c] * fv[c];
      if (s > worst) worst = s;
    }
    if (worst < best) {
      best = worst;
      best_u = ku;
    }
  }
  return {best, best_u};
}

/// max over d of (min over u) with the same u-major layout.
inline double maxmin_over(const double* fvals, int dim, long nu, long nd,
                          const double* lambda) {
  double best = -std::numeric_limits<double>::infinity();
  for (long kd = 0; kd < nd; ++kd) {
    double inner = std::numeric_limits<double>::infinity();
    for (long ku = 0; ku < nu; ++ku) {
      const double* fv = fvals + (ku * nd + kd) * dim;
      double s = 0.0;
      for (int c = 0; c < dim; ++c) s += lambda[c] * fv[c];
      if (s < inner) inner = s;
    }
    if (inner > best) best = inner;
  }
  return best;
}

/// Evaluate F over the full u x d lattice (u-major) into `out`, appending
/// dim doubles per combo. Throws on non-finite values, naming the point.
inline void fill_lattice_values(const ReducedSystem& red, const Eigen::VectorXd& z,
                                std::vector<double>& out) {
  const long nu = red.u_set.lattice_size();
  const long nd = red.d_set.lattice_size();
  out.clear();
  out.reserve(static_cast<size_t>(nu * nd) * red.n_z);
  for (long ku = 0; ku < nu; ++ku) {
    const Eigen::VectorXd u = red.u_set.lattice_point(ku);
    for (long kd = 0; kd < nd; ++kd) {
      const Eigen::VectorXd d = red.d_set.lattice_point(kd);
      const Eigen::VectorXd fv = red.F(z, u, d);
      if (fv.size() != red.n_z)
        throw Error::dimension("F returned length " + std::to_string(fv.size()) +
                               ", expected " + std::to_string(red.n_z));
      for (int c = 0; c < red.n_z; ++c) {
        if (!std::isfinite(fv[c]))
          throw Error::numeric("non-finite F at z=(" +
                               std::to_string(z.size() ? z[0] : 0.0) + ",...), u[0]=" +
                               std::to_string(u.size() ? u[0] : 0.0) + ", d[0]=" +
                               std::to_string(d.size() ? d[0] : 0.0));
        out.push_back(fv[c]);
      }
    }
  }
}

}  // namespace detail

/// Evaluate the SP right-hand side at one point.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> eval_sp_rhs(
    const SPSystem& sys, double eps, const Eigen::VectorXd& z, const Eigen::VectorXd& y,
    const Eigen::VectorXd& u, const Eigen::VectorXd& d) {
  if (!(eps > 0.0)) throw Error::domain("eps must be > 0, got " + std::to_string(eps));
  detail::require_dim(z, sys.n_z, "z");
  detail::require_dim(y, sys.n_y, "y");
  detail::require_dim(u, sys.u_set.dim(), "u");
  detail::require_dim(d, sys.d_set.dim(), "d");
  detail::require_in_box(u, sys.u_set, "u");
  detail::require_in_box(d, sys.d_set, "d");

  const Eigen::VectorXd fv = sys.f(z, u, d);
  const Eigen::VectorXd gv = sys.g(z, u, d);
  const Eigen::MatrixXd Mv = sys.M(z);
  const Eigen::MatrixXd Av = sys.A(z, u, d);
  if (fv.size() != sys.n_z) throw Error::dimension("f output has wrong length");
  if (gv.size() != sys.n_y) throw Error::dimension("g output has wrong length");
  if (Mv.rows() != sys.n_z || Mv.cols() != sys.n_y)
    throw Error::dimension("M output has wrong shape");
  if (Av.rows() != sys.n_y || Av.cols() != sys.n_y)
    throw Error::dimension("A output has wrong shape");

  Eigen::VectorXd zdot = fv + Mv * (Av * y);
  Eigen::VectorXd ydot = (gv + Av * y) / eps;
  return {std::move(zdot), std::move(ydot)};
}

/// Reduced slow model F = f - M g, sharing the parent's evaluation maps so
/// the identity holds along the same arithmetic path at every probe.
inline ReducedSystem derive_reduced(const SPSystem& sys) {
  ReducedSystem red;
  red.n_z = sys.n_z;
  red.u_set = sys.u_set;
  red.d_set = sys.d_set;
  red.provenance = "derived:" + sys.name;
  const DriftFn f = sys.f;
  const DriftFn g = sys.g;
  const CouplingFn M = sys.M;
  red.F = [f, g, M](const Eigen::VectorXd& z, const Eigen::VectorXd& u,
                    const Eigen::VectorXd& d) -> Eigen::VectorXd {
    return f(z, u, d) - M(z) * g(z, u, d);
  };
  return red;
}

struct MinmaxResult {
  double value = 0.0;
  long u_index = 0;       // lattice index of the minimizing control
  Eigen::VectorXd u_opt;  // the control itself
};

/// H(z, lambda) = min over the U lattice of max over the D lattice of
/// lambda . F(z,u,d). Ties keep the lowest lattice index.
inline MinmaxResult hamiltonian_minmax_arg(const ReducedSystem& red,
                                           const Eigen::VectorXd& z,
                                           const Eigen::VectorXd& lambda) {
  detail::require_dim(z, red.n_z, "z");
  detail::require_dim(lambda, red.n_z, "lambda");
  std::vector<double> fvals;
  detail::fill_lattice_values(red, z, fvals);
  auto [value, ku] = detail::minmax_over(fvals.data(), red.n_z, red.u_set.lattice_size(),
                                         red.d_set.lattice_size(), lambda.data());
  return {value, ku, red.u_set.lattice_point(ku)};
}

inline double hamiltonian_minmax(const ReducedSystem& red, const Eigen::VectorXd& z,
                                 const Eigen::VectorXd& lambda) {
  return hamiltonian_minmax_arg(red, z, lambda).value;
}

/// Optimization order swapped: max over D of min over U.
inline double hamiltonian_maxmin(const ReducedSystem& red, const Eigen::VectorXd& z,
                                 const Eigen::VectorXd& lambda) {
  detail::require_dim(z, red.n_z, "z");
  detail::require_dim(lambda, red.n_z, "lambda");
  std::vector<double> fvals;
  detail::fill_lattice_values(red, z, fvals);
  return detail::maxmin_over(fvals.data(), red.n_z, red.u_set.lattice_size(),
                             red.d_set.lattice_size(), lambda.data());
}

/// Joint dynamics of the SP system viewed as a single drift over x = (z, y),
/// usable with the generic grid solver. Shares the parent's maps.
inline ReducedSystem joint_system(const SPSystem& sys, double eps) {
  if (!(eps > 0.0)) throw Error::domain("eps must be > 0, got " + std::to_string(eps));
  ReducedSystem joint;
  joint.n_z = sys.n_z + sys.n_y;
  joint.u_set = sys.u_set;
  joint.d_set = sys.d_set;
  joint.provenance = "joint:" + sys.name;
  const int nz = sys.n_z, ny = sys.n_y;
  const DriftFn f = sys.f;
  const DriftFn g = sys.g;
  const CouplingFn M = sys.M;
  const FastMatrixFn A = sys.A;
  joint.F = [nz, ny, eps, f, g, M, A](const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                      const Eigen::VectorXd& d) -> Eigen::VectorXd {
    const Eigen::VectorXd z = x.head(nz);
    const Eigen::VectorXd y = x.tail(ny);
    const Eigen::MatrixXd Av = A(z, u, d);
    Eigen::VectorXd out(nz + ny);
    out.head(nz) = f(z, u, d) + M(z) * (Av * y);
    out.tail(ny) = (g(z, u, d) + Av * y) / eps;
    return out;
  };
  return joint;
}

}  // namespace spreach
