#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "spreach/box_set.hpp"
#include "spreach/errors.hpp"
#include "spreach/rng.hpp"
#include "spreach/systems.hpp"

namespace spreach {

/// Genetic circuit with negative feedback: slow state z is the active
/// transcription factor, fast state y the inactive one.
///   zdot = alpha d1 y - d2 z
///   eps ydot = d3 u^2/(u^2 + z^2) - d1 y
/// Factored as f = -d2 z, g = d3 u^2/(u^2+z^2), M = -alpha, A = -d1; this is
/// the unique factorization with A independent of z.
/// Default boxes U = [0.1, 1], D = [0.5, 2]^3 with vertex-only sampling:
/// the dynamics are affine or monotone in u and in each d component, so the
/// min/max over the boxes is attained at vertices and the 2-point lattice is
/// exact. Raise samples_per_dim to cross-check against dense search.
inline SPSystem make_genetic_circuit(double alpha,
                                     std::optional<BoxSet> u_set = std::nullopt,
                                     std::optional<BoxSet> d_set = std::nullopt) {
  if (!(alpha > 0.0))
    throw Error::domain("genetic circuit: alpha must be > 0, got " + std::to_string(alpha));
  SPSystem sys;
  sys.name = "genetic_circuit";
  sys.n_z = 1;
  sys.n_y = 1;
  sys.u_set = u_set ? *u_set : BoxSet(Eigen::VectorXd::Constant(1, 0.1),
                                      Eigen::VectorXd::Constant(1, 1.0), 2);
  sys.d_set = d_set ? *d_set : BoxSet::cube(0.5, 2.0, 3, 2);
  if (sys.u_set.dim() != 1) throw Error::dimension("genetic circuit: u_set must be 1-D");
  if (sys.d_set.dim() != 3) throw Error::dimension("genetic circuit: d_set must be 3-D");

  sys.f = [](const Eigen::VectorXd& z, const Eigen::VectorXd&,
             const Eigen::VectorXd& d) -> Eigen::VectorXd {
    return Eigen::VectorXd::Constant(1, -d[1] * z[0]);
  };
  sys.g = [](const Eigen::VectorXd& z, const Eigen::VectorXd& u,
             const Eigen::VectorXd& d) -> Eigen::VectorXd {
    const double u2 = u[0] * u[0];
    return Eigen::VectorXd::Constant(1, d[2] * u2 / (u2 + z[0] * z[0]));
  };
  sys.M = [alpha](const Eigen::VectorXd&) -> Eigen::MatrixXd {
    return Eigen::MatrixXd::Constant(1, 1, -alpha);
  };
  sys.A = [](const Eigen::VectorXd&, const Eigen::VectorXd&,
             const Eigen::VectorXd& d) -> Eigen::MatrixXd {
    return Eigen::MatrixXd::Constant(1, 1, -d[0]);
  };
  return sys;
}

/// Weighted directed edge in a metabolic reaction network. Metabolite nodes
/// are 0..n-1; the terminal product node p is index n.
struct MrnEdge {
  int from = 0;
  int to = 0;
  double weight = 0.0;
};

struct MrnNetwork {
  int n_metabolites = 0;
  std::vector<MrnEdge> edges;

  int p_node() const { return n_metabolites; }

  /// Full (n+1)x(n+1) adjacency T with T(i,j) = weight of edge j -> i.
  Eigen::MatrixXd adjacency() const {
    const int n = n_metabolites + 1;
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : edges) {
      if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n)
        throw Error::domain("MRN edge references node outside {m1..mN, p}");
      if (e.weight < 0.0) throw Error::domain("MRN edge weight must be >= 0");
      T(e.to, e.from) += e.weight;
    }
    return T;
  }

  /// Metabolite submatrix of T with each diagonal entry reduced by the
  /// full column sum. Columns of [[A],[C]] sum to zero: all outflow of a
  /// metabolite goes to other metabolites or to p.
  Eigen::MatrixXd a_matrix() const {
    const Eigen::MatrixXd T = adjacency();
    const int n = n_metabolites;
    Eigen::MatrixXd A = T.topLeftCorner(n, n);
    for (int i = 0; i < n; ++i) A(i, i) -= T.col(i).sum();
    return A;
  }

  /// Row of T for node p, restricted to metabolite columns.
  Eigen::RowVectorXd c_row() const {
    const Eigen::MatrixXd T = adjacency();
    return T.row(p_node()).head(n_metabolites);
  }
};

/// Random MRN: a chain backbone m1 -> m2 -> ... -> mN -> p guaranteeing
/// every metabolite drains to p, plus seeded forward shortcut edges.
/// Weights are i.i.d. uniform(0,1); backbone weights are kept away from
/// zero so the chain never degenerates.
inline MrnNetwork make_random_mrn_network(int n_metabolites, std::uint64_t seed,
                                          double shortcut_prob = 0.15) {
  if (n_metabolites < 1) throw Error::domain("MRN needs at least one metabolite");
  MrnNetwork net;
  net.n_metabolites = n_metabolites;
  Rng rng(Rng::mix(seed, 0x6d726e));
  for (int i = 0; i < n_metabolites; ++i) {
    const int next = i + 1;  // m_{i+2} or p
    net.edges.push_back({i, next, 0.2 + 0.8 * rng.uniform()});
  }
  for (int i = 0; i < n_metabolites; ++i) {
    for (int j = i + 2; j <= n_metabolites; ++j) {
      if (rng.uniform() < shortcut_prob)
        net.edges.push_back({i, j, rng.uniform()});
    }
  }
  return net;
}

/// Metabolic reaction network in a growing population.
/// Slow states: z1 product concentration, z2 population size, z3 secondary
/// product count. Fast states: the N metabolite concentrations.
///   z1dot = C d1 y - z1^2/(z1+1)
///   z2dot = (z1/(z1+1) - z2) z2
///   z3dot = z2 u2
///   eps ydot = A d1 y + e1 u1
/// Defaults: U = [0,1]^2, D = [0.9,1.1]; vertex-only sampling is exact here
/// because the dynamics are affine in u1, u2 and d1.
inline SPSystem make_mrn(const MrnNetwork& net,
                         std::optional<BoxSet> u_set = std::nullopt,
                         std::optional<BoxSet> d_set = std::nullopt) {
  SPSystem sys;
  sys.name = "mrn";
  sys.n_z = 3;
  sys.n_y = net.n_metabolites;
  sys.u_set = u_set ? *u_set : BoxSet::cube(0.0, 1.0, 2, 2);
  sys.d_set = d_set ? *d_set : BoxSet::cube(0.9, 1.1, 1, 2);
  if (sys.u_set.dim() != 2) throw Error::dimension("mrn: u_set must be 2-D");
  if (sys.d_set.dim() != 1) throw Error::dimension("mrn: d_set must be 1-D");

  const Eigen::MatrixXd A_mrn = net.a_matrix();
  const Eigen::RowVectorXd C_mrn = net.c_row();
  const int ny = net.n_metabolites;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(A_mrn);
  if (!lu.isInvertible())
    throw Error::domain("mrn: metabolite not connected to p (A matrix singular)");
  // CA^{-1} solved once; row vector, ny entries.
  const Eigen::RowVectorXd CAinv =
      A_mrn.transpose().fullPivLu().solve(C_mrn.transpose()).transpose();

  Eigen::MatrixXd M_const = Eigen::MatrixXd::Zero(3, ny);
  M_const.row(0) = CAinv;

  sys.f = [](const Eigen::VectorXd& z, const Eigen::VectorXd& u,
             const Eigen::VectorXd&) -> Eigen::VectorXd {
    const double growth = z[0] / (z[0] + 1.0);
    Eigen::VectorXd out(3);
    out[0] = -growth * z[0];
    out[1] = (growth - z[1]) * z[1];
    out[2] = z[1] * u[1];
    return out;
  };
  sys.g = [ny](const Eigen::VectorXd&, const Eigen::VectorXd& u,
               const Eigen::VectorXd&) -> Eigen::VectorXd {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(ny);
    out[0] = u[0];
    return out;
  };
  sys.M = [M_const](const Eigen::VectorXd&) -> Eigen::MatrixXd { return M_const; };
  sys.A = [A_mrn](const Eigen::VectorXd&, const Eigen::VectorXd&,
                  const Eigen::VectorXd& d) -> Eigen::MatrixXd {
    return A_mrn * d[0];
  };
  return sys;
}

}  // namespace spreach
