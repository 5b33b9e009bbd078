#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "spreach/box_set.hpp"
#include "spreach/errors.hpp"
#include "spreach/rng.hpp"
#include "spreach/systems.hpp"

namespace spreach {

/// Quadratic certificate for the fast dynamics: A'P + PA < -nu I on every
/// certified sample, with the decay envelope constants
///   alpha = sqrt(lmax(P)/lmin(P)),  kappa = nu / (2 lmax(P))
/// so that the boundary-layer flow satisfies |w(s)| <= alpha e^{-kappa s} |w(0)|.
struct LyapunovCert {
  Eigen::MatrixXd P;
  double nu = 0.0;
  double alpha_decay = 1.0;
  double kappa = 0.0;
};

struct StabilityWitness {
  Eigen::VectorXd z, u, d;
  double eigenvalue = 0.0;  // offending lmax(A'P + PA) >= -tol
};

struct StabilityResult {
  std::optional<LyapunovCert> cert;
  std::optional<StabilityWitness> witness;
  long sample_count = 0;
  std::uint64_t seed = 0;
  double tol = 0.0;

  bool passed() const { return cert.has_value(); }
};

struct RegularitySample {
  Eigen::VectorXd z, u, d;
  double value = 0.0;
};

struct RegularityReport {
  double k_estimate = 0.0;
  long sample_count = 0;
  RegularitySample worst_coupling;  // arg max of |M| + |A|
  RegularitySample worst_drift;     // arg max of (|f| + |g|)/(1 + |z|)
  std::uint64_t seed = 0;
};

struct IsaacsResult {
  double max_gap = 0.0;
  Eigen::VectorXd worst_z, worst_lambda;
  long n_probes = 0;
  std::uint64_t seed = 0;
  double tol = 0.0;
  bool passed() const { return max_gap <= tol; }
};

struct DecayResult {
  double worst_ratio = 0.0;
  long n_trials = 0;
  std::uint64_t seed = 0;
  double tol = 0.0;
  bool passed() const { return worst_ratio <= 1.0 + tol; }
};

namespace detail {

inline double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  return m.jacobiSvd().singularValues()(0);
}

inline Eigen::VectorXd random_in_box(Rng& rng, const Eigen::VectorXd& lo,
                                     const Eigen::VectorXd& hi) {
  Eigen::VectorXd x(lo.size());
  for (int i = 0; i < lo.size(); ++i) x[i] = rng.uniform(lo[i], hi[i]);
  return x;
}

}  // namespace detail

/// Sampled estimate of the regularity constant
///   K = max( |M| + |A|, (|f| + |g|) / (1 + |z|) )
/// over random z in probe_region and the u x d lattice. The estimate is
/// monotone in the sample count: for a fixed seed the z sequence for n
/// samples is a prefix of the sequence for any larger count.
inline RegularityReport estimate_regularity_bounds(const SPSystem& sys,
                                                   const BoxSet& probe_region,
                                                   long n_samples,
                                                   std::uint64_t seed = 0) {
  if (n_samples < 1) throw Error::domain("regularity: n_samples must be >= 1");
  if (probe_region.dim() != sys.n_z)
    throw Error::dimension("regularity: probe_region must match the slow dimension");

  RegularityReport rep;
  rep.seed = seed;
  Rng rng(Rng::mix(seed, 0x7265));
  const long nu = sys.u_set.lattice_size();
  const long nd = sys.d_set.lattice_size();

  for (long s = 0; s < n_samples; ++s) {
    const Eigen::VectorXd z =
        detail::random_in_box(rng, probe_region.lower, probe_region.upper);
    const double z_norm = z.norm();
    const Eigen::MatrixXd Mv = sys.M(z);
    const double m_norm = detail::spectral_norm(Mv);
    for (long ku = 0; ku < nu; ++ku) {
      const Eigen::VectorXd u = sys.u_set.lattice_point(ku);
      for (long kd = 0; kd < nd; ++kd) {
        const Eigen::VectorXd d = sys.d_set.lattice_point(kd);
        const double coupling = m_norm + detail::spectral_norm(sys.A(z, u, d));
        const double drift =
            (sys.f(z, u, d).norm() + sys.g(z, u, d).norm()) / (1.0 + z_norm);
        if (!std::isfinite(coupling) || !std::isfinite(drift))
          throw Error::numeric("regularity: non-finite evaluation at z[0]=" +
                               std::to_string(z.size() ? z[0] : 0.0));
        ++rep.sample_count;
        if (coupling > rep.worst_coupling.value)
          rep.worst_coupling = {z, u, d, coupling};
        if (drift > rep.worst_drift.value) rep.worst_drift = {z, u, d, drift};
      }
    }
  }
  rep.k_estimate = std::max(rep.worst_coupling.value, rep.worst_drift.value);
  return rep;
}

/// Certify A'P + PA < 0 over sampled (z, u, d): random z in z_region, full
/// u x d lattice (vertices included). On success the certificate carries
///   nu = min over samples of -lmax(A'P + PA) > stability_tol
/// and the decay constants alpha, kappa derived from P's eigenvalues.
inline StabilityResult check_stability(const SPSystem& sys, const Eigen::MatrixXd& P,
                                       const BoxSet& z_region, long n_samples,
                                       std::uint64_t seed = 0,
                                       double stability_tol = 1e-9) {
  if (P.rows() != sys.n_y || P.cols() != sys.n_y)
    throw Error::dimension("stability: P must be " + std::to_string(sys.n_y) + "x" +
                           std::to_string(sys.n_y));
  if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw Error::domain("stability: P is not symmetric within 1e-12");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> p_eig(P);
  if (p_eig.info() != Eigen::Success)
    throw Error::numeric("stability: eigensolver failed on P");
  const double p_min = p_eig.eigenvalues().minCoeff();
  const double p_max = p_eig.eigenvalues().maxCoeff();
  if (p_min <= 0.0)
    throw Error::domain("stability: P is not positive definite (lmin = " +
                        std::to_string(p_min) + ")");
  if (n_samples < 1) throw Error::domain("stability: n_samples must be >= 1");

  StabilityResult res;
  res.seed = seed;
  res.tol = stability_tol;
  Rng rng(Rng::mix(seed, 0x7374));
  const long nu_lat = sys.u_set.lattice_size();
  const long nd_lat = sys.d_set.lattice_size();

  double nu_margin = std::numeric_limits<double>::infinity();
  StabilityWitness worst;
  for (long s = 0; s < n_samples; ++s) {
    const Eigen::VectorXd z = detail::random_in_box(rng, z_region.lower, z_region.upper);
    for (long ku = 0; ku < nu_lat; ++ku) {
      const Eigen::VectorXd u = sys.u_set.lattice_point(ku);
      for (long kd = 0; kd < nd_lat; ++kd) {
        const Eigen::VectorXd d = sys.d_set.lattice_point(kd);
        const Eigen::MatrixXd A = sys.A(z, u, d);
        const Eigen::MatrixXd S = A.transpose() * P + P * A;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (S + S.transpose()));
        if (eig.info() != Eigen::Success)
          throw Error::numeric("stability: eigensolver failed on A'P + PA");
        const double lmax = eig.eigenvalues().maxCoeff();
        ++res.sample_count;
        if (-lmax < nu_margin) {
          nu_margin = -lmax;
          worst = {z, u, d, lmax};
        }
      }
    }
  }

  if (nu_margin > stability_tol) {
    LyapunovCert cert;
    cert.P = P;
    cert.nu = nu_margin;
    cert.alpha_decay = std::sqrt(p_max / p_min);
    cert.kappa = nu_margin / (2.0 * p_max);
    res.cert = cert;
  } else {
    res.witness = worst;
  }
  return res;
}

/// Largest |minmax - maxmin| Hamiltonian gap over random probes
/// (z in z_region, lambda uniform in [-lambda_scale, lambda_scale]^n).
inline IsaacsResult check_isaacs(const ReducedSystem& red, const BoxSet& z_region,
                                 long n_probes, double lambda_scale,
                                 std::uint64_t seed = 0, double isaacs_tol = 1e-9) {
  if (n_probes < 1) throw Error::domain("isaacs: n_probes must be >= 1");
  if (z_region.dim() != red.n_z)
    throw Error::dimension("isaacs: z_region must match the slow dimension");
  IsaacsResult res;
  res.seed = seed;
  res.tol = isaacs_tol;
  res.n_probes = n_probes;
  Rng rng(Rng::mix(seed, 0x6973));
  for (long s = 0; s < n_probes; ++s) {
    const Eigen::VectorXd z = detail::random_in_box(rng, z_region.lower, z_region.upper);
    Eigen::VectorXd lambda(red.n_z);
    for (int i = 0; i < red.n_z; ++i) lambda[i] = rng.uniform(-lambda_scale, lambda_scale);
    const double gap =
        std::abs(hamiltonian_minmax(red, z, lambda) - hamiltonian_maxmin(red, z, lambda));
    if (gap > res.max_gap) {
      res.max_gap = gap;
      res.worst_z = z;
      res.worst_lambda = lambda;
    }
  }
  return res;
}

/// Worst observed-to-certified ratio |w(s)| / (alpha e^{-kappa s} |w(0)|)
/// for one trial of the frozen-z difference dynamics wdot = A(z,u,d) w under
/// the given signal, sampled at every RK4 step. A zero initial offset stays
/// zero; its ratio is 0 by convention.
inline double boundary_layer_trial_ratio(
    const SPSystem& sys, const LyapunovCert& cert, const Eigen::VectorXd& z,
    double horizon, const Eigen::VectorXd& w0,
    const std::function<void(double, Eigen::VectorXd&, Eigen::VectorXd&)>& signal_at,
    double h) {
  detail::require_dim(z, sys.n_z, "z");
  detail::require_dim(w0, sys.n_y, "w0");
  const double w0_norm = w0.norm();
  if (w0_norm == 0.0) return 0.0;
  const double alpha = cert.alpha_decay;
  const double kappa = cert.kappa;
  Eigen::VectorXd w = w0, u(sys.u_set.dim()), d(sys.d_set.dim());
  double worst = 1.0 / alpha;  // ratio at s = 0
  double s = 0.0;
  while (s < horizon - 1e-12) {
    const double dt = std::min(h, horizon - s);
    signal_at(s, u, d);
    const Eigen::MatrixXd A = sys.A(z, u, d);
    const Eigen::VectorXd k1 = A * w;
    const Eigen::VectorXd k2 = A * (w + 0.5 * dt * k1);
    const Eigen::VectorXd k3 = A * (w + 0.5 * dt * k2);
    const Eigen::VectorXd k4 = A * (w + dt * k3);
    w += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    s += dt;
    if (!w.allFinite()) throw Error::numeric("decay: integrator produced non-finite state");
    const double envelope = alpha * std::exp(-kappa * s) * w0_norm;
    worst = std::max(worst, w.norm() / envelope);
  }
  return worst;
}

/// Check the certified decay envelope on the frozen-z difference dynamics
/// wdot = A(z, u(t), d(t)) w: integrates random piecewise-constant signals
/// plus (optionally) all constant box-vertex signals, and returns the worst
///   |w(s)| / (alpha e^{-kappa s} |w(0)|)
/// over trials and sample times. Values <= 1 + decay_tol confirm the bound;
/// the vertex trials probe its tight edge.
inline DecayResult check_boundary_layer_decay(const SPSystem& sys,
                                              const LyapunovCert& cert,
                                              const Eigen::VectorXd& z, double horizon,
                                              long n_trials, std::uint64_t seed = 0,
                                              double decay_tol = 1e-6,
                                              bool include_vertex_constants = true,
                                              double switch_period = 0.0) {
  if (!(horizon > 0.0)) throw Error::domain("decay: horizon must be > 0");
  if (n_trials < 0) throw Error::domain("decay: n_trials must be >= 0");
  detail::require_dim(z, sys.n_z, "z");
  if (switch_period <= 0.0) switch_period = horizon / 20.0;

  DecayResult res;
  res.seed = seed;
  res.tol = decay_tol;

  const double h = std::min(horizon / 2000.0, switch_period / 10.0);

  auto run_trial = [&](const Eigen::VectorXd& w0,
                       const std::function<void(double, Eigen::VectorXd&, Eigen::VectorXd&)>&
                           signal_at) {
    return boundary_layer_trial_ratio(sys, cert, z, horizon, w0, signal_at, h);
  };

  Rng rng(Rng::mix(seed, 0x6463));
  for (long trial = 0; trial < n_trials; ++trial) {
    Eigen::VectorXd w0(sys.n_y);
    for (int i = 0; i < sys.n_y; ++i) w0[i] = rng.uniform(-1.0, 1.0);
    if (w0.norm() == 0.0) w0[0] = 1.0;
    // one piecewise-constant (u, d) table per trial, drawn up front
    const int n_pieces = static_cast<int>(std::ceil(horizon / switch_period)) + 1;
    std::vector<Eigen::VectorXd> us(n_pieces), ds(n_pieces);
    for (int k = 0; k < n_pieces; ++k) {
      us[k] = detail::random_in_box(rng, sys.u_set.lower, sys.u_set.upper);
      ds[k] = detail::random_in_box(rng, sys.d_set.lower, sys.d_set.upper);
    }
    auto signal = [&](double s, Eigen::VectorXd& u, Eigen::VectorXd& d) {
      const int k = std::min(static_cast<int>(s / switch_period), n_pieces - 1);
      u = us[k];
      d = ds[k];
    };
    res.worst_ratio = std::max(res.worst_ratio, run_trial(w0, signal));
    ++res.n_trials;
  }

  if (include_vertex_constants) {
    for (long mu = 0; mu < sys.u_set.vertex_count(); ++mu) {
      for (long md = 0; md < sys.d_set.vertex_count(); ++md) {
        const Eigen::VectorXd u0 = sys.u_set.vertex(static_cast<unsigned>(mu));
        const Eigen::VectorXd d0 = sys.d_set.vertex(static_cast<unsigned>(md));
        auto signal = [&](double, Eigen::VectorXd& u, Eigen::VectorXd& d) {
          u = u0;
          d = d0;
        };
        for (int i = 0; i < sys.n_y; ++i) {
          Eigen::VectorXd w0 = Eigen::VectorXd::Zero(sys.n_y);
          w0[i] = 1.0;
          res.worst_ratio = std::max(res.worst_ratio, run_trial(w0, signal));
          ++res.n_trials;
        }
      }
    }
  }
  return res;
}

}  // namespace spreach
