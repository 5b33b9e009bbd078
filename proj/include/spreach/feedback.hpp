#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "spreach/errors.hpp"
#include "spreach/payoff.hpp"
#include "spreach/rng.hpp"
#include "spreach/sim.hpp"
#include "spreach/systems.hpp"
#include "spreach/value_field.hpp"

namespace spreach {

/// Sampled feedback law from a reduced value field:
///   u*(t, z) = argmin over the U lattice of max over the D lattice of
///              grad V(z, t) . F(z, u, d)
/// using the gradient of the snapshot nearest in time (or the final field
/// when no snapshots were retained). Ties keep the lowest lattice index.
/// The law reads the slow state only, so it applies unchanged to the SP
/// system. Query points are projected onto the gradient-evaluable interior
/// of the grid; optimal trajectories may leave the solved box and the
/// boundary gradient is the natural extension.
class FeedbackPolicy {
 public:
  FeedbackPolicy(ValueField field, ReducedSystem red)
      : field_(std::move(field)), red_(std::move(red)) {
    if (field_.grid.dim() != red_.n_z)
      throw Error::dimension("feedback: field/grid dimension mismatch");
    if (field_.snapshots.empty()) {
      snap_times_.push_back(field_.time);
    } else {
      for (const auto& s : field_.snapshots) snap_times_.push_back(s.time);
    }
  }

  /// Index of the stored slice nearest in time (first wins ties).
  std::size_t snapshot_index(double t) const {
    std::size_t best = 0;
    double dist = std::abs(snap_times_[0] - t);
    for (std::size_t i = 1; i < snap_times_.size(); ++i) {
      const double d = std::abs(snap_times_[i] - t);
      if (d < dist) {
        dist = d;
        best = i;
      }
    }
    return best;
  }

  Eigen::VectorXd clamp_to_interior(const Eigen::VectorXd& z) const {
    Eigen::VectorXd q = z;
    const Grid& g = field_.grid;
    for (int d = 0; d < g.dim(); ++d) {
      const auto& ax = g.axis(d);
      const double h = g.spacing(d);
      q[d] = std::clamp(q[d], ax.min + h, ax.max - h);
    }
    return q;
  }

  Eigen::VectorXd gradient(double t, const Eigen::VectorXd& z) const {
    const std::size_t si = snapshot_index(t);
    const std::vector<double>& vals =
        field_.snapshots.empty() ? field_.values : field_.snapshots[si].values;
    return detail::gradient_values(field_.grid, vals, clamp_to_interior(z));
  }

  Eigen::VectorXd operator()(double t, const Eigen::VectorXd& z) const {
    detail::require_dim(z, red_.n_z, "z");
    const Eigen::VectorXd lambda = gradient(t, z);
    return hamiltonian_minmax_arg(red_, clamp_to_interior(z), lambda).u_opt;
  }

  const ReducedSystem& reduced() const { return red_; }

 private:
  ValueField field_;
  ReducedSystem red_;
  std::vector<double> snap_times_;
};

inline FeedbackPolicy synthesize_feedback(ValueField field, ReducedSystem red) {
  return FeedbackPolicy(std::move(field), std::move(red));
}

/// Per-step adversarial disturbance: maximizer over the D lattice of the
/// worst-case (over U) value-gradient rate. Causal by construction.
inline SignalSpec adversarial_against(const FeedbackPolicy& policy, double period = 0.0) {
  return SignalSpec::sampled_policy(
      [&policy](double t, const Eigen::VectorXd& z, const Eigen::VectorXd&) {
        const ReducedSystem& red = policy.reduced();
        const Eigen::VectorXd zq = policy.clamp_to_interior(z);
        const Eigen::VectorXd lambda = policy.gradient(t, z);
        const long nd = red.d_set.lattice_size();
        const long nu = red.u_set.lattice_size();
        double best = -std::numeric_limits<double>::infinity();
        long best_d = 0;
        for (long kd = 0; kd < nd; ++kd) {
          const Eigen::VectorXd d = red.d_set.lattice_point(kd);
          double inner = std::numeric_limits<double>::infinity();
          for (long ku = 0; ku < nu; ++ku) {
            const Eigen::VectorXd u = red.u_set.lattice_point(ku);
            inner = std::min(inner, lambda.dot(red.F(zq, u, d)));
          }
          if (inner > best) {
            best = inner;
            best_d = kd;
          }
        }
        return red.d_set.lattice_point(best_d);
      },
      period);
}

enum class ReachLabel { inside_inner, outside_outer, indeterminate };

inline const char* to_string(ReachLabel l) {
  switch (l) {
    case ReachLabel::inside_inner: return "inside-inner";
    case ReachLabel::outside_outer: return "outside-outer";
    default: return "indeterminate";
  }
}

struct ReachStateReport {
  Eigen::VectorXd z0, y0;
  double v_bar = 0.0;
  ReachLabel label = ReachLabel::indeterminate;
  long n_runs = 0;
  long n_reached = 0;
  long n_errors = 0;
  double reach_fraction = 0.0;
  bool consistent = true;
  std::vector<std::uint8_t> run_reached;
  std::vector<std::string> run_errors;  // empty string per clean run
  std::vector<Trajectory> trajectories;
};

struct ReachExperimentReport {
  double t = 0.0;
  double eta = 0.0;
  double eps = 0.0;
  std::uint64_t seed = 0;
  std::vector<ReachStateReport> states;

  bool all_consistent() const {
    for (const auto& s : states)
      if (!s.consistent) return false;
    return true;
  }
};

struct ReachExperimentOptions {
  double sample_period = 0.0;  // <= 0: |t| / 200
  IntegrateOptions integrate;
  bool keep_trajectories = true;
};

/// Closed-loop reach experiment: each initial state runs the synthesized
/// feedback against n_disturbances uniform-random disturbance signals.
/// The predicted label compares V(t, z0) with -eta/+eta; consistency means
/// predicted inside-inner states reach on every run and outside-outer
/// states on none. The bounds say nothing inside the margin band, so those
/// states are never inconsistent.
inline ReachExperimentReport run_reach_experiment(
    const SPSystem& sys, double eps, const ValueField& field, const PayoffFn& ell,
    const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& initial_states,
    long n_disturbances, std::uint64_t seed, double eta,
    const ReachExperimentOptions& opts = {}) {
  if (!(eta > 0.0)) throw Error::domain("experiment: eta must be > 0");
  if (n_disturbances < 1) throw Error::domain("experiment: n_disturbances must be >= 1");
  const double t = field.time;
  const ReducedSystem red = derive_reduced(sys);
  const FeedbackPolicy policy(field, red);

  ReachExperimentReport rep;
  rep.t = t;
  rep.eta = eta;
  rep.eps = eps;
  rep.seed = seed;

  const double period = opts.sample_period > 0.0 ? opts.sample_period : std::abs(t) / 200.0;
  const SignalSpec u_sig = SignalSpec::sampled_policy(
      [&policy](double s, const Eigen::VectorXd& z, const Eigen::VectorXd&) {
        return policy(s, z);
      },
      period);

  for (std::size_t si = 0; si < initial_states.size(); ++si) {
    ReachStateReport sr;
    sr.z0 = initial_states[si].first;
    sr.y0 = initial_states[si].second.size() > 0 ? initial_states[si].second
                                                 : Eigen::VectorXd::Zero(sys.n_y);
    sr.v_bar = interpolate_value(field, sr.z0);
    sr.label = sr.v_bar < -eta   ? ReachLabel::inside_inner
               : sr.v_bar > eta ? ReachLabel::outside_outer
                                : ReachLabel::indeterminate;
    sr.n_runs = n_disturbances;

    for (long run = 0; run < n_disturbances; ++run) {
      const SignalSpec d_sig =
          SignalSpec::uniform_random(Rng::mix(seed, si + 1, run + 1), period);
      try {
        Trajectory traj =
            integrate_sp(sys, eps, sr.z0, sr.y0, u_sig, d_sig, t, &ell, opts.integrate);
        sr.run_reached.push_back(traj.reached_target_at_0 ? 1 : 0);
        sr.run_errors.emplace_back();
        if (traj.reached_target_at_0) ++sr.n_reached;
        if (opts.keep_trajectories) sr.trajectories.push_back(std::move(traj));
      } catch (const Error& e) {
        sr.run_reached.push_back(0);
        sr.run_errors.emplace_back(e.what());
        ++sr.n_errors;
      }
    }
    sr.reach_fraction = static_cast<double>(sr.n_reached) / n_disturbances;
    if (sr.label == ReachLabel::inside_inner)
      sr.consistent = sr.n_reached == n_disturbances && sr.n_errors == 0;
    else if (sr.label == ReachLabel::outside_outer)
      sr.consistent = sr.n_reached == 0;
    else
      sr.consistent = true;
    rep.states.push_back(std::move(sr));
  }
  return rep;
}

}  // namespace spreach
