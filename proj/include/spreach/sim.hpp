#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spreach/box_set.hpp"
#include "spreach/errors.hpp"
#include "spreach/payoff.hpp"
#include "spreach/rng.hpp"
#include "spreach/systems.hpp"

namespace spreach {

/// Piecewise-constant (zero-order hold) control or disturbance signal.
/// Measurable signals of the underlying game are represented operationally
/// by these sampled forms. Every held value must lie in the signal's box;
/// the integrator asserts this for each applied sample.
struct SignalSpec {
  enum class Kind { constant, sequence, uniform_random, callback };
  Kind kind = Kind::constant;
  double sample_period = 0.0;  // <= 0 selects the default |t| / 200
  Eigen::VectorXd value;
  std::vector<Eigen::VectorXd> sequence;  // held in order; last value is held on
  std::uint64_t seed = 0;
  std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& z,
                                const Eigen::VectorXd& y)>
      callback;

  static SignalSpec constant(Eigen::VectorXd v, double period = 0.0) {
    SignalSpec s;
    s.kind = Kind::constant;
    s.value = std::move(v);
    s.sample_period = period;
    return s;
  }
  static SignalSpec piecewise(std::vector<Eigen::VectorXd> vals, double period) {
    SignalSpec s;
    s.kind = Kind::sequence;
    s.sequence = std::move(vals);
    s.sample_period = period;
    return s;
  }
  static SignalSpec uniform_random(std::uint64_t seed, double period = 0.0) {
    SignalSpec s;
    s.kind = Kind::uniform_random;
    s.seed = seed;
    s.sample_period = period;
    return s;
  }
  static SignalSpec sampled_policy(
      std::function<Eigen::VectorXd(double, const Eigen::VectorXd&, const Eigen::VectorXd&)>
          fn,
      double period = 0.0) {
    SignalSpec s;
    s.kind = Kind::callback;
    s.callback = std::move(fn);
    s.sample_period = period;
    return s;
  }
};

struct Trajectory {
  std::vector<double> times;            // strictly increasing, t ... 0
  std::vector<Eigen::VectorXd> z;       // one per time
  std::vector<Eigen::VectorXd> y;       // empty for reduced runs
  std::vector<Eigen::VectorXd> u_applied;  // held on [times[k], times[k+1])
  std::vector<Eigen::VectorXd> d_applied;
  bool reached_target_at_0 = false;     // l(z(0)) < 0
  double min_payoff_along = std::numeric_limits<double>::quiet_NaN();
};

struct IntegrateOptions {
  double h_max = 0.0;          // <= 0def selects |t| / 2000
  double fast_fraction = 0.1;  // SP substep cap: h <= eps * fast_fraction
};

namespace detail {

/// Realized piecewise-constant signal over [t, 0).
class HeldSignal {
 public:
  HeldSignal(const SignalSpec& spec, const BoxSet& box, double t, const char* name)
      : spec_(spec), box_(box), name_(name) {
    period_ = spec.sample_period > 0.0 ? spec.sample_period : std::abs(t) / 200.0;
    if (period_ <= 0.0) period_ = 1.0;  // t == 0: single-point trajectory, unused
    t0_ = t;
    if (spec.kind == SignalSpec::Kind::uniform_random) {
      const long n = static_cast<long>(std::ceil(std::abs(t) / period_)) + 1;
      Rng rng(Rng::mix(spec.seed, 0x7369676e));
      table_.reserve(n);
      for (long k = 0; k < n; ++k) {
        Eigen::VectorXd v(box.dim());
        for (int i = 0; i < box.dim(); ++i) v[i] = rng.uniform(box.lower[i], box.upper[i]);
        table_.push_back(std::move(v));
      }
    }
  }

  double period() const { return period_; }

  /// Value held on the period containing time s (refreshed at boundaries).
  Eigen::VectorXd at(double s, const Eigen::VectorXd& z, const Eigen::VectorXd& y) const {
    const long k = std::max<long>(0, static_cast<long>(std::floor((s - t0_) / period_ + 1e-9)));
    Eigen::VectorXd v;
    switch (spec_.kind) {
      case SignalSpec::Kind::constant: v = spec_.value; break;
      case SignalSpec::Kind::sequence: {
        if (spec_.sequence.empty())
          throw Error::domain(std::string(name_) + " signal: empty sequence");
        v = spec_.sequence[std::min<std::size_t>(k, spec_.sequence.size() - 1)];
        break;
      }
      case SignalSpec::Kind::uniform_random:
        v = table_[std::min<std::size_t>(k, table_.size() - 1)];
        break;
      case SignalSpec::Kind::callback: v = spec_.callback(s, z, y); break;
    }
    if (v.size() != box_.dim())
      throw Error::dimension(std::string(name_) + " signal value has wrong dimension");
    if (!box_.contains(v, 1e-12))
      throw Error::domain(std::string(name_) + " signal value leaves its box at t = " +
                          std::to_string(s));
    return v;
  }

  /// Next sample boundary strictly after s.
  double next_boundary(double s) const {
    const long k = static_cast<long>(std::floor((s - t0_) / period_ + 1e-9)) + 1;
    return t0_ + period_ * k;
  }

 private:
  const SignalSpec& spec_;
  const BoxSet& box_;
  const char* name_;
  double period_ = 0.0;
  double t0_ = 0.0;
  std::vector<Eigen::VectorXd> table_;
};

/// Fixed-step RK4 from t to 0 with zero-order-hold signals. The state
/// callback splits x into (z, y) for recording; deriv evaluates the full
/// right-hand side.
template <typename Deriv>
Trajectory integrate_core(int n_z, int n_y, const Eigen::VectorXd& x0,
                          const HeldSignal& u_sig, const HeldSignal& d_sig, double t,
                          double h_cap, const PayoffFn* ell, Deriv&& deriv) {
  if (t > 0.0) throw Error::domain("integrate: t must be <= 0");
  if (!x0.allFinite()) throw Error::domain("integrate: initial state must be finite");

  Trajectory traj;
  auto record = [&](double s, const Eigen::VectorXd& x) {
    traj.times.push_back(s);
    traj.z.push_back(x.head(n_z));
    if (n_y > 0) traj.y.push_back(x.tail(n_y));
  };

  Eigen::VectorXd x = x0;
  record(t, x);
  double s = t;
  while (s < -1e-15) {
    const Eigen::VectorXd z = x.head(n_z);
    const Eigen::VectorXd yv = n_y > 0 ? Eigen::VectorXd(x.tail(n_y)) : Eigen::VectorXd();
    const Eigen::VectorXd u = u_sig.at(s, z, yv);
    const Eigen::VectorXd d = d_sig.at(s, z, yv);
    traj.u_applied.push_back(u);
    traj.d_applied.push_back(d);

    const double seg_end = std::min({u_sig.next_boundary(s), d_sig.next_boundary(s), 0.0});
    const double seg = seg_end - s;
    if (seg <= 1e-15) throw Error::numeric("integrate: no progress at t = " + std::to_string(s));
    const long n_sub = std::max<long>(1, static_cast<long>(std::ceil(seg / h_cap - 1e-9)));
    const double h = seg / n_sub;

    for (long i = 0; i < n_sub; ++i) {
      const Eigen::VectorXd k1 = deriv(x, u, d);
      const Eigen::VectorXd k2 = deriv(x + 0.5 * h * k1, u, d);
      const Eigen::VectorXd k3 = deriv(x + 0.5 * h * k2, u, d);
      const Eigen::VectorXd k4 = deriv(x + h * k3, u, d);
      x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!x.allFinite())
        throw Error::numeric("integrate: state diverged at t = " +
                             std::to_string(s + (i + 1) * h));
    }
    s = seg_end;
    record(s >= -1e-15 ? 0.0 : s, x);
  }
  if (traj.times.back() != 0.0) {
    traj.times.back() = 0.0;  // clamp terminal stamp
  }

  if (ell) {
    traj.min_payoff_along = std::numeric_limits<double>::infinity();
    for (const auto& zs : traj.z)
      traj.min_payoff_along = std::min(traj.min_payoff_along, (*ell)(zs));
    traj.reached_target_at_0 = (*ell)(traj.z.back()) < 0.0;
  }
  return traj;
}

}  // namespace detail

/// Simulate the SP system from (z0, y0) at time t to 0. Explicit RK4 with
/// stiffness handled by sub-stepping at h <= eps * fast_fraction.
inline Trajectory integrate_sp(const SPSystem& sys, double eps, const Eigen::VectorXd& z0,
                               const Eigen::VectorXd& y0, const SignalSpec& u_sig,
                               const SignalSpec& d_sig, double t,
                               const PayoffFn* ell = nullptr,
                               const IntegrateOptions& opts = {}) {
  if (!(eps > 0.0)) throw Error::domain("integrate_sp: eps must be > 0");
  detail::require_dim(z0, sys.n_z, "z0");
  detail::require_dim(y0, sys.n_y, "y0");
  const double h_user = opts.h_max > 0.0 ? opts.h_max : std::max(std::abs(t) / 2000.0, 1e-9);
  const double h_cap = std::min(h_user, eps * opts.fast_fraction);
  if (h_cap <= 0.0) throw Error::config("integrate_sp: step size underflow");

  Eigen::VectorXd x0(sys.n_z + sys.n_y);
  x0 << z0, y0;
  detail::HeldSignal u_held(u_sig, sys.u_set, t, "u");
  detail::HeldSignal d_held(d_sig, sys.d_set, t, "d");
  auto deriv = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                   const Eigen::VectorXd& d) -> Eigen::VectorXd {
    const Eigen::VectorXd z = x.head(sys.n_z);
    const Eigen::VectorXd y = x.tail(sys.n_y);
    const Eigen::MatrixXd Av = sys.A(z, u, d);
    Eigen::VectorXd out(sys.n_z + sys.n_y);
    out.head(sys.n_z) = sys.f(z, u, d) + sys.M(z) * (Av * y);
    out.tail(sys.n_y) = (sys.g(z, u, d) + Av * y) / eps;
    return out;
  };
  return detail::integrate_core(sys.n_z, sys.n_y, x0, u_held, d_held, t, h_cap, ell, deriv);
}

/// Simulate the reduced model from z0 at time t to 0.
inline Trajectory integrate_reduced(const ReducedSystem& red, const Eigen::VectorXd& z0,
                                    const SignalSpec& u_sig, const SignalSpec& d_sig,
                                    double t, const PayoffFn* ell = nullptr,
                                    const IntegrateOptions& opts = {}) {
  detail::require_dim(z0, red.n_z, "z0");
  const double h_cap = opts.h_max > 0.0 ? opts.h_max : std::max(std::abs(t) / 2000.0, 1e-9);
  detail::HeldSignal u_held(u_sig, red.u_set, t, "u");
  detail::HeldSignal d_held(d_sig, red.d_set, t, "d");
  auto deriv = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                   const Eigen::VectorXd& d) { return red.F(x, u, d); };
  return detail::integrate_core(red.n_z, 0, z0, u_held, d_held, t, h_cap, ell, deriv);
}

}  // namespace spreach
