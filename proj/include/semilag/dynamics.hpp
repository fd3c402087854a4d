#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "semilag/error.hpp"
#include "semilag/problem.hpp"
#include "semilag/time_grid.hpp"
#include "semilag/vec.hpp"

namespace semilag {

/// Explicit Euler states y_0..y_N on the nodes of a time grid. States are
/// not projected onto the domain box; where a trajectory goes is part of
/// what the checks in this library measure.
struct DiscreteTrajectory {
  std::vector<Vec> states;
  std::vector<Vec> controls;  // controls[n] steers [t_n, t_{n+1})
};

inline DiscreteTrajectory euler_trajectory(const Problem& p, const Vec& x,
                                           const ControlSequence& seq, const TimeGrid& tg) {
  if (static_cast<int>(seq.samples.size()) < tg.steps())
    throw ConfigError("euler: control sequence shorter than the time grid");
  if (x.size() != p.dim) throw ConfigError("euler: state dimension mismatch");
  DiscreteTrajectory traj;
  traj.states.reserve(tg.steps() + 1);
  traj.controls.assign(seq.samples.begin(), seq.samples.begin() + tg.steps());
  Vec y = x;
  traj.states.push_back(y);
  for (int n = 0; n < tg.steps(); ++n) {
    y = axpy(y, tg.dt(), p.dynamics(y, tg.t(n), seq.samples[n]));
    traj.states.push_back(y);
  }
  return traj;
}

/// Piecewise-constant extension of a sampled sequence: constant on each
/// [t_n, t_{n+1}), last interval closed at t_end. Its oscillation against
/// its own sampling is zero by construction.
inline ControlSignal piecewise_constant_extension(const ControlSequence& seq,
                                                  const TimeGrid& tg) {
  if (static_cast<int>(seq.samples.size()) < tg.steps())
    throw ConfigError("extension: control sequence shorter than the time grid");
  ControlSignal sig;
  std::vector<Vec> samples(seq.samples.begin(), seq.samples.begin() + tg.steps());
  sig.eval = [samples, tg](double s) {
    int n = tg.floor_index(s);
    if (n >= tg.steps()) n = tg.steps() - 1;
    return samples[n];
  };
  for (int n = 1; n < tg.steps(); ++n) sig.breakpoints.push_back(tg.t(n));
  return sig;
}

/// Accurate ODE solution under a measurable control signal, stored densely.
/// Integration is classical RK4 with fixed step at most h_ref, restarted at
/// every declared breakpoint of the signal so discontinuities never sit
/// inside a step; stage times at a segment's right end query the signal
/// just below it (its left limit).
struct ReferenceTrajectory {
  std::vector<double> times;
  std::vector<Vec> states;

  /// Piecewise-linear readout between stored samples.
  Vec at(double t) const {
    if (times.empty()) throw PreconditionError("reference trajectory: empty");
    if (t <= times.front()) return states.front();
    if (t >= times.back()) return states.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
    const double w = (t - times[i]) / (times[i + 1] - times[i]);
    return axpy((1.0 - w) * states[i], w, states[i + 1]);
  }
};

namespace detail {

template <typename UEval>
Vec rk4_step(const Problem& p, const Vec& y, double t, double h, const UEval& u) {
  const Vec k1 = p.dynamics(y, t, u(t));
  const Vec k2 = p.dynamics(axpy(y, 0.5 * h, k1), t + 0.5 * h, u(t + 0.5 * h));
  const Vec k3 = p.dynamics(axpy(y, 0.5 * h, k2), t + 0.5 * h, u(t + 0.5 * h));
  const Vec k4 = p.dynamics(axpy(y, h, k3), t + h, u(t + h));
  Vec incr = k1;
  for (int k = 0; k < incr.size(); ++k)
    incr[k] = (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]) / 6.0;
  return axpy(y, h, incr);
}

/// Segment ends between t_start and t_end: breakpoints strictly inside,
/// sorted, deduplicated, then t_end.
inline std::vector<double> segment_ends(const std::vector<double>& breakpoints,
                                        double t_start, double t_end) {
  std::vector<double> ends;
  for (double b : breakpoints)
    if (b > t_start && b < t_end) ends.push_back(b);
  std::sort(ends.begin(), ends.end());
  ends.erase(std::unique(ends.begin(), ends.end()), ends.end());
  ends.push_back(t_end);
  return ends;
}

}  // namespace detail

inline ReferenceTrajectory reference_trajectory(const Problem& p, const Vec& x,
                                                const ControlSignal& u, double t_start,
                                                double h_ref) {
  if (!(h_ref > 0) || !std::isfinite(h_ref))
    throw ConfigError("reference trajectory: need h_ref > 0");
  if (x.size() != p.dim) throw ConfigError("reference trajectory: state dimension mismatch");
  const double t_end = p.horizon_end;
  if (!(t_start < t_end)) throw PreconditionError("reference trajectory: t_start past the horizon");

  ReferenceTrajectory traj;
  traj.times.push_back(t_start);
  traj.states.push_back(x);
  Vec y = x;
  double a = t_start;
  for (double b : detail::segment_ends(u.breakpoints, t_start, t_end)) {
    const int steps = std::max(1, static_cast<int>(std::ceil((b - a) / h_ref - 1e-9)));
    const double h = (b - a) / steps;
    const double b_inside = std::nextafter(b, a);
    auto u_seg = [&](double s) { return u.eval(s < b ? s : b_inside); };
    for (int i = 0; i < steps; ++i) {
      const double t = a + i * h;
      y = detail::rk4_step(p, y, t, h, u_seg);
      traj.times.push_back(i + 1 == steps ? b : t + h);
      traj.states.push_back(y);
    }
    a = b;
  }
  return traj;
}

/// Reference-vs-Euler gap sampled at the grid times shared by both:
/// per_level[n] = |y_ref(t_n) - y_n|_inf, max over n included separately.
struct DivergenceReport {
  std::vector<double> per_level;
  double max = 0.0;
};

inline DivergenceReport trajectory_divergence(const ReferenceTrajectory& ref,
                                              const DiscreteTrajectory& discrete,
                                              const TimeGrid& tg) {
  if (static_cast<int>(discrete.states.size()) != tg.steps() + 1)
    throw ConfigError("divergence: trajectory does not match the time grid");
  DivergenceReport rep;
  rep.per_level.reserve(discrete.states.size());
  for (int n = 0; n <= tg.steps(); ++n) {
    const double d = inf_dist(ref.at(tg.t(n)), discrete.states[n]);
    rep.per_level.push_back(d);
    rep.max = std::max(rep.max, d);
  }
  return rep;
}

}  // namespace semilag
