#pragma once

#include <cmath>

#include "semilag/error.hpp"

namespace semilag {

/// Uniform partition of a horizon [t0, t_end] into `steps` intervals.
/// Node n sits at t0 + n*dt; interval n owns [t_n, t_{n+1})..
class TimeGrid {
 public:
  TimeGrid(double t0, double t_end, int steps) : t0_(t0), t_end_(t_end), steps_(steps) {
    if (!(t_end > t0) || !std::isfinite(t0) || !std::isfinite(t_end))
      throw ConfigError("time grid: need finite t_end > t0");
    if (steps < 1) throw ConfigError("time grid: need at least one step");
    dt_ = (t_end - t0) / steps;
  }

  /// Chooses the step count so the actual step never exceeds the request:
  /// ceil((t_end - t0)/dt), with a tolerance so exact divisions are kept.
  static TimeGrid from_dt(double t0, double t_end, double dt) {
    if (!(dt > 0) || !std::isfinite(dt)) throw ConfigError("time grid: need dt > 0");
    if (!(t_end > t0)) throw ConfigError("time grid: need t_end > t0");
    const double raw = (t_end - t0) / dt;
    const double rounded = std::round(raw);
    int steps;
    if (std::abs(raw - rounded) <= 1e-9 * std::max(1.0, raw) && rounded >= 1.0)
      steps = static_cast<int>(rounded);
    else
      steps = static_cast<int>(std::ceil(raw));
    return TimeGrid(t0, t_end, steps);
  }

  double t0() const { return t0_; }
  double t_end() const { return t_end_; }
  double dt() const { return dt_; }
  int steps() const { return steps_; }
  double t(int n) const { return n == steps_ ? t_end_ : t0_ + n * dt_; }

  /// Index of the interval owning s, clamped to [0, steps]; s >= t_end maps
  /// to steps so that weights (1-lambda*dt)^floor_index(s) stay well defined.
  int floor_index(double s) const {
    if (s <= t0_) return 0;
    const int n = static_cast<int>(std::floor((s - t0_) / dt_));
    return n > steps_ ? steps_ : n;
  }

 private:
  double t0_, t_end_, dt_;
  int steps_;
};

}  // namespace semilag
