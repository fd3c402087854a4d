#pragma once

#include <cmath>
#include <vector>

#include "semilag/dynamics.hpp"
#include "semilag/error.hpp"
#include "semilag/grid.hpp"
#include "semilag/problem.hpp"
#include "semilag/time_grid.hpp"
#include "semilag/vec.hpp"

namespace semilag {

namespace detail {
inline void require_discount_step(double lambda, double dt) {
  if (lambda < 0) throw PreconditionError("discount: need lambda >= 0");
  if (lambda > 0 && !(lambda * dt <= 0.5 + 1e-15))
    throw PreconditionError("discount: need dt <= 1/(2 lambda)");
}
}  // namespace detail

/// Discrete discount factors (1 - lambda*dt)^k, k = 0..steps. Requires
/// dt <= 1/(2 lambda) when lambda > 0, so the base lies in [1/2, 1).
struct DiscountWeights {
  double lambda = 0.0;
  double dt = 0.0;
  std::vector<double> factors;

  static DiscountWeights make(double lambda, const TimeGrid& tg) {
    detail::require_discount_step(lambda, tg.dt());
    DiscountWeights w;
    w.lambda = lambda;
    w.dt = tg.dt();
    w.factors.resize(tg.steps() + 1);
    const double base = 1.0 - lambda * tg.dt();
    double f = 1.0;
    for (int k = 0; k <= tg.steps(); ++k) {
      w.factors[k] = f;
      f *= base;
    }
    return w;
  }
};

/// Cost functional of the continuous problem under a control signal,
///   integral of exp(-lambda (s-t)) g(y,s,u) plus discounted terminal cost,
/// evaluated along an RK4 trajectory with composite trapezoid quadrature on
/// the dense samples. Integration restarts at declared signal breakpoints,
/// and the integrand at a segment's right end uses the control's left
/// limit, so declared discontinuities cost no accuracy. Oracle tolerance is
/// O(h_ref^2) from the quadrature.
inline double continuous_cost(const Problem& p, const Vec& x, double t,
                              const ControlSignal& u, double h_ref) {
  if (!(h_ref > 0) || !std::isfinite(h_ref)) throw ConfigError("continuous cost: need h_ref > 0");
  if (!(t >= p.t0 - 1e-12 && t <= p.horizon_end + 1e-12))
    throw PreconditionError("continuous cost: t outside the horizon");
  const double t_end = p.horizon_end;
  if (t >= t_end) return p.terminal_cost(x);

  Vec y = x;
  double acc = 0.0;
  double a = t;
  for (double b : detail::segment_ends(u.breakpoints, t, t_end)) {
    const int steps = std::max(1, static_cast<int>(std::ceil((b - a) / h_ref - 1e-9)));
    const double h = (b - a) / steps;
    const double b_inside = std::nextafter(b, a);
    auto u_seg = [&](double s) { return u.eval(s < b ? s : b_inside); };
    double phi_left = std::exp(-p.discount * (a - t)) * p.running_cost(y, a, u_seg(a));
    for (int i = 0; i < steps; ++i) {
      const double s0 = a + i * h;
      const double s1 = i + 1 == steps ? b : s0 + h;
      y = detail::rk4_step(p, y, s0, h, u_seg);
      const double phi_right = std::exp(-p.discount * (s1 - t)) * p.running_cost(y, s1, u_seg(s1));
      acc += 0.5 * h * (phi_left + phi_right);
      phi_left = phi_right;
    }
    a = b;
  }
  return acc + std::exp(-p.discount * (t_end - t)) * p.terminal_cost(y);
}

/// Semidiscrete cost of a sampled control sequence from level n:
///   dt * sum_k g(y_k, t_k, u_k) (1-lambda*dt)^(k-n)
///   + (1-lambda*dt)^(N-n) psi(y_N),
/// along the explicit Euler trajectory started at x at level n. The
/// sequence is the tail: samples[j] steers [t_{n+j}, t_{n+j+1}).
inline double semidiscrete_cost(const Problem& p, const Vec& x, int n,
                                const ControlSequence& seq, const TimeGrid& tg) {
  if (n < 0 || n > tg.steps()) throw PreconditionError("semidiscrete cost: level out of range");
  detail::require_discount_step(p.discount, tg.dt());
  if (static_cast<int>(seq.samples.size()) < tg.steps() - n)
    throw ConfigError("semidiscrete cost: control sequence too short");
  const double dt = tg.dt();
  const double base = 1.0 - p.discount * dt;
  Vec y = x;
  double weight = 1.0;
  double acc = 0.0;
  for (int k = n; k < tg.steps(); ++k) {
    const Vec& u = seq.samples[k - n];
    acc += dt * weight * p.running_cost(y, tg.t(k), u);
    y = axpy(y, dt, p.dynamics(y, tg.t(k), u));
    weight *= base;
  }
  return acc + weight * p.terminal_cost(y);
}

/// Running cost interpolated in space only: g(., t, u) sampled at the
/// corners of the cell owning the clamped point and combined with the
/// multilinear weights. Reading just the owning cell is equivalent to
/// sampling g on every node and interpolating, and reuses the exact
/// weights of the value interpolation (same snapping, same node hits).
inline double interpolated_running_cost(const Problem& p, const Grid& grid, const Vec& y,
                                        double t, const Vec& u) {
  const CellLocation loc = grid.locate_snapped(grid.clamp(y));
  const int d = grid.dim();
  double acc = 0.0;
  const unsigned corners = 1u << d;
  for (unsigned c = 0; c < corners; ++c) {
    double w = 1.0;
    Vec xc(d);
    for (int k = 0; k < d; ++k) {
      const int bit = c >> k & 1;
      w *= bit ? loc.local[k] : 1.0 - loc.local[k];
      xc[k] = grid.node_coord(k, loc.cell[k] + bit);
    }
    if (w != 0.0) acc += w * p.running_cost(xc, t, u);
    // w == 0 corners are skipped so snapped node hits stay bitwise exact.
  }
  return acc;
}

/// Fully discrete cost: the semidiscrete sum with g replaced by its spatial
/// interpolation at the Euler states (clamp policy). The terminal cost uses
/// the raw Euler endpoint, uninterpolated.
inline double discrete_cost(const Problem& p, const Grid& grid, const Vec& x, int n,
                            const ControlSequence& seq, const TimeGrid& tg) {
  if (n < 0 || n > tg.steps()) throw PreconditionError("discrete cost: level out of range");
  detail::require_discount_step(p.discount, tg.dt());
  if (static_cast<int>(seq.samples.size()) < tg.steps() - n)
    throw ConfigError("discrete cost: control sequence too short");
  const double dt = tg.dt();
  const double base = 1.0 - p.discount * dt;
  Vec y = x;
  double weight = 1.0;
  double acc = 0.0;
  for (int k = n; k < tg.steps(); ++k) {
    const Vec& u = seq.samples[k - n];
    acc += dt * weight * interpolated_running_cost(p, grid, y, tg.t(k), u);
    y = axpy(y, dt, p.dynamics(y, tg.t(k), u));
    weight *= base;
  }
  return acc + weight * p.terminal_cost(y);
}

/// Ratio between the continuous and discrete discount decay over one step:
/// theta = |log(1 - lambda*dt)| / (lambda*dt), extended by 1 at 0. Increasing
/// in lambda*dt, reaching 2 log 2 at the step bound lambda*dt = 1/2.
inline double theta(double lambda, double dt) {
  if (!(dt > 0)) throw PreconditionError("theta: need dt > 0");
  if (lambda < 0) throw PreconditionError("theta: need lambda >= 0");
  const double x = lambda * dt;
  if (x > 0.5 + 1e-15) throw PreconditionError("theta: need lambda*dt <= 1/2");
  if (x == 0.0) return 1.0;
  return -std::log1p(-x) / x;
}

/// Exact sup over s in [t0, t_end] of the gap between the continuous weight
/// exp(-lambda (s-t0)) and the piecewise-constant discrete weight
/// (1-lambda*dt)^floor((s-t0)/dt). On each step the continuous weight is
/// monotone and the discrete one constant, so checking interval endpoints
/// (the right one as a limit from below) realizes the supremum.
inline double discount_weight_gap(double lambda, const TimeGrid& tg) {
  detail::require_discount_step(lambda, tg.dt());
  if (lambda == 0.0) return 0.0;
  const DiscountWeights w = DiscountWeights::make(lambda, tg);
  double gap = 0.0;
  for (int n = 0; n < tg.steps(); ++n) {
    const double c = w.factors[n];
    const double e0 = std::exp(-lambda * (tg.t(n) - tg.t0()));
    const double e1 = std::exp(-lambda * (tg.t(n + 1) - tg.t0()));
    gap = std::max({gap, std::abs(e0 - c), std::abs(e1 - c)});
  }
  gap = std::max(gap, std::abs(std::exp(-lambda * (tg.t_end() - tg.t0())) - w.factors[tg.steps()]));
  return gap;
}

/// Empirical left-hand side of the time-discretization error bound:
/// |continuous cost at (x, t) - discrete cost from level floor(t)| with the
/// sequence sampled from the signal at grid times. h_ref = 0 picks dt/100.
inline double cost_gap(const Problem& p, const Grid& grid, const Vec& x, double t,
                       const ControlSignal& signal, const TimeGrid& tg, double h_ref = 0.0) {
  if (h_ref == 0.0) h_ref = tg.dt() / 100.0;
  const int n = tg.floor_index(t);
  ControlSequence tail;
  for (int k = n; k < tg.steps(); ++k) tail.samples.push_back(signal.eval(tg.t(k)));
  const double discrete = discrete_cost(p, grid, x, n, tail, tg);
  const double continuous = continuous_cost(p, x, t, signal, h_ref);
  return std::abs(continuous - discrete);
}

}  // namespace semilag
