#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "semilag/cost.hpp"
#include "semilag/dynamics.hpp"
#include "semilag/error.hpp"
#include "semilag/grid.hpp"
#include "semilag/parallel.hpp"
#include "semilag/problem.hpp"
#include "semilag/time_grid.hpp"
#include "semilag/vec.hpp"

namespace semilag {

/// Grid values V(x_i, t_n) of the backward scheme, level-major: layers[n]
/// approximates the value function at time t_n, layers[N] is the nodal
/// terminal cost exactly.
struct ValueField {
  Grid grid;
  TimeGrid time_grid;
  std::vector<std::vector<double>> layers;

  double at(int n, std::size_t i) const { return layers[n][i]; }
  std::span<const double> layer(int n) const { return layers[n]; }
};

/// Argmin control index per node for every level n < N_t, plus everything
/// needed to re-solve the one-step minimization off the nodes.
struct PolicyField {
  Grid grid;
  TimeGrid time_grid;
  ControlGrid controls;
  Problem problem;
  BoundaryPolicy boundary = BoundaryPolicy::kClamp;
  std::vector<std::vector<std::int32_t>> argmin;
};

struct SolveResult {
  ValueField value;
  PolicyField policy;
};

namespace detail {

/// One-step minimization of the scheme at an arbitrary state x against the
/// next value layer. Ties break to the smallest control index (strict <).
struct StepMin {
  double value;
  std::int32_t index;
};

inline StepMin step_min(const Problem& p, const Grid& grid, const double* next_layer,
                        const ControlGrid& controls, const Vec& x, double t, double dt,
                        double beta, BoundaryPolicy boundary) {
  const bool extrap = boundary == BoundaryPolicy::kExtrapolate;
  double best = std::numeric_limits<double>::infinity();
  std::int32_t best_j = 0;
  for (std::size_t j = 0; j < controls.points.size(); ++j) {
    const Vec& u = controls.points[j];
    Vec foot = axpy(x, dt, p.dynamics(x, t, u));
    double interpolated;
    if (extrap) {
      interpolated = grid.extrapolate_unchecked(next_layer, foot);
    } else {
      if (boundary == BoundaryPolicy::kError && !grid.contains(foot))
        throw DomainError("solve: Euler foot point left the box under the error policy");
      interpolated = grid.interpolate_unchecked(next_layer, grid.clamp(foot));
    }
    const double val = dt * p.running_cost(x, t, u) + beta * interpolated;
    if (val < best) {
      best = val;
      best_j = static_cast<std::int32_t>(j);
    }
  }
  return {best, best_j};
}

}  // namespace detail

/// Backward semi-Lagrangian value iteration: the terminal layer samples the
/// terminal cost at the nodes, and each earlier layer minimizes
///   dt*g(x_i,t_n,u) + (1-lambda*dt) * I1[V(., t_{n+1})](x_i + dt*f(x_i,t_n,u))
/// exhaustively over the control grid. Node updates within a level are
/// independent; levels run strictly backward. Bitwise deterministic.
inline SolveResult solve(const Problem& p, const Grid& grid, const TimeGrid& tg,
                         const ControlGrid& controls,
                         BoundaryPolicy boundary = BoundaryPolicy::kClamp) {
  if (!p.dynamics || !p.running_cost || !p.terminal_cost)
    throw ConfigError("solve: problem callbacks not set");
  if (p.dim != grid.dim()) throw ConfigError("solve: grid dimension does not match problem");
  if (controls.points.empty()) throw ConfigError("solve: empty control grid");
  detail::require_discount_step(p.discount, tg.dt());

  const int N = tg.steps();
  const double dt = tg.dt();
  const double beta = 1.0 - p.discount * dt;
  const std::size_t nodes = grid.node_count();

  SolveResult r{ValueField{grid, tg, {}},
                PolicyField{grid, tg, controls, p, boundary, {}}};
  r.value.layers.assign(static_cast<std::size_t>(N) + 1, {});
  r.policy.argmin.assign(static_cast<std::size_t>(N), {});

  auto& top = r.value.layers[N];
  top.resize(nodes);
  for (std::size_t i = 0; i < nodes; ++i) top[i] = p.terminal_cost(grid.node(i));

  for (int n = N - 1; n >= 0; --n) {
    const double* next = r.value.layers[n + 1].data();
    auto& cur = r.value.layers[n];
    auto& arg = r.policy.argmin[n];
    cur.resize(nodes);
    arg.resize(nodes);
    const double t = tg.t(n);
    auto update = [&](std::size_t i) {
      const Vec x = grid.node(i);
      const detail::StepMin m =
          detail::step_min(p, grid, next, controls, x, t, dt, beta, boundary);
      cur[i] = m.value;
      arg[i] = m.index;
    };
    if (boundary == BoundaryPolicy::kError) {
      // Serial under the rejecting policy so a DomainError propagates cleanly.
      for (std::size_t i = 0; i < nodes; ++i) update(i);
    } else {
      parallel_for(std::size_t{0}, nodes, update);
    }
  }
  return r;
}

/// Semidiscrete value v_dt(x, t_n): exact minimum of the semidiscrete cost
/// over all control sequences, evaluated by depth-first recursion over the
/// control grid with shared trajectory prefixes. No spatial interpolation
/// enters, which makes this the dx-free oracle. Work grows like
/// |controls|^(N_t - n) and is refused above max_sequences.
inline double semidiscrete_value(const Problem& p, const Vec& x, int n, const TimeGrid& tg,
                                 const ControlGrid& controls,
                                 double max_sequences = 1e6) {
  if (n < 0 || n > tg.steps()) throw PreconditionError("semidiscrete value: level out of range");
  if (controls.points.empty()) throw ConfigError("semidiscrete value: empty control grid");
  detail::require_discount_step(p.discount, tg.dt());
  const int depth = tg.steps() - n;
  if (std::pow(static_cast<double>(controls.points.size()), depth) > max_sequences)
    throw BudgetError("semidiscrete value: enumeration budget exceeded");

  const double dt = tg.dt();
  const double beta = 1.0 - p.discount * dt;
  auto rec = [&](auto&& self, const Vec& y, int k) -> double {
    if (k == tg.steps()) return p.terminal_cost(y);
    const double t = tg.t(k);
    double best = std::numeric_limits<double>::infinity();
    for (const Vec& u : controls.points) {
      const double val = dt * p.running_cost(y, t, u) +
                         beta * self(self, axpy(y, dt, p.dynamics(y, t, u)), k + 1);
      if (val < best) best = val;
    }
    return best;
  };
  return rec(rec, x, n);
}

/// Feedback control at (x, t_n): the stored argmin when x is a node (within
/// a relative snap of 1e-12 per axis), otherwise the one-step minimization
/// re-solved at x against layer n+1. Same tie-break as the solver.
inline Vec feedback_control(const PolicyField& policy, const ValueField& V, const Vec& x,
                            int n) {
  if (n < 0 || n >= V.time_grid.steps())
    throw PreconditionError("feedback control: level out of range");
  const Grid& grid = V.grid;
  if (x.size() != grid.dim()) throw ConfigError("feedback control: state dimension mismatch");

  std::array<int, kMaxDim> multi{};
  bool on_node = true;
  for (int k = 0; k < grid.dim() && on_node; ++k) {
    const double s = (x[k] - grid.lower(k)) / grid.spacing(k);
    const double m = std::round(s);
    if (std::abs(s - m) <= 1e-12 * std::max(1.0, std::abs(s)) && m >= 0.0 &&
        m <= grid.count(k) - 1)
      multi[k] = static_cast<int>(m);
    else
      on_node = false;
  }
  if (on_node) return policy.controls.points[policy.argmin[n][grid.node_index(multi)]];

  const double dt = V.time_grid.dt();
  const double beta = 1.0 - policy.problem.discount * dt;
  const detail::StepMin m =
      detail::step_min(policy.problem, grid, V.layers[n + 1].data(), policy.controls, x,
                       V.time_grid.t(n), dt, beta, policy.boundary);
  return policy.controls.points[m.index];
}

/// Where the scheme's Euler feet leave the box: one entry per offending
/// (node, level, control), storage capped, counts and worst exit kept exact.
struct InvarianceReport {
  struct Violation {
    std::size_t node;
    int level;
    int control;
    double exit_distance;
  };
  static constexpr std::size_t kMaxStored = 4096;
  std::vector<Violation> sample;
  std::size_t total = 0;
  double max_exit_distance = 0.0;
  bool invariant() const { return total == 0; }
};

inline InvarianceReport check_invariance(const Problem& p, const Grid& grid,
                                         const TimeGrid& tg, const ControlGrid& controls) {
  InvarianceReport rep;
  for (int n = 0; n < tg.steps(); ++n) {
    const double t = tg.t(n);
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
      const Vec x = grid.node(i);
      for (std::size_t j = 0; j < controls.points.size(); ++j) {
        const Vec foot = axpy(x, tg.dt(), p.dynamics(x, t, controls.points[j]));
        const double d = grid.exit_distance(foot);
        if (d > 0.0) {
          ++rep.total;
          rep.max_exit_distance = std::max(rep.max_exit_distance, d);
          if (rep.sample.size() < InvarianceReport::kMaxStored)
            rep.sample.push_back({i, n, static_cast<int>(j), d});
        }
      }
    }
  }
  return rep;
}

struct RolloutResult {
  DiscreteTrajectory trajectory;
  double realized_cost = 0.0;
};

/// Closed-loop rollout of the computed policy from x at t0: at each level
/// query the feedback control, step explicit Euler, then price the induced
/// open-loop sequence with the semidiscrete cost.
inline RolloutResult closed_loop_simulate(const Problem& p, const ValueField& V,
                                          const PolicyField& policy, const Vec& x) {
  if (!V.grid.contains(x))
    throw PreconditionError("closed-loop simulate: initial state outside the box");
  const TimeGrid& tg = V.time_grid;
  ControlSequence seq;
  seq.samples.reserve(tg.steps());
  Vec y = x;
  RolloutResult out;
  out.trajectory.states.push_back(y);
  for (int n = 0; n < tg.steps(); ++n) {
    const Vec u = feedback_control(policy, V, y, n);
    seq.samples.push_back(u);
    y = axpy(y, tg.dt(), p.dynamics(y, tg.t(n), u));
    out.trajectory.states.push_back(y);
  }
  out.trajectory.controls = seq.samples;
  out.realized_cost = semidiscrete_cost(p, x, 0, seq, tg);
  return out;
}

}  // namespace semilag
