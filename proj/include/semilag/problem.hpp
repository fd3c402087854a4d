#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "semilag/error.hpp"
#include "semilag/random.hpp"
#include "semilag/time_grid.hpp"
#include "semilag/vec.hpp"

namespace semilag {

using DynamicsFn = std::function<Vec(const Vec& x, double t, const Vec& u)>;
using RunningCostFn = std::function<double(const Vec& x, double t, const Vec& u)>;
using TerminalCostFn = std::function<double(const Vec& x)>;

/// Finite-horizon discounted control problem on a box domain:
/// minimize the integral of exp(-lambda (s-t)) g(y, s, u) plus the
/// discounted terminal cost psi(y(T)), subject to y' = f(y, s, u),
/// controls constrained to the box [control_lower, control_upper].
struct Problem {
  std::string name;
  int dim = 0;
  int control_dim = 0;
  double t0 = 0.0;
  double horizon_end = 1.0;
  double discount = 0.0;  // lambda >= 0
  Vec domain_lower, domain_upper;
  Vec control_lower, control_upper;
  DynamicsFn dynamics;
  RunningCostFn running_cost;
  TerminalCostFn terminal_cost;
};

/// Finite control set obtained by discretizing the control box.
struct ControlGrid {
  std::vector<Vec> points;
  std::vector<int> counts;
};

/// Uniform lattice over the control box with counts[k] points per axis
/// (endpoints included; a count of 1 picks the midpoint). Axis 0 varies
/// fastest, which fixes the tie-breaking order of every argmin.
inline ControlGrid sample_control_grid(const Problem& p, const std::vector<int>& counts) {
  if (static_cast<int>(counts.size()) != p.control_dim)
    throw ConfigError("control grid: counts do not match control dimension");
  ControlGrid cg;
  cg.counts = counts;
  std::size_t total = 1;
  for (int k = 0; k < p.control_dim; ++k) {
    if (counts[k] < 1) throw ConfigError("control grid: need at least one point per axis");
    total *= static_cast<std::size_t>(counts[k]);
  }
  cg.points.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    Vec u(p.control_dim);
    std::size_t rest = i;
    for (int k = 0; k < p.control_dim; ++k) {
      const int m = counts[k];
      const int j = static_cast<int>(rest % m);
      rest /= m;
      const double lo = p.control_lower[k], hi = p.control_upper[k];
      u[k] = m == 1 ? 0.5 * (lo + hi) : lo + j * (hi - lo) / (m - 1);
    }
    cg.points.push_back(u);
  }
  return cg;
}

inline ControlGrid sample_control_grid(const Problem& p, int per_axis) {
  return sample_control_grid(p, std::vector<int>(p.control_dim, per_axis));
}

/// Measurable open-loop control as a function of time. `breakpoints` lists
/// the known discontinuities so integrators can step around them.
struct ControlSignal {
  std::function<Vec(double)> eval;
  std::vector<double> breakpoints;
};

/// Control values attached to the nodes of a time grid; sample n steers
/// the interval [t_n, t_{n+1}).
struct ControlSequence {
  std::vector<Vec> samples;
  ControlSequence() = default;
  explicit ControlSequence(std::vector<Vec> s) : samples(std::move(s)) {}
};

inline ControlSequence sample_signal(const ControlSignal& u, const TimeGrid& tg) {
  ControlSequence seq;
  seq.samples.reserve(tg.steps());
  for (int n = 0; n < tg.steps(); ++n) seq.samples.push_back(u.eval(tg.t(n)));
  return seq;
}

/// Oscillation of a signal against the piecewise-constant sampling on tg:
///   max_n  sup_{s in [t_n, t_{n+1})} |u(s) - u(t_n)|_inf,
/// estimated by dense sampling of each interval (left endpoint included,
/// right endpoint approached from below).
inline double control_oscillation(const ControlSignal& u, const TimeGrid& tg,
                                  int samples_per_step = 256) {
  if (samples_per_step < 1) throw ConfigError("control oscillation: need samples_per_step >= 1");
  double m = 0.0;
  for (int n = 0; n < tg.steps(); ++n) {
    const double a = tg.t(n), b = tg.t(n + 1);
    const Vec un = u.eval(a);
    for (int j = 1; j < samples_per_step; ++j) {
      const double s = a + (b - a) * j / samples_per_step;
      m = std::max(m, inf_dist(u.eval(s), un));
    }
    m = std::max(m, inf_dist(u.eval(std::nextafter(b, a)), un));
  }
  return m;
}

/// Empirical estimates of the regularity constants the error bounds consume:
/// sup norms of f and g, and per-argument Lipschitz constants obtained from
/// randomized single-coordinate difference quotients on the problem's boxes.
struct HypothesisEstimates {
  double m_f = 0, l_f_state = 0, l_f_time = 0, l_f_control = 0;
  double m_g = 0, l_g_state = 0, l_g_time = 0, l_g_control = 0;
  double m_psi = 0, l_psi = 0;
};

inline HypothesisEstimates hypothesis_audit(const Problem& p, int samples = 100000,
                                            std::uint64_t seed = 12345) {
  if (samples < 1) throw ConfigError("hypothesis audit: need samples >= 1");
  if (!p.dynamics || !p.running_cost || !p.terminal_cost)
    throw ConfigError("hypothesis audit: problem callbacks not set");
  Rng rng(seed);
  HypothesisEstimates e;

  auto rand_state = [&] {
    Vec x(p.dim);
    for (int k = 0; k < p.dim; ++k) x[k] = rng.uniform(p.domain_lower[k], p.domain_upper[k]);
    return x;
  };
  auto rand_control = [&] {
    Vec u(p.control_dim);
    for (int k = 0; k < p.control_dim; ++k)
      u[k] = rng.uniform(p.control_lower[k], p.control_upper[k]);
    return u;
  };
  // Log-uniform step sizes: quotients should see both the local slope and
  // box-scale variation.
  auto rand_delta = [&](double extent) {
    const double lo = std::log(1e-7), hi = std::log(1e-2);
    return extent * std::exp(rng.uniform(lo, hi));
  };
  // Forward difference if the perturbed point stays in the box, else backward.
  auto bump = [](double v, double delta, double hi) {
    return v + delta <= hi ? v + delta : v - delta;
  };

  for (int s = 0; s < samples; ++s) {
    const Vec x = rand_state();
    const Vec u = rand_control();
    const double t = rng.uniform(p.t0, p.horizon_end);

    const Vec fx = p.dynamics(x, t, u);
    const double gx = p.running_cost(x, t, u);
    const double px = p.terminal_cost(x);
    e.m_f = std::max(e.m_f, fx.inf_norm());
    e.m_g = std::max(e.m_g, std::abs(gx));
    e.m_psi = std::max(e.m_psi, std::abs(px));

    for (int k = 0; k < p.dim; ++k) {
      const double d = rand_delta(p.domain_upper[k] - p.domain_lower[k]);
      Vec xk = x;
      xk[k] = bump(x[k], d, p.domain_upper[k]);
      const double h = std::abs(xk[k] - x[k]);
      if (h == 0.0) continue;
      e.l_f_state = std::max(e.l_f_state, inf_dist(p.dynamics(xk, t, u), fx) / h);
      e.l_g_state = std::max(e.l_g_state, std::abs(p.running_cost(xk, t, u) - gx) / h);
      e.l_psi = std::max(e.l_psi, std::abs(p.terminal_cost(xk) - px) / h);
    }
    for (int k = 0; k < p.control_dim; ++k) {
      const double d = rand_delta(p.control_upper[k] - p.control_lower[k]);
      Vec uk = u;
      uk[k] = bump(u[k], d, p.control_upper[k]);
      const double h = std::abs(uk[k] - u[k]);
      if (h == 0.0) continue;
      e.l_f_control = std::max(e.l_f_control, inf_dist(p.dynamics(x, t, uk), fx) / h);
      e.l_g_control = std::max(e.l_g_control, std::abs(p.running_cost(x, t, uk) - gx) / h);
    }
    {
      const double d = rand_delta(p.horizon_end - p.t0);
      const double tk = bump(t, d, p.horizon_end);
      const double h = std::abs(tk - t);
      if (h > 0.0) {
        e.l_f_time = std::max(e.l_f_time, inf_dist(p.dynamics(x, tk, u), fx) / h);
        e.l_g_time = std::max(e.l_g_time, std::abs(p.running_cost(x, tk, u) - gx) / h);
      }
    }
  }
  return e;
}

/// Reference solution of a test case; optimal_control may be empty.
struct ExactSolution {
  std::function<double(const Vec& x, double t)> value;
  std::function<Vec(const Vec& x, double t)> optimal_control;
};

struct TestCase {
  Problem problem;
  ExactSolution exact;
  /// Computational box for convergence studies. When larger than the problem
  /// domain it must contain every state reachable from the domain within the
  /// horizon, so that clamping at its faces only binds on suboptimal control
  /// branches (which the pointwise minimum discards). Errors are still
  /// reported on the problem domain. Empty means "use the problem domain".
  Vec solve_lower;
  Vec solve_upper;

  Vec effective_solve_lower() const {
    return solve_lower.size() ? solve_lower : problem.domain_lower;
  }
  Vec effective_solve_upper() const {
    return solve_upper.size() ? solve_upper : problem.domain_upper;
  }
};

/// Dense backward solution table of the scalar Riccati equation
///   p'(t) = p + p^2,  p(t_end) = terminal,
/// integrated with classical fixed-step RK4 and evaluated with cubic
/// Hermite interpolation (the ODE supplies exact slopes at the samples).
/// With the default step both errors sit far below 1e-12 on [0, 1].
class RiccatiTable {
 public:
  RiccatiTable(double t0, double t_end, double terminal, double step = 1e-5)
      : t0_(t0) {
    const TimeGrid tg = TimeGrid::from_dt(t0, t_end, step);
    h_ = tg.dt();
    p_.resize(tg.steps() + 1);
    p_.back() = terminal;
    for (int i = tg.steps(); i > 0; --i) {
      const double p = p_[i];
      const double k1 = rhs(p);
      const double k2 = rhs(p - 0.5 * h_ * k1);
      const double k3 = rhs(p - 0.5 * h_ * k2);
      const double k4 = rhs(p - h_ * k3);
      p_[i - 1] = p - h_ / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }

  double operator()(double t) const {
    const double s = (t - t0_) / h_;
    int i = static_cast<int>(std::floor(s));
    if (i < 0) i = 0;
    if (i > static_cast<int>(p_.size()) - 2) i = static_cast<int>(p_.size()) - 2;
    const double a = s - i;
    const double p0 = p_[i], p1 = p_[i + 1];
    const double m0 = rhs(p0), m1 = rhs(p1);
    const double a2 = a * a, a3 = a2 * a;
    return (2 * a3 - 3 * a2 + 1) * p0 + (a3 - 2 * a2 + a) * h_ * m0 +
           (-2 * a3 + 3 * a2) * p1 + (a3 - a2) * h_ * m1;
  }

 private:
  static double rhs(double p) { return p + p * p; }
  double t0_, h_;
  std::vector<double> p_;
};

/// One-dimensional linear-quadratic regulator on [-1,1] with unit discount:
/// f = u, g = u^2/2, psi = x^2/2. The value function is v(x,t) = p(t) x^2/2
/// with p solving the Riccati equation above; the optimal feedback is
/// u = -p(t) x.
inline TestCase make_test1() {
  TestCase tc;
  Problem& p = tc.problem;
  p.name = "test1";
  p.dim = 1;
  p.control_dim = 1;
  p.t0 = 0.0;
  p.horizon_end = 1.0;
  p.discount = 1.0;
  p.domain_lower = {-1.0};
  p.domain_upper = {1.0};
  p.control_lower = {-1.0};
  p.control_upper = {1.0};
  p.dynamics = [](const Vec&, double, const Vec& u) { return Vec{u[0]}; };
  p.running_cost = [](const Vec&, double, const Vec& u) { return 0.5 * u[0] * u[0]; };
  p.terminal_cost = [](const Vec& x) { return 0.5 * x[0] * x[0]; };

  auto table = std::make_shared<RiccatiTable>(p.t0, p.horizon_end, 1.0);
  tc.exact.value = [table](const Vec& x, double t) { return 0.5 * (*table)(t)*x[0] * x[0]; };
  tc.exact.optimal_control = [table](const Vec& x, double t) {
    return Vec{-(*table)(t)*x[0]};
  };
  return tc;
}

/// Planar problem with curvature-coupled dynamics and no running cost:
/// f = (u, x1^2), g = 0, psi = -x2, lambda = 0 on [-1,1]^2. Pushing x1
/// outward as fast as possible is optimal, which gives the closed form
///   v(x,t) = -x2 - x1^2 (T-t) - (T-t)^3/3 - |x1| (T-t)^2,
/// with optimal control u = sign(x1) (either sign at x1 = 0).
inline TestCase make_test2() {
  TestCase tc;
  Problem& p = tc.problem;
  p.name = "test2";
  p.dim = 2;
  p.control_dim = 1;
  p.t0 = 0.0;
  p.horizon_end = 1.0;
  p.discount = 0.0;
  p.domain_lower = {-1.0, -1.0};
  p.domain_upper = {1.0, 1.0};
  p.control_lower = {-1.0};
  p.control_upper = {1.0};
  p.dynamics = [](const Vec& x, double, const Vec& u) { return Vec{u[0], x[0] * x[0]}; };
  p.running_cost = [](const Vec&, double, const Vec&) { return 0.0; };
  p.terminal_cost = [](const Vec& x) { return -x[1]; };

  const double T = p.horizon_end;
  tc.exact.value = [T](const Vec& x, double t) {
    const double r = T - t;
    return -x[1] - x[0] * x[0] * r - r * r * r / 3.0 - std::abs(x[0]) * r * r;
  };
  tc.exact.optimal_control = [](const Vec& x, double) {
    return Vec{x[0] >= 0.0 ? 1.0 : -1.0};
  };
  // The closed form above is the free-space value: optimal trajectories leave
  // [-1,1]^2 (x1 drifts to +-2, x2 climbs to 1 + 7/3 from the top corners).
  // Solving on the closure of that reachable tube keeps every optimal branch
  // away from the clamped faces; extents stay multiples of every ladder step.
  tc.solve_lower = {-2.0, -1.0};
  tc.solve_upper = {2.0, 3.4};
  return tc;
}

/// Planar instance satisfying the foot-point invariance condition on a 3x3
/// mesh with dt = 0.5: the speed field 2*max(0, 1 - max(|x1|,|x2|)) vanishes
/// on the boundary ring, so every Euler foot from a node lands exactly on a
/// node and never leaves the box. On such data the backward recursion and the
/// enumerated discrete cost agree to rounding, which makes the instance a
/// sharp equivalence check.
inline Problem make_dpp_2d() {
  Problem p;
  p.name = "dpp2d";
  p.dim = 2;
  p.control_dim = 1;
  p.t0 = 0.0;
  p.horizon_end = 1.0;
  p.discount = 1.0;
  p.domain_lower = {-1.0, -1.0};
  p.domain_upper = {1.0, 1.0};
  p.control_lower = {-1.0};
  p.control_upper = {1.0};
  p.dynamics = [](const Vec& x, double, const Vec& u) {
    const double speed = 2.0 * std::max(0.0, 1.0 - std::max(std::abs(x[0]), std::abs(x[1])));
    return Vec{u[0] * speed, -u[0] * speed};
  };
  p.running_cost = [](const Vec& x, double, const Vec& u) {
    return 0.5 * u[0] * u[0] + 0.25 * x[0] * x[0];
  };
  p.terminal_cost = [](const Vec& x) { return 0.5 * std::abs(x[0]) + 0.25 * x[1]; };
  return p;
}

}  // namespace semilag
