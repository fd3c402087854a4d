#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "semilag/cost.hpp"
#include "semilag/dynamics.hpp"
#include "semilag/error.hpp"
#include "semilag/grid.hpp"
#include "semilag/problem.hpp"
#include "semilag/solver.hpp"
#include "semilag/time_grid.hpp"
#include "semilag/vec.hpp"

namespace semilag {

enum class ErrorNorm { kAbsolute, kRelative };

/// Signed per-node, per-level error V - v_exact, same shape as the field.
struct ErrorSurface {
  Grid grid;
  TimeGrid time_grid;
  std::vector<std::vector<double>> layers;
};

inline ErrorSurface error_surface(const ValueField& V, const ExactSolution& exact) {
  if (!exact.value) throw ConfigError("error surface: no exact solution available");
  ErrorSurface s{V.grid, V.time_grid, {}};
  s.layers.resize(V.layers.size());
  for (std::size_t n = 0; n < V.layers.size(); ++n) {
    s.layers[n].resize(V.layers[n].size());
    const double t = V.time_grid.t(static_cast<int>(n));
    for (std::size_t i = 0; i < V.layers[n].size(); ++i)
      s.layers[n][i] = V.layers[n][i] - exact.value(V.grid.node(i), t);
  }
  return s;
}

/// Sup-norm error over all nodes and all time levels jointly. The relative
/// variant divides by the max of |v_exact| over the same index set.
inline double sup_error(const ValueField& V, const ExactSolution& exact, ErrorNorm kind) {
  if (!exact.value) throw ConfigError("sup error: no exact solution available");
  double err = 0.0, scale = 0.0;
  for (std::size_t n = 0; n < V.layers.size(); ++n) {
    const double t = V.time_grid.t(static_cast<int>(n));
    for (std::size_t i = 0; i < V.layers[n].size(); ++i) {
      const double v = exact.value(V.grid.node(i), t);
      if (!std::isfinite(v)) throw PreconditionError("sup error: exact solution not finite at a node");
      err = std::max(err, std::abs(V.layers[n][i] - v));
      scale = std::max(scale, std::abs(v));
    }
  }
  if (kind == ErrorNorm::kAbsolute) return err;
  if (scale == 0.0)
    throw PreconditionError("sup error: relative norm undefined, exact solution is zero");
  return err / scale;
}

/// Experimental order of convergence between one halving: log2(coarse/fine).
inline double eoc(double coarse_error, double fine_error) {
  if (!(coarse_error > 0) || !(fine_error > 0))
    throw PreconditionError("eoc: errors must be positive");
  return std::log2(coarse_error / fine_error);
}

struct EocRow {
  double dt = 0, dx = 0, error = 0;
  std::optional<double> eoc;
};

struct EocReport {
  std::vector<EocRow> rows;
  ErrorNorm norm = ErrorNorm::kRelative;
};

struct RefinementOptions {
  double base_step = 0.1;
  int levels = 5;
  ErrorNorm norm = ErrorNorm::kAbsolute;
  BoundaryPolicy boundary = BoundaryPolicy::kClamp;
  // Control points per control axis; 0 keeps the same count as the spatial
  // nodes along the first state axis, following the tables' convention.
  int control_points = 0;
};

namespace detail {

struct BoxSlice {
  Grid sub;
  std::array<int, kMaxDim> offset;
};

/// Node-aligned sub-box of a grid (every requested bound must sit on a
/// source node, relative tolerance 1e-9) plus the index offset into the
/// source lattice.
inline BoxSlice make_box_slice(const Grid& src, const Vec& lower, const Vec& upper) {
  std::vector<int> counts(src.dim());
  std::array<int, kMaxDim> offset{};
  for (int k = 0; k < src.dim(); ++k) {
    const double cells = (upper[k] - lower[k]) / src.spacing(k);
    counts[k] = static_cast<int>(std::lround(cells)) + 1;
    const double shift = (lower[k] - src.lower(k)) / src.spacing(k);
    offset[k] = static_cast<int>(std::lround(shift));
    if (std::abs(cells - (counts[k] - 1)) > 1e-9 || std::abs(shift - offset[k]) > 1e-9 ||
        offset[k] < 0 || offset[k] + counts[k] > src.count(k))
      throw PreconditionError("restrict to box: bounds are not node-aligned");
  }
  return {Grid(lower, upper, counts), offset};
}

template <typename T>
std::vector<std::vector<T>> slice_layers(const Grid& src, const BoxSlice& s,
                                         const std::vector<std::vector<T>>& layers) {
  std::vector<std::vector<T>> out(layers.size());
  std::array<int, kMaxDim> idx{};
  for (std::size_t lvl = 0; lvl < layers.size(); ++lvl) {
    const std::vector<T>& in = layers[lvl];
    std::vector<T>& dst = out[lvl];
    dst.resize(s.sub.node_count());
    idx.fill(0);
    for (std::size_t j = 0; j < dst.size(); ++j) {
      std::size_t src_index = 0;
      for (int k = 0; k < src.dim(); ++k) src_index += (idx[k] + s.offset[k]) * src.stride(k);
      dst[j] = in[src_index];
      for (int k = 0; k < src.dim(); ++k) {
        if (++idx[k] < s.sub.count(k)) break;
        idx[k] = 0;
      }
    }
  }
  return out;
}

}  // namespace detail

/// Copies the layers of a value field onto a node-aligned sub-box.
inline ValueField restrict_to_box(const ValueField& V, const Vec& lower, const Vec& upper) {
  const detail::BoxSlice s = detail::make_box_slice(V.grid, lower, upper);
  return ValueField{s.sub, V.time_grid, detail::slice_layers(V.grid, s, V.layers)};
}

/// Same restriction for a feedback field (argmin indices stay valid because
/// the control grid is unchanged).
inline PolicyField restrict_policy_to_box(const PolicyField& P, const Vec& lower,
                                          const Vec& upper) {
  const detail::BoxSlice s = detail::make_box_slice(P.grid, lower, upper);
  return PolicyField{s.sub,      P.time_grid, P.controls,
                     P.problem,  P.boundary,  detail::slice_layers(P.grid, s, P.argmin)};
}

/// Halving ladder dt = dx = base/2^(i-1), i = 1..levels; each level is an
/// independent solve and the EOC column is chained between consecutive rows
/// (absent where an error vanishes). The solve runs on the test case's
/// computational box; the error is measured on the problem domain only.
inline EocReport refinement_study(const TestCase& tc, const RefinementOptions& opt) {
  if (opt.levels < 2) throw ConfigError("refinement study: need at least two levels");
  if (!(opt.base_step > 0)) throw ConfigError("refinement study: need base step > 0");
  const Problem& p = tc.problem;
  const Vec solve_lower = tc.effective_solve_lower();
  const Vec solve_upper = tc.effective_solve_upper();
  const bool padded = !(solve_lower == p.domain_lower && solve_upper == p.domain_upper);
  EocReport report;
  report.norm = opt.norm;
  for (int i = 0; i < opt.levels; ++i) {
    const double step = opt.base_step / static_cast<double>(1 << i);
    const Grid grid = build_grid(solve_lower, solve_upper, step);
    const TimeGrid tg = TimeGrid::from_dt(p.t0, p.horizon_end, step);
    // Control resolution follows the reporting grid so padding does not
    // change the discretization the tables are quoted for.
    const Grid report_grid = build_grid(p.domain_lower, p.domain_upper, step);
    const int cpts = opt.control_points > 0 ? opt.control_points : report_grid.count(0);
    const ControlGrid controls = sample_control_grid(p, cpts);
    const SolveResult sol = solve(p, grid, tg, controls, opt.boundary);
    EocRow row;
    row.dt = tg.dt();
    row.dx = grid.spacing(0);
    row.error = padded
                    ? sup_error(restrict_to_box(sol.value, p.domain_lower, p.domain_upper),
                                tc.exact, opt.norm)
                    : sup_error(sol.value, tc.exact, opt.norm);
    if (!report.rows.empty() && report.rows.back().error > 0 && row.error > 0)
      row.eoc = eoc(report.rows.back().error, row.error);
    report.rows.push_back(row);
  }
  return report;
}

/// Exact minimum over control sequences of the fully discrete cost from
/// state y at level n, by depth-first recursion with shared trajectory
/// prefixes. The terminal cost is the interpolated nodal terminal layer
/// (clamp policy), i.e. exactly the terminal data the backward recursion
/// propagates; see verify_dpp.
inline double enumerate_discrete_min(const Problem& p, const Grid& grid, const TimeGrid& tg,
                                     const ControlGrid& controls, const Vec& y, int n,
                                     const std::vector<double>& terminal_nodal,
                                     bool interpolate_terminal = true) {
  const double dt = tg.dt();
  const double beta = 1.0 - p.discount * dt;
  auto rec = [&](auto&& self, const Vec& z, int k) -> double {
    if (k == tg.steps()) {
      if (interpolate_terminal)
        return grid.interpolate_unchecked(terminal_nodal.data(), grid.clamp(z));
      return p.terminal_cost(z);
    }
    const double t = tg.t(k);
    double best = std::numeric_limits<double>::infinity();
    for (const Vec& u : controls.points) {
      const double stage = dt * interpolated_running_cost(p, grid, z, t, u);
      const double val = stage + beta * self(self, axpy(z, dt, p.dynamics(z, t, u)), k + 1);
      if (val < best) best = val;
    }
    return best;
  };
  return rec(rec, y, n);
}

/// Equivalence check between the backward recursion and the brute-force
/// minimum of the fully discrete cost over all control sequences: returns
/// the max deviation over every node and level. Enumeration cost grows like
/// |controls|^N_t and is refused above max_sequences.
inline double verify_dpp(const Problem& p, const Grid& grid, const TimeGrid& tg,
                         const ControlGrid& controls, double max_sequences = 1e6,
                         bool interpolate_terminal = true) {
  if (std::pow(static_cast<double>(controls.points.size()), tg.steps()) > max_sequences)
    throw BudgetError("verify dpp: enumeration budget exceeded");
  const SolveResult sol = solve(p, grid, tg, controls, BoundaryPolicy::kClamp);
  const std::vector<double>& terminal = sol.value.layers[tg.steps()];
  double dev = 0.0;
  for (int n = 0; n <= tg.steps(); ++n) {
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
      const double e = enumerate_discrete_min(p, grid, tg, controls, grid.node(i), n,
                                              terminal, interpolate_terminal);
      dev = std::max(dev, std::abs(sol.value.layers[n][i] - e));
    }
  }
  return dev;
}

struct Lemma2Row {
  double dt = 0, dx = 0, gap = 0;
  std::optional<double> ratio;  // previous gap / this gap
};

struct Lemma2Report {
  std::vector<Lemma2Row> rows;
};

/// Cost-functional gap |continuous - fully discrete| per (dt, dx) pair,
/// maximized over the probe states, with consecutive ratios. First-order
/// behavior shows as ratios near 2 under halving.
inline Lemma2Report lemma2_study(const Problem& p, const ControlSignal& signal,
                                 const std::vector<std::pair<double, double>>& steps,
                                 const std::vector<Vec>& probes) {
  if (probes.empty()) throw ConfigError("lemma2 study: need at least one probe state");
  Lemma2Report report;
  for (const auto& [dt, dx] : steps) {
    const Grid grid = build_grid(p.domain_lower, p.domain_upper, dx);
    const TimeGrid tg = TimeGrid::from_dt(p.t0, p.horizon_end, dt);
    Lemma2Row row;
    row.dt = tg.dt();
    row.dx = grid.spacing(0);
    for (const Vec& x : probes)
      row.gap = std::max(row.gap, cost_gap(p, grid, x, p.t0, signal, tg));
    if (!report.rows.empty() && report.rows.back().gap > 0 && row.gap > 0)
      row.ratio = report.rows.back().gap / row.gap;
    report.rows.push_back(row);
  }
  return report;
}

struct Lemma1Row {
  double dt = 0, m_u = 0, divergence = 0;
  std::optional<double> bound;
  std::optional<double> ratio;  // previous divergence / this divergence
};

struct Lemma1Report {
  std::vector<Lemma1Row> rows;
  bool bound_checked = false;
  bool bound_ok = true;
};

/// Reference-vs-Euler divergence per step, maximized over grid times and
/// probe states, with consecutive ratios. When the audited state-Lipschitz
/// constant of f vanishes (state-independent dynamics), each row is also
/// checked against the explicit bound
///   (T - t0) * L_f_control * M_u + 2 * M_f * dt + slack.
inline Lemma1Report lemma1_study(const Problem& p, const ControlSignal& signal,
                                 const std::vector<double>& dts,
                                 const std::vector<Vec>& probes,
                                 const HypothesisEstimates& est, double slack = 1e-8) {
  if (probes.empty()) throw ConfigError("lemma1 study: need at least one probe state");
  Lemma1Report report;
  report.bound_checked = est.l_f_state <= 1e-9;
  for (double dt : dts) {
    const TimeGrid tg = TimeGrid::from_dt(p.t0, p.horizon_end, dt);
    Lemma1Row row;
    row.dt = tg.dt();
    row.m_u = control_oscillation(signal, tg);
    for (const Vec& x : probes) {
      const ControlSequence seq = sample_signal(signal, tg);
      const DiscreteTrajectory disc = euler_trajectory(p, x, seq, tg);
      const ReferenceTrajectory ref =
          reference_trajectory(p, x, signal, p.t0, tg.dt() / 100.0);
      row.divergence = std::max(row.divergence, trajectory_divergence(ref, disc, tg).max);
    }
    if (report.bound_checked) {
      row.bound = (p.horizon_end - p.t0) * est.l_f_control * row.m_u +
                  2.0 * est.m_f * tg.dt() + slack;
      if (row.divergence > *row.bound) report.bound_ok = false;
    }
    if (!report.rows.empty() && report.rows.back().divergence > 0 && row.divergence > 0)
      row.ratio = report.rows.back().divergence / row.divergence;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace semilag
