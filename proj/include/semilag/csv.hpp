#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "semilag/analysis.hpp"
#include "semilag/dynamics.hpp"
#include "semilag/error.hpp"
#include "semilag/problem.hpp"
#include "semilag/solver.hpp"

namespace semilag {

/// Shortest round-trip decimal form (17 significant digits).
inline std::string csv_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Comma-separated writer: header row first, `.` decimal point, one record
/// per line. Numeric cells carry 17 significant digits.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw ConfigError("csv: cannot open " + path + " for writing");
    columns_ = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) out_ << ',';
      out_ << header[i];
    }
    out_ << '\n';
  }

  void row(const std::vector<double>& values) {
    if (values.size() != columns_) throw ConfigError("csv: row width does not match header");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out_ << ',';
      out_ << csv_double(values[i]);
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
  std::size_t columns_ = 0;
};

/// One value layer: x1..xd, value at time t_n.
inline void write_value_layer_csv(const std::string& path, const ValueField& V, int n) {
  std::vector<std::string> header;
  for (int k = 0; k < V.grid.dim(); ++k) header.push_back("x" + std::to_string(k + 1));
  header.push_back("value");
  CsvWriter w(path, header);
  std::vector<double> row(V.grid.dim() + 1);
  for (std::size_t i = 0; i < V.grid.node_count(); ++i) {
    const Vec x = V.grid.node(i);
    for (int k = 0; k < V.grid.dim(); ++k) row[k] = x[k];
    row[V.grid.dim()] = V.at(n, i);
    w.row(row);
  }
}

/// One feedback layer: x1..xd, u1..uc chosen at time t_n.
inline void write_policy_layer_csv(const std::string& path, const PolicyField& P, int n) {
  std::vector<std::string> header;
  for (int k = 0; k < P.grid.dim(); ++k) header.push_back("x" + std::to_string(k + 1));
  for (int k = 0; k < P.problem.control_dim; ++k) header.push_back("u" + std::to_string(k + 1));
  CsvWriter w(path, header);
  std::vector<double> row(P.grid.dim() + P.problem.control_dim);
  for (std::size_t i = 0; i < P.grid.node_count(); ++i) {
    const Vec x = P.grid.node(i);
    for (int k = 0; k < P.grid.dim(); ++k) row[k] = x[k];
    const Vec& u = P.controls.points[P.argmin[n][i]];
    for (int k = 0; k < P.problem.control_dim; ++k) row[P.grid.dim() + k] = u[k];
    w.row(row);
  }
}

/// Refinement table: dt, dx, error, eoc (empty cell on the first row).
inline void write_eoc_csv(const std::string& path, const EocReport& report) {
  std::ofstream out(path);
  if (!out) throw ConfigError("csv: cannot open " + path + " for writing");
  out << "dt,dx,error,eoc\n";
  for (const EocRow& r : report.rows) {
    out << csv_double(r.dt) << ',' << csv_double(r.dx) << ',' << csv_double(r.error) << ',';
    if (r.eoc) out << csv_double(*r.eoc);
    out << '\n';
  }
}

/// Signed error surface at one time level: x1..xd, error = V - v_exact.
inline void write_surface_layer_csv(const std::string& path, const ErrorSurface& S, int n) {
  std::vector<std::string> header;
  for (int k = 0; k < S.grid.dim(); ++k) header.push_back("x" + std::to_string(k + 1));
  header.push_back("error");
  CsvWriter w(path, header);
  std::vector<double> row(S.grid.dim() + 1);
  for (std::size_t i = 0; i < S.grid.node_count(); ++i) {
    const Vec x = S.grid.node(i);
    for (int k = 0; k < S.grid.dim(); ++k) row[k] = x[k];
    row[S.grid.dim()] = S.layers[n][i];
    w.row(row);
  }
}

/// Closed-loop rollout: n, t, y1..yd, u1..uc (controls empty on the last row).
inline void write_trajectory_csv(const std::string& path, const Problem& p,
                                 const DiscreteTrajectory& traj, const TimeGrid& tg) {
  std::ofstream out(path);
  if (!out) throw ConfigError("csv: cannot open " + path + " for writing");
  out << "n,t";
  for (int k = 0; k < p.dim; ++k) out << ",y" << k + 1;
  for (int k = 0; k < p.control_dim; ++k) out << ",u" << k + 1;
  out << '\n';
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    out << i << ',' << csv_double(tg.t(static_cast<int>(i)));
    for (int k = 0; k < p.dim; ++k) out << ',' << csv_double(traj.states[i][k]);
    if (i < traj.controls.size())
      for (int k = 0; k < p.control_dim; ++k) out << ',' << csv_double(traj.controls[i][k]);
    else
      for (int k = 0; k < p.control_dim; ++k) out << ',';
    out << '\n';
  }
}

/// Divergence table: dt, m_u, divergence, ratio, bound (bound only when the
/// study checked the explicit state-independent inequality).
inline void write_lemma1_csv(const std::string& path, const Lemma1Report& rep) {
  std::ofstream out(path);
  if (!out) throw ConfigError("csv: cannot open " + path + " for writing");
  out << "dt,m_u,divergence,ratio,bound\n";
  for (const Lemma1Row& r : rep.rows) {
    out << csv_double(r.dt) << ',' << csv_double(r.m_u) << ',' << csv_double(r.divergence)
        << ',';
    if (r.ratio) out << csv_double(*r.ratio);
    out << ',';
    if (r.bound) out << csv_double(*r.bound);
    out << '\n';
  }
}

/// Cost-gap table: dt, dx, gap, ratio.
inline void write_lemma2_csv(const std::string& path, const Lemma2Report& rep) {
  std::ofstream out(path);
  if (!out) throw ConfigError("csv: cannot open " + path + " for writing");
  out << "dt,dx,gap,ratio\n";
  for (const Lemma2Row& r : rep.rows) {
    out << csv_double(r.dt) << ',' << csv_double(r.dx) << ',' << csv_double(r.gap) << ',';
    if (r.ratio) out << csv_double(*r.ratio);
    out << '\n';
  }
}

/// Audited hypothesis constants as name,value records.
inline void write_audit_csv(const std::string& path, const HypothesisEstimates& e) {
  std::ofstream out(path);
  if (!out) throw ConfigError("csv: cannot open " + path + " for writing");
  out << "constant,value\n";
  out << "m_f," << csv_double(e.m_f) << '\n';
  out << "l_f_state," << csv_double(e.l_f_state) << '\n';
  out << "l_f_time," << csv_double(e.l_f_time) << '\n';
  out << "l_f_control," << csv_double(e.l_f_control) << '\n';
  out << "m_g," << csv_double(e.m_g) << '\n';
  out << "l_g_state," << csv_double(e.l_g_state) << '\n';
  out << "l_g_time," << csv_double(e.l_g_time) << '\n';
  out << "l_g_control," << csv_double(e.l_g_control) << '\n';
  out << "m_psi," << csv_double(e.m_psi) << '\n';
  out << "l_psi," << csv_double(e.l_psi) << '\n';
}

}  // namespace semilag
