// Command-line front end: solve problems, run refinement studies and
// verification suites, roll out feedback policies, and audit hypothesis
// constants. Artifacts are CSV files plus a key = value manifest per run.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "semilag/semilag.hpp"

namespace {

using namespace semilag;

using Clock = std::chrono::steady_clock;
using Manifest = std::vector<std::pair<std::string, std::string>>;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string vec_string(const Vec& v) {
  std::string s;
  for (int k = 0; k < v.size(); ++k) {
    if (k) s += ',';
    s += csv_double(v[k]);
  }
  return s;
}

std::string counts_string(const Grid& g) {
  std::string s;
  for (int k = 0; k < g.dim(); ++k) {
    if (k) s += 'x';
    s += std::to_string(g.count(k));
  }
  return s;
}

/// Raw flag storage; presence is checked through CLI11 counts so that flags
/// override config-file values which override defaults.
struct Flags {
  std::string problem, config, boundary, norm, out, x;
  double dt = 0, dx = 0, base = 0, lambda = 0;
  int controls = 0, levels = 0, nodes = 0, nt = 0, samples = 0;
  std::uint64_t seed = 0, budget = 0;
};

void add_shared(CLI::App* sub, Flags& f) {
  sub->add_option("--problem", f.problem, "built-in (test1, test2, dpp2d) or problem file");
  sub->add_option("--config", f.config, "flat key = value config file");
  sub->add_option("--dt", f.dt, "time step");
  sub->add_option("--dx", f.dx, "grid spacing");
  sub->add_option("--controls", f.controls, "control points per control axis");
  sub->add_option("--boundary", f.boundary, "foot-point policy")
      ->check(CLI::IsMember({"clamp", "error"}));
  sub->add_option("--norm", f.norm, "error norm")->check(CLI::IsMember({"relative", "absolute"}));
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--seed", f.seed, "rng seed for audits and property sampling");
  sub->add_option("--budget", f.budget, "enumeration work cap");
}

struct Ctx {
  RunConfig rc;
  KeyValues kv;
};

bool flag_given(const CLI::App* sub, const std::string& name) {
  const CLI::Option* opt = sub->get_option_no_throw(name);
  return opt && opt->count() > 0;
}

Ctx make_ctx(const CLI::App* sub, const Flags& f) {
  Ctx c;
  if (flag_given(sub, "--config")) c.kv = KeyValues::from_file(f.config);
  c.rc.apply(c.kv);
  if (flag_given(sub, "--problem")) c.rc.problem = f.problem;
  if (flag_given(sub, "--dt")) c.rc.dt = f.dt;
  if (flag_given(sub, "--dx")) c.rc.dx = f.dx;
  if (flag_given(sub, "--controls")) c.rc.controls = f.controls;
  if (flag_given(sub, "--boundary")) c.rc.boundary = parse_boundary(f.boundary);
  if (flag_given(sub, "--norm")) c.rc.norm = parse_norm(f.norm);
  if (flag_given(sub, "--out")) c.rc.out_dir = f.out;
  if (flag_given(sub, "--seed")) c.rc.seed = f.seed;
  if (flag_given(sub, "--budget")) c.rc.budget = f.budget;
  if (flag_given(sub, "--base")) c.rc.base_step = f.base;
  if (flag_given(sub, "--levels")) c.rc.levels = f.levels;
  if (flag_given(sub, "--x")) c.rc.start = parse_vec_string(f.x, "flag --x");
  return c;
}

std::string out_path(const RunConfig& rc, const std::string& file) {
  std::error_code ec;
  std::filesystem::create_directories(rc.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + rc.out_dir);
  return (std::filesystem::path(rc.out_dir) / file).string();
}

void note_artifact(const std::string& path) { std::cout << "wrote " << path << "\n"; }

void add_run_keys(Manifest& m, const std::string& command, const RunConfig& rc,
                  const TestCase& tc) {
  const Problem& p = tc.problem;
  m.emplace_back("command", command);
  m.emplace_back("problem", rc.problem);
  m.emplace_back("name", p.name);
  m.emplace_back("dim", std::to_string(p.dim));
  m.emplace_back("control_dim", std::to_string(p.control_dim));
  m.emplace_back("t0", csv_double(p.t0));
  m.emplace_back("t_end", csv_double(p.horizon_end));
  m.emplace_back("discount", csv_double(p.discount));
  m.emplace_back("domain_lower", vec_string(p.domain_lower));
  m.emplace_back("domain_upper", vec_string(p.domain_upper));
  m.emplace_back("solve_lower", vec_string(tc.effective_solve_lower()));
  m.emplace_back("solve_upper", vec_string(tc.effective_solve_upper()));
  m.emplace_back("boundary", boundary_name(rc.boundary));
  m.emplace_back("norm", norm_name(rc.norm));
  m.emplace_back("seed", std::to_string(rc.seed));
  m.emplace_back("budget", std::to_string(rc.budget));
}

void add_audit_keys(Manifest& m, const Problem& p, std::uint64_t seed) {
  const HypothesisEstimates e = hypothesis_audit(p, 100000, seed);
  m.emplace_back("audit_m_f", csv_double(e.m_f));
  m.emplace_back("audit_l_f_state", csv_double(e.l_f_state));
  m.emplace_back("audit_l_f_time", csv_double(e.l_f_time));
  m.emplace_back("audit_l_f_control", csv_double(e.l_f_control));
  m.emplace_back("audit_m_g", csv_double(e.m_g));
  m.emplace_back("audit_l_g_state", csv_double(e.l_g_state));
  m.emplace_back("audit_l_g_time", csv_double(e.l_g_time));
  m.emplace_back("audit_l_g_control", csv_double(e.l_g_control));
  m.emplace_back("audit_m_psi", csv_double(e.m_psi));
  m.emplace_back("audit_l_psi", csv_double(e.l_psi));
}

void finish_manifest(Manifest& m, const RunConfig& rc, const std::string& file,
                     Clock::time_point start) {
  m.emplace_back("wall_seconds", csv_double(seconds_since(start)));
  const std::string path = out_path(rc, file);
  write_manifest(path, m);
  note_artifact(path);
}

struct Discretization {
  Grid grid;          // solve box
  Grid report_grid;   // problem domain
  TimeGrid tg;
  ControlGrid controls;
  bool padded;
};

/// Grid on the computational box, reporting grid on the problem domain, and
/// the control lattice. The control count follows the reporting grid's first
/// axis unless set explicitly, matching the tables' convention.
Discretization discretize(const TestCase& tc, const RunConfig& rc) {
  if (!(rc.dx > 0)) throw ConfigError("need dx > 0");
  if (!(rc.dt > 0)) throw ConfigError("need dt > 0");
  const Problem& p = tc.problem;
  if (p.discount > 0 && rc.dt > 0.5 / p.discount + 1e-15)
    throw PreconditionError("requested dt violates the discount step bound dt <= 1/(2*lambda)");
  const Vec lo = tc.effective_solve_lower();
  const Vec hi = tc.effective_solve_upper();
  Grid grid = build_grid(lo, hi, rc.dx);
  Grid report_grid = build_grid(p.domain_lower, p.domain_upper, rc.dx);
  TimeGrid tg = TimeGrid::from_dt(p.t0, p.horizon_end, rc.dt);
  const int cpts = rc.controls > 0 ? rc.controls : report_grid.count(0);
  ControlGrid controls = sample_control_grid(p, cpts);
  const bool padded = !(lo == p.domain_lower && hi == p.domain_upper);
  return {std::move(grid), std::move(report_grid), tg, std::move(controls), padded};
}

void cmd_solve(Ctx c) {
  c.kv.finish();
  const auto start = Clock::now();
  const TestCase tc = resolve_problem(c.rc.problem);
  const Problem& p = tc.problem;
  Discretization d = discretize(tc, c.rc);
  SolveResult sol = solve(p, d.grid, d.tg, d.controls, c.rc.boundary);
  const ValueField V = d.padded
                           ? restrict_to_box(sol.value, p.domain_lower, p.domain_upper)
                           : std::move(sol.value);
  const PolicyField P =
      d.padded ? restrict_policy_to_box(sol.policy, p.domain_lower, p.domain_upper)
               : std::move(sol.policy);

  const int last = d.tg.steps();
  std::string path = out_path(c.rc, p.name + "_value_0.csv");
  write_value_layer_csv(path, V, 0);
  note_artifact(path);
  path = out_path(c.rc, p.name + "_value_" + std::to_string(last) + ".csv");
  write_value_layer_csv(path, V, last);
  note_artifact(path);
  path = out_path(c.rc, p.name + "_policy_0.csv");
  write_policy_layer_csv(path, P, 0);
  note_artifact(path);
  if (tc.exact.value) {
    const ErrorSurface surf = error_surface(V, tc.exact);
    path = out_path(c.rc, p.name + "_error_0.csv");
    write_surface_layer_csv(path, surf, 0);
    note_artifact(path);
  }

  Manifest m;
  add_run_keys(m, "solve", c.rc, tc);
  m.emplace_back("dt", csv_double(d.tg.dt()));
  m.emplace_back("dx", csv_double(d.grid.spacing(0)));
  m.emplace_back("nodes", counts_string(d.grid));
  m.emplace_back("steps", std::to_string(d.tg.steps()));
  m.emplace_back("control_points", std::to_string(d.controls.points.size()));
  add_audit_keys(m, p, c.rc.seed);
  finish_manifest(m, c.rc, p.name + "_solve_manifest.txt", start);
  std::printf("solve %s: %s nodes, %d steps, %zu controls\n", p.name.c_str(),
              counts_string(d.grid).c_str(), d.tg.steps(), d.controls.points.size());
}

void cmd_eoc(Ctx c) {
  c.kv.finish();
  const auto start = Clock::now();
  if (c.rc.levels < 2) throw ConfigError("eoc: need --levels >= 2");
  const TestCase tc = resolve_problem(c.rc.problem);
  RefinementOptions opt;
  opt.base_step = c.rc.base_step;
  opt.levels = c.rc.levels;
  opt.norm = c.rc.norm;
  opt.boundary = c.rc.boundary;
  opt.control_points = c.rc.controls;
  const EocReport report = refinement_study(tc, opt);

  std::printf("%-12s %-12s %-16s %s\n", "dt", "dx", "error", "eoc");
  for (const EocRow& r : report.rows) {
    if (r.eoc)
      std::printf("%-12g %-12g %-16.10f %.4f\n", r.dt, r.dx, r.error, *r.eoc);
    else
      std::printf("%-12g %-12g %-16.10f -\n", r.dt, r.dx, r.error);
  }

  const std::string path =
      out_path(c.rc, tc.problem.name + "_eoc_" + std::to_string(c.rc.levels) + ".csv");
  write_eoc_csv(path, report);
  note_artifact(path);

  Manifest m;
  add_run_keys(m, "eoc", c.rc, tc);
  m.emplace_back("base", csv_double(c.rc.base_step));
  m.emplace_back("levels", std::to_string(c.rc.levels));
  m.emplace_back("control_points",
                 c.rc.controls > 0 ? std::to_string(c.rc.controls) : "match-axis0");
  add_audit_keys(m, tc.problem, c.rc.seed);
  finish_manifest(m, c.rc, tc.problem.name + "_eoc_manifest.txt", start);
}

/// One machine-readable result line; returns ok so callers can accumulate.
bool report_check(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s %s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  return ok;
}

struct VerifyParams {
  int nodes = 5;
  int nt = 4;
  double lambda = 1.0;
};

ControlSignal half_sine_signal(int control_dim) {
  ControlSignal sig;
  sig.eval = [control_dim](double s) {
    return Vec(control_dim, 0.5 * std::sin(2.0 * 3.14159265358979323846 * s));
  };
  return sig;
}

std::vector<Vec> probe_states(const Problem& p) {
  std::vector<Vec> probes;
  Vec center(p.dim);
  for (int k = 0; k < p.dim; ++k)
    center[k] = 0.5 * (p.domain_lower[k] + p.domain_upper[k]);
  probes.push_back(center);
  for (unsigned mask = 0; mask < (1u << p.dim); ++mask) {
    Vec corner(p.dim);
    for (int k = 0; k < p.dim; ++k)
      corner[k] = (mask >> k) & 1u ? p.domain_upper[k] : p.domain_lower[k];
    probes.push_back(corner);
  }
  return probes;
}

bool suite_dpp(const Ctx& c, const VerifyParams& vp) {
  const TestCase tc = resolve_problem(c.rc.problem);
  const Problem& p = tc.problem;
  const Grid grid(p.domain_lower, p.domain_upper, std::vector<int>(p.dim, vp.nodes));
  const TimeGrid tg(p.t0, p.horizon_end, vp.nt);
  const int cpts = c.rc.controls > 0 ? c.rc.controls : 3;
  const ControlGrid controls = sample_control_grid(p, cpts);
  const double dev =
      verify_dpp(p, grid, tg, controls, static_cast<double>(c.rc.budget));
  char detail[160];
  std::snprintf(detail, sizeof detail,
                "deviation=%.3e tol=1e-12 nodes=%d nt=%d controls=%d problem=%s", dev,
                vp.nodes, vp.nt, cpts, p.name.c_str());
  return report_check(dev <= 1e-12, "dpp", detail);
}

bool suite_theta(const VerifyParams& vp) {
  if (!(vp.lambda > 0)) throw ConfigError("verify theta: need --lambda > 0");
  const double lam = vp.lambda;
  bool ok = true;
  char detail[160];

  const double t_small = theta(lam, 1e-6 / lam);
  std::snprintf(detail, sizeof detail, "theta(1e-6)=%.12f tol=1e-5", t_small);
  ok &= report_check(std::abs(t_small - 1.0) <= 1e-5, "theta_left_endpoint", detail);

  const double t_max = theta(lam, 0.5 / lam);
  const double two_log_two = 2.0 * std::log(2.0);
  std::snprintf(detail, sizeof detail, "theta(1/2)=%.17g expected=%.17g tol=1e-12", t_max,
                two_log_two);
  ok &= report_check(std::abs(t_max - two_log_two) <= 1e-12, "theta_right_endpoint", detail);

  bool theta_increasing = true, rate_increasing = true;
  double prev_theta = 0.0, prev_rate = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double dt = 0.5 * j / (100.0 * lam);
    const double th = theta(lam, dt);
    const double rate = (th - 1.0) / dt;
    if (j > 1) {
      theta_increasing &= th > prev_theta;
      rate_increasing &= rate > prev_rate;
    }
    prev_theta = th;
    prev_rate = rate;
  }
  ok &= report_check(theta_increasing, "theta_monotone", "100-point ladder over (0, 1/(2 lambda)]");
  ok &= report_check(rate_increasing, "theta_rate_monotone",
                     "(theta-1)/dt on the same ladder");
  return ok;
}

bool suite_lemma1(const Ctx& c) {
  const TestCase tc = resolve_problem(c.rc.problem);
  const Problem& p = tc.problem;
  const ControlSignal sig = half_sine_signal(p.control_dim);
  const std::vector<double> dts{0.1, 0.05, 0.025, 0.0125};
  const HypothesisEstimates est = hypothesis_audit(p, 100000, c.rc.seed);
  const Lemma1Report rep = lemma1_study(p, sig, dts, probe_states(p), est);

  bool ratios_ok = true;
  for (const Lemma1Row& r : rep.rows)
    if (r.ratio) ratios_ok &= *r.ratio >= 1.6 && *r.ratio <= 2.4;
  bool ok = report_check(ratios_ok, "lemma1_ratios", "halving ratios within [1.6, 2.4]");
  if (rep.bound_checked)
    ok &= report_check(rep.bound_ok, "lemma1_bound",
                       "divergence <= (T-t0)*L_f_control*M_u + 2*M_f*dt + 1e-8");
  const std::string path = out_path(c.rc, p.name + "_lemma1.csv");
  write_lemma1_csv(path, rep);
  note_artifact(path);
  return ok;
}

bool suite_lemma2(const Ctx& c) {
  const TestCase tc = resolve_problem(c.rc.problem);
  const Problem& p = tc.problem;
  const ControlSignal sig = half_sine_signal(p.control_dim);
  std::vector<std::pair<double, double>> steps;
  for (double h = 0.05; h > 0.004; h *= 0.5) steps.emplace_back(h, h);
  const Lemma2Report rep = lemma2_study(p, sig, steps, probe_states(p));

  bool ratios_ok = true;
  int checked = 0;
  for (const Lemma2Row& r : rep.rows)
    if (r.ratio) {
      ratios_ok &= *r.ratio >= 1.6 && *r.ratio <= 2.4;
      ++checked;
    }
  ratios_ok &= checked >= 3;
  const bool ok =
      report_check(ratios_ok, "lemma2_ratios", "3 halving ratios within [1.6, 2.4] from dt=0.05");
  const std::string path = out_path(c.rc, p.name + "_lemma2.csv");
  write_lemma2_csv(path, rep);
  note_artifact(path);
  return ok;
}

bool suite_discount(const VerifyParams& vp) {
  if (!(vp.lambda > 0)) throw ConfigError("verify discount: need --lambda > 0");
  const double g1 = discount_weight_gap(vp.lambda, TimeGrid::from_dt(0.0, 1.0, 0.1));
  const double g2 = discount_weight_gap(vp.lambda, TimeGrid::from_dt(0.0, 1.0, 0.05));
  const double ratio = g1 / g2;
  char detail[160];
  std::snprintf(detail, sizeof detail, "gap(0.1)=%.6e gap(0.05)=%.6e ratio=%.4f window=[1.7,2.3]",
                g1, g2, ratio);
  return report_check(ratio >= 1.7 && ratio <= 2.3, "discount_gap_ratio", detail);
}

void cmd_verify(Ctx c, std::string suite, VerifyParams vp, const CLI::App* sub) {
  if (auto v = c.kv.get_int("nodes"); v && !flag_given(sub, "--nodes")) vp.nodes = *v;
  if (auto v = c.kv.get_int("nt"); v && !flag_given(sub, "--nt")) vp.nt = *v;
  if (auto v = c.kv.get_double("lambda"); v && !flag_given(sub, "--lambda")) vp.lambda = *v;
  if (auto v = c.kv.get_string("suite"); v && !flag_given(sub, "suite")) suite = *v;
  c.kv.finish();
  const auto start = Clock::now();

  bool ok = true;
  if (suite == "dpp" || suite == "all") ok &= suite_dpp(c, vp);
  if (suite == "lemma1" || suite == "all") ok &= suite_lemma1(c);
  if (suite == "lemma2" || suite == "all") ok &= suite_lemma2(c);
  if (suite == "discount" || suite == "all") ok &= suite_discount(vp);
  if (suite == "theta" || suite == "all") ok &= suite_theta(vp);

  Manifest m;
  const TestCase tc = resolve_problem(c.rc.problem);
  add_run_keys(m, "verify", c.rc, tc);
  m.emplace_back("suite", suite);
  m.emplace_back("nodes", std::to_string(vp.nodes));
  m.emplace_back("nt", std::to_string(vp.nt));
  m.emplace_back("lambda", csv_double(vp.lambda));
  m.emplace_back("result", ok ? "pass" : "fail");
  finish_manifest(m, c.rc, tc.problem.name + "_verify_manifest.txt", start);
  if (!ok) throw VerificationError("verify " + suite + ": at least one check failed");
}

void cmd_simulate(Ctx c) {
  c.kv.finish();
  const auto start = Clock::now();
  const TestCase tc = resolve_problem(c.rc.problem);
  const Problem& p = tc.problem;

  Vec x = c.rc.start;
  if (x.size() == 0) {
    x = Vec(p.dim);
    for (int k = 0; k < p.dim; ++k) x[k] = 0.5 * (p.domain_lower[k] + p.domain_upper[k]);
  }
  if (x.size() != p.dim)
    throw ConfigError("simulate: --x needs " + std::to_string(p.dim) + " components");
  for (int k = 0; k < p.dim; ++k)
    if (!(x[k] >= p.domain_lower[k] && x[k] <= p.domain_upper[k]))
      throw ConfigError("simulate: initial state outside the problem domain");

  Discretization d = discretize(tc, c.rc);
  const SolveResult sol = solve(p, d.grid, d.tg, d.controls, c.rc.boundary);
  const RolloutResult roll = closed_loop_simulate(p, sol.value, sol.policy, x);
  const double v0 = d.grid.interpolate(sol.value.layers[0], x);

  const std::string path = out_path(c.rc, p.name + "_trajectory.csv");
  write_trajectory_csv(path, p, roll.trajectory, d.tg);
  note_artifact(path);

  Manifest m;
  add_run_keys(m, "simulate", c.rc, tc);
  m.emplace_back("dt", csv_double(d.tg.dt()));
  m.emplace_back("dx", csv_double(d.grid.spacing(0)));
  m.emplace_back("x", vec_string(x));
  m.emplace_back("realized_cost", csv_double(roll.realized_cost));
  m.emplace_back("value_at_start", csv_double(v0));
  finish_manifest(m, c.rc, p.name + "_simulate_manifest.txt", start);
  std::printf("simulate %s: x=(%s) realized_cost=%.17g value=%.17g gap=%.3e\n", p.name.c_str(),
              vec_string(x).c_str(), roll.realized_cost, v0, std::abs(roll.realized_cost - v0));
}

void cmd_audit(Ctx c, int samples, const CLI::App* sub) {
  if (auto v = c.kv.get_int("samples"); v && !flag_given(sub, "--samples")) samples = *v;
  c.kv.finish();
  const auto start = Clock::now();
  if (samples < 1) throw ConfigError("audit: need --samples >= 1");
  const TestCase tc = resolve_problem(c.rc.problem);
  const HypothesisEstimates e = hypothesis_audit(tc.problem, samples, c.rc.seed);

  std::printf("m_f = %.17g\n", e.m_f);
  std::printf("l_f_state = %.17g\n", e.l_f_state);
  std::printf("l_f_time = %.17g\n", e.l_f_time);
  std::printf("l_f_control = %.17g\n", e.l_f_control);
  std::printf("m_g = %.17g\n", e.m_g);
  std::printf("l_g_state = %.17g\n", e.l_g_state);
  std::printf("l_g_time = %.17g\n", e.l_g_time);
  std::printf("l_g_control = %.17g\n", e.l_g_control);
  std::printf("m_psi = %.17g\n", e.m_psi);
  std::printf("l_psi = %.17g\n", e.l_psi);

  const std::string path = out_path(c.rc, tc.problem.name + "_audit.csv");
  write_audit_csv(path, e);
  note_artifact(path);

  Manifest m;
  add_run_keys(m, "audit", c.rc, tc);
  m.emplace_back("samples", std::to_string(samples));
  add_audit_keys(m, tc.problem, c.rc.seed);
  finish_manifest(m, c.rc, tc.problem.name + "_audit_manifest.txt", start);
}

int run(int argc, char** argv) {
  CLI::App app{"grid-based dynamic programming for finite-horizon optimal control"};
  app.require_subcommand(1);

  Flags f_solve, f_eoc, f_verify, f_sim, f_audit;

  CLI::App* solve_cmd = app.add_subcommand("solve", "solve one instance, write value/policy CSVs");
  add_shared(solve_cmd, f_solve);

  CLI::App* eoc_cmd = app.add_subcommand("eoc", "refinement ladder with chained EOC table");
  add_shared(eoc_cmd, f_eoc);
  eoc_cmd->add_option("--base", f_eoc.base, "coarsest step (dt = dx)");
  eoc_cmd->add_option("--levels", f_eoc.levels, "halving levels (>= 2)");

  CLI::App* verify_cmd = app.add_subcommand("verify", "structural checks with PASS/FAIL lines");
  add_shared(verify_cmd, f_verify);
  std::string suite = "all";
  VerifyParams vp;
  verify_cmd->add_option("suite", suite, "dpp | theta | lemma1 | lemma2 | discount | all")
      ->check(CLI::IsMember({"dpp", "theta", "lemma1", "lemma2", "discount", "all"}));
  verify_cmd->add_option("--nodes", vp.nodes, "grid nodes per axis (dpp)");
  verify_cmd->add_option("--nt", vp.nt, "time steps (dpp)");
  verify_cmd->add_option("--lambda", vp.lambda, "discount rate (theta, discount)");

  CLI::App* sim_cmd = app.add_subcommand("simulate", "closed-loop rollout of the feedback policy");
  add_shared(sim_cmd, f_sim);
  sim_cmd->add_option("--x", f_sim.x, "initial state, comma-separated");

  CLI::App* audit_cmd = app.add_subcommand("audit", "estimate hypothesis constants by sampling");
  add_shared(audit_cmd, f_audit);
  int samples = 100000;
  audit_cmd->add_option("--samples", samples, "random samples");

  solve_cmd->callback([&] { cmd_solve(make_ctx(solve_cmd, f_solve)); });
  eoc_cmd->callback([&] { cmd_eoc(make_ctx(eoc_cmd, f_eoc)); });
  verify_cmd->callback(
      [&] { cmd_verify(make_ctx(verify_cmd, f_verify), suite, vp, verify_cmd); });
  sim_cmd->callback([&] { cmd_simulate(make_ctx(sim_cmd, f_sim)); });
  audit_cmd->callback([&] { cmd_audit(make_ctx(audit_cmd, f_audit), samples, audit_cmd); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const semilag::ConfigError& e) {  // includes BudgetError
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const semilag::PreconditionError& e) {  // includes DomainError
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const semilag::VerificationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << "\n";
    return 1;
  }
}
