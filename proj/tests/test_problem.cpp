#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "semilag/error.hpp"
#include "semilag/grid.hpp"
#include "semilag/problem.hpp"
#include "semilag/time_grid.hpp"

using namespace semilag;

namespace {
constexpr double kPi = 3.14159265358979323846;

// Closed form of p' = p + p^2, p(1) = 1: p(t) = e^(t-1) / (2 - e^(t-1)).
double riccati_closed_form(double t) {
  const double w = std::exp(t - 1.0);
  return w / (2.0 - w);
}
}  // namespace

TEST_CASE("riccati table matches the closed form") {
  const RiccatiTable table(0.0, 1.0, 1.0);
  // Endpoint lookup goes through the Hermite cell evaluation, so it is only
  // accurate to rounding, not bitwise.
  REQUIRE(std::abs(table(1.0) - 1.0) <= 1e-12);
  REQUIRE(std::abs(table(0.0) - riccati_closed_form(0.0)) <= 1e-13);
  REQUIRE(std::abs(table(0.0) - 0.22539967356056387) <= 1e-13);
  for (double t : {0.1, 0.25, 0.5, 0.7321, 0.9}) {
    REQUIRE(std::abs(table(t) - riccati_closed_form(t)) <= 1e-12);
  }
  // The solution grows toward the terminal condition.
  REQUIRE(table(0.2) < table(0.8));
}

TEST_CASE("test1 definition and exact solution") {
  const TestCase tc = make_test1();
  const Problem& p = tc.problem;
  REQUIRE(p.name == "test1");
  REQUIRE(p.dim == 1);
  REQUIRE(p.control_dim == 1);
  REQUIRE(p.discount == 1.0);
  REQUIRE(p.domain_lower == Vec{-1.0});
  REQUIRE(p.domain_upper == Vec{1.0});

  REQUIRE(p.dynamics({0.3}, 0.0, {-0.7}) == Vec{-0.7});
  REQUIRE(p.running_cost({0.3}, 0.0, {-0.7}) == 0.5 * -0.7 * -0.7);
  REQUIRE(p.terminal_cost({-0.6}) == 0.5 * 0.36);

  // v(x,t) = p(t) x^2 / 2 with the Riccati closed form, u* = -p(t) x.
  for (double t : {0.0, 0.5, 1.0}) {
    for (double x : {-1.0, -0.3, 0.0, 0.8}) {
      const double want = 0.5 * riccati_closed_form(t) * x * x;
      REQUIRE(std::abs(tc.exact.value({x}, t) - want) <= 1e-12);
      REQUIRE(std::abs(tc.exact.optimal_control({x}, t)[0] + riccati_closed_form(t) * x) <=
              1e-12);
    }
  }
  REQUIRE(std::abs(tc.exact.value({1.0}, 1.0) - 0.5) <= 1e-12);

  // No padding: the solve box defaults to the domain.
  REQUIRE(tc.solve_lower.size() == 0);
  REQUIRE(tc.effective_solve_lower() == p.domain_lower);
  REQUIRE(tc.effective_solve_upper() == p.domain_upper);
}

TEST_CASE("test2 definition and exact solution") {
  const TestCase tc = make_test2();
  const Problem& p = tc.problem;
  REQUIRE(p.name == "test2");
  REQUIRE(p.dim == 2);
  REQUIRE(p.control_dim == 1);
  REQUIRE(p.discount == 0.0);

  REQUIRE(p.dynamics({0.5, -0.2}, 0.0, {1.0}) == Vec{1.0, 0.25});
  REQUIRE(p.running_cost({0.5, -0.2}, 0.0, {1.0}) == 0.0);
  REQUIRE(p.terminal_cost({0.5, -0.2}) == 0.2);

  // v(x,t) = -x2 - x1^2 r - r^3/3 - |x1| r^2 with r = 1 - t.
  REQUIRE(std::abs(tc.exact.value({0.5, 0.0}, 0.0) - (-0.25 - 1.0 / 3.0 - 0.5)) <= 1e-15);
  REQUIRE(tc.exact.value({0.3, 0.7}, 1.0) == -0.7);
  const double r = 0.5;
  REQUIRE(std::abs(tc.exact.value({-0.4, 0.1}, 0.5) -
                   (-0.1 - 0.16 * r - r * r * r / 3.0 - 0.4 * r * r)) <= 1e-15);

  // Pushing |x1| outward is optimal.
  REQUIRE(tc.exact.optimal_control({0.4, 0.0}, 0.2) == Vec{1.0});
  REQUIRE(tc.exact.optimal_control({-0.4, 0.0}, 0.2) == Vec{-1.0});

  // Padded solve box covering the reachable tube, node-aligned with every
  // ladder step (multiples of 0.1 down to 0.00625 after halving).
  REQUIRE(tc.solve_lower == Vec{-2.0, -1.0});
  REQUIRE(tc.solve_upper == Vec{2.0, 3.4});
}

TEST_CASE("planar equivalence instance has nodal feet on a 3x3 mesh") {
  const Problem p = make_dpp_2d();
  REQUIRE(p.dim == 2);
  REQUIRE(p.discount == 1.0);

  // Speed vanishes on the boundary ring and is 2 at the center.
  REQUIRE(p.dynamics({1.0, 0.3}, 0.0, {1.0}) == Vec{0.0, 0.0});
  REQUIRE(p.dynamics({0.0, 0.0}, 0.0, {1.0}) == Vec{2.0, -2.0});
  REQUIRE(p.dynamics({0.0, 0.0}, 0.0, {-1.0}) == Vec{-2.0, 2.0});

  // With dt = 1/2 every Euler foot from a 3x3 node lands on a node.
  const TimeGrid tg(0.0, 1.0, 2);
  const Grid grid({-1.0, -1.0}, {1.0, 1.0}, {3, 3});
  const ControlGrid controls = sample_control_grid(p, 2);
  for (std::size_t i = 0; i < grid.node_count(); ++i) {
    for (const Vec& u : controls.points) {
      const Vec foot = axpy(grid.node(i), tg.dt(), p.dynamics(grid.node(i), 0.0, u));
      REQUIRE(grid.contains(foot));
      for (int k = 0; k < 2; ++k) {
        const double s = (foot[k] + 1.0) / grid.spacing(k);
        REQUIRE(std::abs(s - std::round(s)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("control grid sampling") {
  const Problem p1 = make_test1().problem;

  SECTION("endpoints included, uniform spacing") {
    const ControlGrid cg = sample_control_grid(p1, 3);
    REQUIRE(cg.points.size() == 3);
    REQUIRE(cg.points[0] == Vec{-1.0});
    REQUIRE(cg.points[1] == Vec{0.0});
    REQUIRE(cg.points[2] == Vec{1.0});
  }
  SECTION("a single point is the midpoint") {
    const ControlGrid cg = sample_control_grid(p1, 1);
    REQUIRE(cg.points.size() == 1);
    REQUIRE(cg.points[0] == Vec{0.0});
  }
  SECTION("axis 0 varies fastest in the flattened order") {
    Problem p = p1;
    p.control_dim = 2;
    p.control_lower = {0.0, 0.0};
    p.control_upper = {1.0, 1.0};
    const ControlGrid cg = sample_control_grid(p, {2, 3});
    REQUIRE(cg.points.size() == 6);
    REQUIRE(cg.points[0] == Vec{0.0, 0.0});
    REQUIRE(cg.points[1] == Vec{1.0, 0.0});
    REQUIRE(cg.points[2] == Vec{0.0, 0.5});
    REQUIRE(cg.points[5] == Vec{1.0, 1.0});
  }
  REQUIRE_THROWS_AS(sample_control_grid(p1, {2, 2}), ConfigError);
  REQUIRE_THROWS_AS(sample_control_grid(p1, 0), ConfigError);
}

TEST_CASE("signal sampling and oscillation") {
  ControlSignal sig;
  sig.eval = [](double s) { return Vec{0.5 * std::sin(2.0 * kPi * s)}; };
  const TimeGrid tg(0.0, 1.0, 10);

  const ControlSequence seq = sample_signal(sig, tg);
  REQUIRE(seq.samples.size() == 10);
  REQUIRE(seq.samples[0] == Vec{0.0});
  REQUIRE(std::abs(seq.samples[2][0] - 0.5 * std::sin(0.4 * kPi)) <= 1e-15);

  // The one-step oscillation of the half-sine peaks where the slope is
  // largest: sup over [0.4, 0.5) of |u(0.4) - u(s)| -> sin(0.8 pi)/2.
  const double m_u = control_oscillation(sig, tg);
  REQUIRE(std::abs(m_u - 0.5 * std::sin(0.8 * kPi)) <= 1e-6);

  // A piecewise-constant sequence has zero oscillation against itself only
  // with aligned sampling; against a halved grid it sees the jumps.
  REQUIRE_THROWS_AS(control_oscillation(sig, tg, 0), ConfigError);
}

TEST_CASE("hypothesis audit on test1 finds the structural constants") {
  const Problem p = make_test1().problem;
  const HypothesisEstimates e = hypothesis_audit(p, 20000, 777);

  // f = u does not depend on state or time; quotients vanish identically.
  REQUIRE(e.l_f_state == 0.0);
  REQUIRE(e.l_f_time == 0.0);
  REQUIRE(e.l_g_state == 0.0);
  REQUIRE(e.l_g_time == 0.0);
  // f = u has unit control slope, realized exactly by every quotient.
  REQUIRE(e.l_f_control == 1.0);

  // Sampled sup norms approach the analytic values from below.
  REQUIRE(e.m_f <= 1.0);
  REQUIRE(e.m_f >= 0.999);
  REQUIRE(e.m_g <= 0.5);
  REQUIRE(e.m_g >= 0.499);
  REQUIRE(e.m_psi <= 0.5);
  REQUIRE(e.m_psi >= 0.499);
  REQUIRE(e.l_g_control <= 1.0 + 1e-12);
  REQUIRE(e.l_g_control >= 0.999);
  REQUIRE(e.l_psi <= 1.0 + 1e-12);
  REQUIRE(e.l_psi >= 0.999);
}

TEST_CASE("hypothesis audit on test2 is deterministic") {
  const Problem p = make_test2().problem;
  const HypothesisEstimates a = hypothesis_audit(p);
  const HypothesisEstimates b = hypothesis_audit(p);

  // Same seed, same estimates, bit for bit.
  REQUIRE(a.m_f == b.m_f);
  REQUIRE(a.l_f_state == b.l_f_state);
  REQUIRE(a.m_psi == b.m_psi);

  // Structural values under the default budget and seed.
  REQUIRE(a.l_f_time == 0.0);
  REQUIRE(a.l_f_control == 1.0);  // f1 = u
  REQUIRE(a.m_g == 0.0);
  REQUIRE(a.l_g_state == 0.0);
  REQUIRE(a.l_psi == 1.0);        // psi = -x2
  REQUIRE(a.m_f >= 0.9999);       // sup max(|u|, x1^2) = 1
  REQUIRE(a.m_f <= 1.0);
  REQUIRE(a.l_f_state >= 1.999);  // d(x1^2)/dx1 reaches 2 at the faces
  REQUIRE(a.l_f_state <= 2.0);
  REQUIRE(a.m_psi >= 0.9999);
  REQUIRE(a.m_psi <= 1.0);

  REQUIRE_THROWS_AS(hypothesis_audit(p, 0), ConfigError);
  Problem broken = p;
  broken.dynamics = nullptr;
  REQUIRE_THROWS_AS(hypothesis_audit(broken), ConfigError);
}
