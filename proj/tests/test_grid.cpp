#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstddef>
#include <vector>

#include "semilag/error.hpp"
#include "semilag/grid.hpp"
#include "semilag/random.hpp"
#include "semilag/vec.hpp"

using namespace semilag;

namespace {

Vec random_point(const Grid& g, Rng& rng, double margin = 0.0) {
  Vec p(g.dim());
  for (int k = 0; k < g.dim(); ++k)
    p[k] = rng.uniform(g.lower(k) - margin, g.upper(k) + margin);
  return p;
}

std::vector<double> random_values(std::size_t n, Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

}  // namespace

TEST_CASE("grid construction and geometry") {
  const Grid g({-1.0, 0.0}, {1.0, 2.0}, {21, 5});
  REQUIRE(g.dim() == 2);
  REQUIRE(g.count(0) == 21);
  REQUIRE(g.count(1) == 5);
  REQUIRE(g.node_count() == 21u * 5u);
  REQUIRE(g.spacing(0) == 0.1);
  REQUIRE(g.spacing(1) == 0.5);

  // Extreme nodes are the box corners exactly.
  REQUIRE(g.node(0) == Vec{-1.0, 0.0});
  REQUIRE(g.node(g.node_count() - 1) == Vec{1.0, 2.0});

  // Linear index <-> multi-index round trip covers every node.
  for (std::size_t i = 0; i < g.node_count(); ++i)
    REQUIRE(g.node_index(g.node_multi(i)) == i);

  REQUIRE_THROWS_AS(Grid({0.0}, {0.0}, {3}), ConfigError);
  REQUIRE_THROWS_AS(Grid({0.0}, {1.0}, {1}), ConfigError);
  REQUIRE_THROWS_AS(Grid({0.0, 0.0}, {1.0}, {3, 3}), ConfigError);
}

TEST_CASE("build_grid honors the target spacing") {
  // Exact division keeps the requested spacing.
  const Grid a = build_grid({-1.0}, {1.0}, 0.1);
  REQUIRE(a.count(0) == 21);
  REQUIRE(a.spacing(0) == 0.1);

  // Non-divisors round the cell count up, so the spacing only shrinks.
  const Grid b = build_grid({-1.0}, {1.0}, 0.13);
  REQUIRE(b.count(0) == 17);
  REQUIRE(b.spacing(0) == 0.125);
  REQUIRE(b.spacing(0) <= 0.13);

  // Near-exact division (within relative 1e-9) is treated as exact.
  const Grid c = build_grid({-1.0}, {1.0}, (2.0 / 20.0) * (1.0 + 1e-12));
  REQUIRE(c.count(0) == 21);

  REQUIRE_THROWS_AS(build_grid({0.0}, {1.0}, 0.0), ConfigError);
  REQUIRE_THROWS_AS(build_grid({0.0}, {1.0}, -0.5), ConfigError);
}

TEST_CASE("containment, clamping and exit distance") {
  const Grid g({-1.0, -1.0}, {1.0, 1.0}, {5, 5});
  REQUIRE(g.contains({0.3, -0.9}));
  REQUIRE(!g.contains({1.2, 0.0}));
  REQUIRE(g.clamp({1.2, -3.0}) == Vec{1.0, -1.0});
  REQUIRE(g.exit_distance({0.5, 0.5}) == 0.0);
  REQUIRE(g.exit_distance({1.5, 0.0}) == 0.5);
  REQUIRE(g.exit_distance({1.25, -1.75}) == 0.75);
}

TEST_CASE("cell location") {
  const Grid g({-1.0}, {1.0}, {21});

  SECTION("interior point") {
    const CellLocation c = g.locate({0.37});
    REQUIRE(c.cell[0] == 13);
    REQUIRE(std::abs(c.local[0] - 0.7) < 1e-12);
  }
  SECTION("upper face belongs to the last cell") {
    const CellLocation c = g.locate({1.0});
    REQUIRE(c.cell[0] == 19);
    REQUIRE(c.local[0] == 1.0);
  }
  SECTION("snapped location absorbs rounding fuzz at nodes") {
    const CellLocation c = g.locate_snapped({0.1 + 3e-13});
    REQUIRE(c.cell[0] == 11);
    REQUIRE(c.local[0] == 0.0);
  }
}

TEST_CASE("interpolation reproduces nodal data exactly") {
  const Grid g({-1.0, -1.0}, {1.0, 1.0}, {9, 9});
  Rng rng(42);
  const std::vector<double> v = random_values(g.node_count(), rng);
  for (std::size_t i = 0; i < g.node_count(); ++i)
    REQUIRE(g.interpolate(v, g.node(i)) == v[i]);
}

TEST_CASE("interpolation reproduces affine functions to 1e-13 relative") {
  const Grid g({-1.0, 0.0, -0.5}, {1.0, 2.0, 0.5}, {5, 4, 3});
  const auto f = [](const Vec& p) { return 0.7 * p[0] - 1.3 * p[1] + 0.25 * p[2] + 0.9; };

  std::vector<double> v(g.node_count());
  double scale = 1.0;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    v[i] = f(g.node(i));
    scale = std::max(scale, std::abs(v[i]));
  }

  Rng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec p = random_point(g, rng);
    REQUIRE(std::abs(g.interpolate(v, p) - f(p)) <= 1e-13 * scale);
  }
}

TEST_CASE("interpolation is monotone in the nodal data") {
  const Grid g({-1.0, -1.0}, {1.0, 1.0}, {6, 5});
  Rng rng(2026);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::vector<double> lo = random_values(g.node_count(), rng);
    std::vector<double> hi = lo;
    for (double& x : hi) x += rng.uniform(0.0, 0.5);
    // Clamped queries slightly outside the box are part of the contract.
    const Vec p = g.clamp(random_point(g, rng, 0.25));
    REQUIRE(g.interpolate(hi, p) >= g.interpolate(lo, p));
  }
}

TEST_CASE("interpolation is non-expansive in the sup norm") {
  const Grid g({-1.0, -1.0}, {1.0, 1.0}, {6, 5});
  Rng rng(313);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::vector<double> v = random_values(g.node_count(), rng);
    std::vector<double> w = v;
    double dist = 0.0;
    for (double& x : w) {
      const double d = rng.uniform(-0.5, 0.5);
      x += d;
      dist = std::max(dist, std::abs(d));
    }
    const Vec p = g.clamp(random_point(g, rng, 0.25));
    const double gap = std::abs(g.interpolate(v, p) - g.interpolate(w, p));
    REQUIRE(gap <= dist + 1e-12 * (1.0 + dist));
  }
}

TEST_CASE("boundary policies") {
  const Grid g({-1.0}, {1.0}, {21});
  std::vector<double> v(g.node_count());
  for (std::size_t i = 0; i < g.node_count(); ++i) v[i] = 3.0 * g.node(i)[0] + 1.0;

  SECTION("clamp projects onto the box") {
    REQUIRE(g.interpolate(v, {1.5}, BoundaryPolicy::kClamp) == g.interpolate(v, {1.0}));
    REQUIRE(g.interpolate(v, {-7.0}, BoundaryPolicy::kClamp) == g.interpolate(v, {-1.0}));
  }
  SECTION("error rejects outside queries, accepts the closure") {
    REQUIRE_THROWS_AS(g.interpolate(v, {1.0 + 1e-6}, BoundaryPolicy::kError), DomainError);
    REQUIRE_NOTHROW(g.interpolate(v, {1.0}, BoundaryPolicy::kError));
  }
  SECTION("extrapolate extends affine data") {
    REQUIRE(std::abs(g.interpolate(v, {1.5}, BoundaryPolicy::kExtrapolate) - 5.5) <= 1e-12);
    REQUIRE(std::abs(g.interpolate(v, {-1.25}, BoundaryPolicy::kExtrapolate) + 2.75) <= 1e-12);
  }
}

TEST_CASE("interpolation input validation") {
  const Grid g({-1.0}, {1.0}, {5});
  const std::vector<double> v(g.node_count(), 0.0);
  const std::vector<double> short_v(3, 0.0);
  REQUIRE_THROWS_AS(g.interpolate(short_v, {0.0}), ConfigError);
  REQUIRE_THROWS_AS(g.interpolate(v, {0.0, 0.0}), ConfigError);
  REQUIRE_THROWS_AS(g.interpolate(v, {std::nan("")}), PreconditionError);
}

TEST_CASE("nodal field wraps sampling and interpolation") {
  const Grid g({0.0, 0.0}, {1.0, 1.0}, {3, 3});
  const NodalField f = NodalField::sample(g, [](const Vec& p) { return p[0] + 2.0 * p[1]; });
  REQUIRE(f[4] == 1.5);  // center node (0.5, 0.5)
  REQUIRE(std::abs(interpolate(f, {0.25, 0.75}) - 1.75) <= 1e-13);
}
