#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "kmn/solutions.hpp"
#include "kmn/solver.hpp"

using namespace kmn;
using namespace kmn::solver;
using kmn::solutions::ClosedForm;

namespace {

TravelingWaveParams wave(double k, double omega, double a = 0.0) { return {k, omega, 0.0, 0.0, a, 1}; }

double max_abs_diff(const Field& a, const Field& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

double max_abs(const Field& a) {
  double e = 0.0;
  for (double v : a.values()) e = std::max(e, std::abs(v));
  return e;
}

// Peak position from the largest sample and a parabola through its neighbours.
double peak(const Field& u) {
  std::size_t k = 0;
  for (std::size_t i = 1; i < u.size(); ++i)
    if (u[i] > u[k]) k = i;
  const double l = u[(k + u.size() - 1) % u.size()], c = u[k], r = u[(k + 1) % u.size()];
  return u.grid().node(k) + 0.5 * u.grid().dx() * (l - r) / (l - 2 * c + r);
}

// Sine33 sampled on one period, advanced with a fixed step, error at t_end.
double sine33_error(std::size_t n, double t_end) {
  const auto s = ClosedForm::sine33(wave(1.0, 2.0 / 3.0));
  const auto g = Grid1D::periodic(0.0, 6.0 * M_PI, n);
  const auto u0 = Field::sample(g, [&](double x) { return s.eval(x, 0.0); });
  SolverConfig cfg;
  cfg.t_end = t_end;
  cfg.dt = 0.05 * std::pow(g.dx(), 3);
  cfg.record_every = 1 << 30;
  const auto tr = simulate(u0, s.equation(), cfg);
  const auto exact = Field::sample(g, [&](double x) { return s.eval(x, t_end); });
  return max_abs_diff(tr.snapshots.back(), exact);
}

}  // namespace

TEST_CASE("central differences of a sine") {
  const double L = 3.0;
  const double xi = 2.0 * M_PI / L;
  for (int order : {2, 4}) {
    double prev1 = 0.0, prev3 = 0.0;
    for (std::size_t n : {32u, 64u}) {
      const auto g = Grid1D::periodic(0.0, L, n);
      const auto u = Field::sample(g, [&](double x) { return std::sin(xi * x); });
      const Field u1 = d1(u, order), u3 = d3(u, order);
      double e1 = 0.0, e3 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double c = std::cos(xi * g.node(i));
        e1 = std::max(e1, std::abs(u1[i] - xi * c));
        e3 = std::max(e3, std::abs(u3[i] + xi * xi * xi * c));
      }
      if (n == 64) {
        CAPTURE(order);
        CHECK(std::log2(prev1 / e1) == doctest::Approx(order).epsilon(0.05));
        CHECK(std::log2(prev3 / e3) == doctest::Approx(order).epsilon(0.05));
      }
      prev1 = e1;
      prev3 = e3;
    }
    const Field c(Grid1D::periodic(0.0, L, 16), std::vector<double>(16, -1.25));
    const Field c1 = d1(c, order), c3 = d3(c, order);
    for (double v : c1.values()) CHECK(v == 0.0);
    for (double v : c3.values()) CHECK(v == 0.0);
  }
  CHECK_THROWS_AS(CentralDifferences(6), DomainError);
}

TEST_CASE("solver config validation and auto step") {
  SolverConfig cfg;
  CHECK_NOTHROW(validate(cfg));
  cfg.dt = -0.1;
  CHECK_THROWS_AS(validate(cfg), DomainError);
  cfg = {};
  cfg.record_every = 0;
  CHECK_THROWS_AS(validate(cfg), DomainError);
  cfg = {};
  cfg.derivative_order = 3;
  CHECK_THROWS_AS(validate(cfg), DomainError);
  cfg = {};
  cfg.cfl_limit = 0.0;
  CHECK_THROWS_AS(validate(cfg), DomainError);

  const auto g = Grid1D::periodic(0.0, 1.0, 10);
  const Field u(g, std::vector<double>(10, 2.0));
  CHECK(auto_dt(u, {2, 2, 1, 1}, 0.1) == doctest::Approx(0.1 * 1e-3 / (2 * 2.0)));
  CHECK(auto_dt(u, {2, 3, 1, 1}, 0.1) == doctest::Approx(0.1 * 1e-3 / (3 * 4.0)));
  CHECK(auto_dt(u, {3, 1, 1, 0}, 0.1) == doctest::Approx(0.1 * 0.1 / (3 * 4.0)));
  // A zero field still yields a finite step.
  const double dt0 = auto_dt(Field(g, std::vector<double>(10, 0.0)), {2, 2, 1, 1}, 0.1);
  CHECK(std::isfinite(dt0));
  CHECK(dt0 > 0.0);
}

TEST_CASE("constant fields are fixed points of RK4") {
  const auto g = Grid1D::periodic(0.0, 2.0, 32);
  const Field u(g, std::vector<double>(32, 0.8), 1.0);
  const Field v = step_rk4(u, 1e-3, {2, 2, 1, 1});
  CHECK(v.time() == doctest::Approx(1.001));
  for (double x : v.values()) CHECK(x == 0.8);
}

TEST_CASE("linear mode follows the semi-discrete dispersion relation") {
  // For u = sin(xi x) the stencils give d1 u = s1 cos, d3 u = -s3 cos, so the
  // semi-discrete solution is sin(xi x - (kappa s1 - delta s3) t).
  const double L = 2.0 * M_PI;
  const std::size_t n = 64;
  const auto g = Grid1D::periodic(0.0, L, n);
  const double kappa = 1.3, delta = 0.6;
  for (int mode : {1, 3}) {
    const double xi = mode * 2.0 * M_PI / L;
    const auto u0 = Field::sample(g, [&](double x) { return std::sin(xi * x); });
    const double s1 = d1(u0, 4)[0];
    const double s3 = -d3(u0, 4)[0];
    const double omega = kappa * s1 - delta * s3;
    CHECK(omega == doctest::Approx(kappa * xi - delta * xi * xi * xi).epsilon(1e-2));
    SolverConfig cfg;
    cfg.t_end = 0.5;
    cfg.dt = 1e-4;
    cfg.record_every = 100000;
    const auto tr = simulate(u0, {1, 1, kappa, delta}, cfg);
    const auto exact = Field::sample(g, [&](double x) { return std::sin(xi * x - omega * 0.5); });
    CAPTURE(mode);
    CHECK(max_abs_diff(tr.snapshots.back(), exact) < 1e-9);
  }
}

TEST_CASE("compacton peak travels at omega / k") {
  const auto c = ClosedForm::compacton22(wave(1.0, 1.0));
  const auto g = Grid1D::periodic(-4.0 * M_PI, 8.0 * M_PI, 256);
  const auto u0 = Field::sample(g, [&](double x) { return c.eval(x, 0.0); });
  SolverConfig cfg;
  cfg.t_end = 1.0;
  cfg.cfl_limit = 0.25;
  cfg.record_every = 1 << 30;
  const auto tr = simulate(u0, {2, 2, 1, 1}, cfg);
  CHECK(std::abs(peak(tr.snapshots.back()) - peak(u0) - 1.0) < 2.0 * g.dx());
  const auto& m0 = tr.conserved.front();
  const auto& m1 = tr.conserved.back();
  CHECK(std::abs(m1.mass - m0.mass) / m0.mass < 1e-12);
  CHECK(std::abs(m1.l2 - m0.l2) / m0.l2 < 1e-3);
}

TEST_CASE("simulate records snapshots and conserved series") {
  const auto g = Grid1D::periodic(0.0, 2.0 * M_PI, 32);
  SolverConfig cfg;
  cfg.t_end = 0.01;
  cfg.dt = 3e-4;
  cfg.record_every = 10;

  const auto zero = simulate(Field(g, std::vector<double>(32, 0.0)), {2, 2, 1, 1}, cfg);
  for (const auto& s : zero.snapshots)
    for (double v : s.values()) CHECK(v == 0.0);

  const auto u0 = Field::sample(g, [](double x) { return std::sin(x) + 0.5 * std::cos(2 * x); });
  const auto tr = simulate(u0, {1, 1, 1, 1}, cfg);
  CHECK(tr.steps == 34);
  REQUIRE(tr.snapshots.size() == tr.conserved.size());
  CHECK(tr.snapshots.front().time() == 0.0);
  CHECK(tr.snapshots.back().time() == doctest::Approx(0.01).epsilon(1e-14));
  for (std::size_t i = 1; i < tr.snapshots.size(); ++i)
    CHECK(tr.snapshots[i].time() > tr.snapshots[i - 1].time());
  for (const auto& q : tr.conserved) {
    CHECK(std::abs(q.mass) < 1e-13);
    REQUIRE(q.energy.has_value());
  }

  // n != 1 carries no energy column.
  const auto tr2 = simulate(u0, {2, 2, 1, 1}, cfg);
  CHECK_FALSE(tr2.conserved.back().energy.has_value());
}

TEST_CASE("mass is conserved to round-off for nonlinear exponents") {
  const auto g = Grid1D::periodic(0.0, 2.0 * M_PI, 64);
  const auto u0 = Field::sample(g, [](double x) { return 1.2 + 0.3 * std::sin(x); });
  SolverConfig cfg;
  cfg.t_end = 0.05;
  for (const KmnParams& p : {KmnParams{2, 2, 1, 1}, KmnParams{3, 2, 1, 1}, KmnParams{1.5, 2.5, 1, 0.5}}) {
    const auto tr = simulate(u0, p, cfg);
    const double m0 = tr.conserved.front().mass;
    for (const auto& q : tr.conserved) CHECK(std::abs(q.mass - m0) < 1e-12 * m0);
  }
}

TEST_CASE("halving dx on the (3,3) sine reduces the error by at least 12") {
  const double e1 = sine33_error(64, 0.5);
  const double e2 = sine33_error(128, 0.5);
  CAPTURE(e1);
  CAPTURE(e2);
  CHECK(e1 / e2 >= 12.0);
}

TEST_CASE("forward then backward step returns the initial field") {
  const auto g = Grid1D::periodic(0.0, 2.0 * M_PI, 64);
  const auto u0 = Field::sample(g, [](double x) { return 1.0 + 0.5 * std::sin(x); });
  const KmnParams p{2, 2, 1, 1};
  const double dt = 1e-6;
  const Field back = step_rk4(step_rk4(u0, dt, p), -dt, p);
  CHECK(max_abs_diff(back, u0) <= 10.0 * std::numeric_limits<double>::epsilon() * max_abs(u0));
  CHECK(back.time() == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
}

TEST_CASE("blow-up is reported with the step index") {
  const auto g = Grid1D::periodic(0.0, 2.0 * M_PI, 16);
  const auto u0 = Field::sample(g, [](double x) { return 3.0 + std::sin(x); });
  try {
    step_rk4(u0, 1e300, {2, 2, 1, 1}, 4, 17);
    FAIL("expected BlowUpError");
  } catch (const BlowUpError& e) {
    CHECK(e.step() == 17);
    CHECK(e.code() == "blow-up");
  }

  SolverConfig cfg;
  cfg.dt = 0.5;
  cfg.t_end = 1e4;
  cfg.record_every = 1;
  try {
    simulate(u0, {2, 2, 1, 1}, cfg);
    FAIL("expected SimulationBlowUp");
  } catch (const SimulationBlowUp& e) {
    CHECK(e.step() >= 0);
    CHECK_FALSE(e.partial().snapshots.empty());
    for (double v : e.last_finite().values()) CHECK(std::isfinite(v));
    CHECK(e.last_finite().time() == doctest::Approx(0.5 * e.step()));
  }
}
