#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "kmn/errors.hpp"
#include "kmn/solutions.hpp"
#include "kmn/stencil.hpp"
#include "kmn/waves.hpp"

using namespace kmn::solutions;
using kmn::TravelingWaveParams;

namespace {

using Points = std::vector<std::pair<double, double>>;

TravelingWaveParams wave(double k, double omega, double a = 0.0, int eps = 1) {
  return {k, omega, 0.0, 0.0, a, eps};
}

// Random (x, t) whose phase psi stays in [lo, hi].
Points phase_points(const ClosedForm& s, double lo, double hi, int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(lo, hi);
  std::uniform_real_distribution<double> time(-1.0, 1.0);
  const auto& w = s.wave();
  Points pts;
  for (int i = 0; i < count; ++i) {
    const double t = time(rng);
    const double y = (phase(rng) - w.a) / w.epsilon;
    pts.emplace_back((y + w.omega * t) / w.k, t);
  }
  return pts;
}

std::vector<ClosedForm> traveling_catalog() {
  return {ClosedForm::sine_shift22(wave(0.8, 1.3, 0.2)),
          ClosedForm::sine_shift22(wave(1.1, 0.7, -0.4, -1)),
          ClosedForm::compacton22(wave(1.0, 3.0)),
          ClosedForm::compacton22(wave(0.6, 1.4, 0.5, -1)),
          ClosedForm::parabola_cap32(wave(1.0, 4.0, 0.3)),
          ClosedForm::parabola_cap32(wave(1.7, 0.9, 0.0, -1)),
          ClosedForm::sn23(wave(0.9, 1.2, 0.1)),
          ClosedForm::sn23(wave(1.3, 2.5, -0.7, -1)),
          ClosedForm::sine33(wave(1.0, 2.0 / 3.0)),
          ClosedForm::sine33(wave(0.7, 1.9, 1.1, -1)),
          ClosedForm::implicit_log13(wave(1.0, 1.0, -2.0)),
          ClosedForm::implicit_log13(wave(1.2, 0.8, -3.0, -1)),
          ClosedForm::sech_n1(1.5, wave(1.0, 1.0)),
          ClosedForm::sech_n1(2.0, wave(0.9, 1.3, 0.4)),
          ClosedForm::sech_n1(3.0, wave(1.1, 0.7, 0.0, -1)),
          ClosedForm::sech_n1(5.0, wave(1.0, 2.0, -0.3))};
}

// Phase window where every catalog member is defined and away from edges.
std::pair<double, double> admissible_phase(const ClosedForm& s) {
  const auto& w = s.wave();
  switch (s.kind()) {
    case SolutionKind::Compacton22: return {-1.95 * M_PI * w.k, 1.95 * M_PI * w.k};
    case SolutionKind::ImplicitLog13: return {-w.a - 20.0, -w.a + 20.0};
    default: return {-6.0, 6.0};
  }
}

// Points for the implicit branch are drawn in epsilon*y - a, which must stay
// above the minimum of its left side.
Points admissible_points(const ClosedForm& s, int count, unsigned seed) {
  if (s.kind() != SolutionKind::ImplicitLog13) {
    const auto [lo, hi] = admissible_phase(s);
    return phase_points(s, lo, hi, count, seed);
  }
  const auto& w = s.wave();
  const double A = w.omega / (w.k * w.k * w.k);
  const double floor = implicit_log_lhs(std::sqrt(2.0 * w.k * w.k * A), w);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> rel(floor + 1e-3, floor + 8.0);
  std::uniform_real_distribution<double> time(-1.0, 1.0);
  Points pts;
  for (int i = 0; i < count; ++i) {
    const double t = time(rng);
    const double y = (rel(rng) + w.a) / w.epsilon;
    pts.emplace_back((y + w.omega * t) / w.k, t);
  }
  return pts;
}

}  // namespace

TEST_CASE("catalog members record the equation they solve") {
  CHECK(ClosedForm::sine_shift22(wave(1, 1)).equation().m == 2.0);
  CHECK(ClosedForm::compacton22(wave(1, 1)).equation().n == 2.0);
  const auto p = ClosedForm::parabola_cap32(wave(1, 1)).equation();
  CHECK((p.m == 2.0 && p.n == 3.0));
  const auto s = ClosedForm::sn23(wave(1, 1)).equation();
  CHECK((s.m == 3.0 && s.n == 2.0));
  const auto q = ClosedForm::sine33(wave(1, 1)).equation();
  CHECK((q.m == 3.0 && q.n == 3.0));
  const auto r = ClosedForm::sin_squared_m1({}).equation();
  CHECK((r.m == 1.0 && r.n == 1.0));
  const auto l = ClosedForm::implicit_log13(wave(1, 1)).equation();
  CHECK((l.m == 3.0 && l.n == 1.0));
  CHECK(ClosedForm::sech_n1(1.5, wave(1, 1)).equation().m == 1.5);
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(ClosedForm::sine33(wave(1.0, -1.0)), kmn::DomainError);
  CHECK_THROWS_AS(ClosedForm::compacton22(wave(-1.0, 1.0)), kmn::DomainError);
  CHECK_THROWS_AS(ClosedForm::sn23(wave(1.0, 1.0, 0.0, 2)), kmn::DomainError);
  CHECK_THROWS_AS(ClosedForm::sech_n1(1.0, wave(1.0, 1.0)), kmn::DomainError);
  CHECK_THROWS_AS(ClosedForm::sin_squared_m1({1.0, -0.3, 0.0}), kmn::DomainError);
  TravelingWaveParams w = wave(1.0, 1.0);
  w.c = 0.1;
  CHECK_THROWS_AS(ClosedForm::implicit_log13(w), kmn::DomainError);
}

TEST_CASE("pinned values") {
  CHECK(ClosedForm::compacton22(wave(1.0, 3.0)).eval(0.0, 0.0) == doctest::Approx(4.0).epsilon(1e-15));
  for (double k : {0.5, 1.0, 2.3}) {
    const auto c = ClosedForm::compacton22(wave(k, 1.7));
    CHECK(c.eval(2.0 * M_PI, 0.0) == 0.0);
    CHECK(c.eval(-2.0 * M_PI, 0.0) == 0.0);
  }
  CHECK(ClosedForm::parabola_cap32(wave(1.0, 4.0)).eval(0.0, 0.0) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(ClosedForm::sine33(wave(1.0, 2.0 / 3.0)).eval(1.5 * M_PI, 0.0) == doctest::Approx(1.0).epsilon(1e-15));

  // High-precision reference values.
  CHECK(std::abs(ClosedForm::sn23(wave(0.9, 1.2, 0.1)).eval(0.7, 0.3) - 1.45362210063321558) < 1e-13);
  CHECK(std::abs(implicit_log_solve(1.5, wave(1.0, 1.0)) - 0.811696647616065296) < 1e-13);
  CHECK(std::abs(ClosedForm::sech_n1(3.0, wave(1.0, 1.0)).eval(1.5, 0.0) - 0.601176577926400141) < 1e-14);
}

TEST_CASE("traveling kinds are transported at speed omega/k") {
  for (const auto& s : traveling_catalog()) {
    const std::string name = to_string(s.kind());
    CAPTURE(name);
    const double speed = s.wave().omega / s.wave().k;
    for (const auto& [x, t] : admissible_points(s, 50, 3)) {
      const auto j = s.eval_derivs(x, t);
      CHECK(std::abs(j.ut + speed * j.ux) < 1e-12 * std::max(1.0, std::abs(j.ux)));
    }
  }
}

TEST_CASE("analytic derivatives agree with finite differences") {
  for (const auto& s : traveling_catalog()) {
    const std::string name = to_string(s.kind());
    CAPTURE(name);
    for (const auto& [x, t] : admissible_points(s, 20, 5)) {
      const auto j = s.eval_derivs(x, t);
      auto in_x = [&, t = t](double xx) { return s.eval(xx, t); };
      auto in_t = [&, x = x](double tt) { return s.eval(x, tt); };
      // A third difference at h = 1e-3 carries ~1e-6 of round-off.
      const double h = 1e-3;
      CHECK(std::abs(kmn::fd::derivative_of(in_x, x, h, 1, 6) - j.ux) < 1e-7);
      CHECK(std::abs(kmn::fd::derivative_of(in_x, x, h, 2, 6) - j.uxx) < 1e-7);
      CHECK(std::abs(kmn::fd::derivative_of(in_x, x, 5e-3, 3, 6) - j.uxxx) < 1e-7);
      CHECK(std::abs(kmn::fd::derivative_of(in_t, t, h, 1, 6) - j.ut) < 1e-7);
    }
  }
}

TEST_CASE("every catalog member solves its equation") {
  for (const auto& s : traveling_catalog()) {
    const std::string name = to_string(s.kind());
    CAPTURE(name);
    CHECK(residual(s, admissible_points(s, 200, 17)) < 1e-9);
  }
  SUBCASE("m = 1 family") {
    const auto s = ClosedForm::sin_squared_m1({1.0, 0.75, 0.0});
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> d(-5.0, 5.0);
    Points pts;
    for (int i = 0; i < 200; ++i) pts.emplace_back(d(rng), d(rng));
    CHECK(residual(s, pts) < 1e-9);
    const auto shifted = ClosedForm::sin_squared_m1({2.5, -0.1, 0.7});
    CHECK(residual(shifted, pts) < 1e-9);
  }
}

TEST_CASE("Sn23 matches the numerical quadrature of its first integral") {
  const double k = 0.9, w = 1.2;
  const auto s = ClosedForm::sn23(wave(k, w));
  kmn::waves::FirstIntegral fi;
  fi.equation = {3.0, 2.0, 1.0, 1.0};
  fi.wave = wave(k, w);
  const double top = std::sqrt(5.0 * w / (3.0 * k));
  const auto f = kmn::waves::integrand(fi);
  const kmn::waves::Branch b{0.0, top, top, 0.0};
  // The profile rises to its crest at psi = 0; psi <= 0 is the rising branch.
  for (double psi = -4.0; psi <= 0.0; psi += 0.25) {
    const double g = kmn::waves::invert_orbit_integral(f, b, psi);
    CHECK(std::abs(s.eval(psi / k, 0.0) - g) < 1e-8);
  }
}

TEST_CASE("compacton support") {
  const double k = 0.8, w = 1.5;
  const double edge = 2.0 * M_PI * k;
  const double beta = 4.0 * w / (3.0 * k);
  const auto c = ClosedForm::compacton22(wave(k, w));
  SUBCASE("outside the support everything vanishes") {
    const auto j = c.eval_derivs(2.0 * M_PI + 0.1, 0.0);
    CHECK(j.u == 0.0);
    CHECK(j.ux == 0.0);
    CHECK(j.uxx == 0.0);
    CHECK(j.uxxx == 0.0);
    CHECK(j.ut == 0.0);
  }
  SUBCASE("edge derivatives are refused") {
    // With a = 2 pi k the origin sits exactly on the edge.
    const auto on_edge = ClosedForm::compacton22(wave(k, w, edge));
    CHECK_THROWS_AS(on_edge.eval_derivs(0.0, 0.0), kmn::EdgeError);
    CHECK(on_edge.eval(0.0, 0.0) == 0.0);
    const auto other_edge = ClosedForm::compacton22(wave(k, w, -edge, -1));
    CHECK_THROWS_AS(other_edge.eval_derivs(0.0, 0.0), kmn::EdgeError);
  }
  SUBCASE("u and u_x are continuous across the edge") {
    for (double gap : {1e-6, 1e-9, 1e-12}) {
      const auto in = c.eval_derivs((edge - gap) / k, 0.0);
      const auto out = c.eval_derivs((edge + gap) / k, 0.0);
      CHECK(std::abs(in.u - out.u) < gap * gap * beta);
      CHECK(std::abs(in.ux - out.ux) < gap * beta);
      // u_xx jumps by beta/8.
      CHECK(std::abs(in.uxx - out.uxx) == doctest::Approx(beta / 8.0).epsilon(1e-5));
    }
  }
}

TEST_CASE("phase-shift covariance") {
  for (const auto& s : traveling_catalog()) {
    if (s.kind() == SolutionKind::ImplicitLog13) continue;
    const std::string name = to_string(s.kind());
    CAPTURE(name);
    const double delta = 0.37;
    auto w = s.wave();
    w.a -= w.epsilon * delta;
    ClosedForm moved = s;
    switch (s.kind()) {
      case SolutionKind::SineShift22: moved = ClosedForm::sine_shift22(w); break;
      case SolutionKind::Compacton22: moved = ClosedForm::compacton22(w); break;
      case SolutionKind::ParabolaCap32: moved = ClosedForm::parabola_cap32(w); break;
      case SolutionKind::Sn23: moved = ClosedForm::sn23(w); break;
      case SolutionKind::Sine33: moved = ClosedForm::sine33(w); break;
      case SolutionKind::SechN1: moved = ClosedForm::sech_n1(s.equation().m, w); break;
      default: break;
    }
    for (const auto& [x, t] : admissible_points(s, 30, 9)) {
      CHECK(std::abs(moved.eval(x + delta / s.wave().k, t) - s.eval(x, t)) < 1e-12);
    }
  }
}

TEST_CASE("implicit logarithmic branch") {
  const TravelingWaveParams p = wave(1.2, 0.9, 0.4, -1);
  const double A = p.omega / (p.k * p.k * p.k);
  const double B = 1.0 / (2.0 * p.k * p.k);
  const double f_max = std::sqrt(A / B);
  const double floor = implicit_log_lhs(f_max, p);
  CHECK(floor == doctest::Approx(std::log(2.0 * std::sqrt(A * B)) / std::sqrt(A)));

  SUBCASE("reproduces the relation") {
    for (double rel = floor; rel < floor + 15.0; rel += 0.3) {
      const double y = p.epsilon * (rel + p.a);
      const double f = implicit_log_solve(y, p);
      CHECK(f > 0.0);
      CHECK(f <= f_max);
      CHECK(std::abs(implicit_log_lhs(f, p) - (p.epsilon * y - p.a)) < 1e-10);
    }
  }
  SUBCASE("solves f_y^2 = A f^2 - B f^4") {
    const double h = 1e-3;
    for (double rel = floor + 0.2; rel < floor + 6.0; rel += 0.4) {
      const double y = p.epsilon * (rel + p.a);
      auto f = [&](double yy) { return implicit_log_solve(yy, p); };
      const double fy = kmn::fd::derivative_of(f, y, h, 1, 6);
      const double v = f(y);
      CHECK(std::abs(fy * fy - (A * v * v - B * v * v * v * v)) < 1e-6);
    }
  }
  SUBCASE("left side is monotone and stays finite at the crest") {
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 400; ++i) {
      const double f = f_max * i / 400.0;
      const double v = implicit_log_lhs(f, p);
      CHECK(std::isfinite(v));
      CHECK(v < prev);
      prev = v;
    }
  }
  SUBCASE("below the minimum there is no solution") {
    const double y = p.epsilon * (floor - 0.1 + p.a);
    CHECK_THROWS_AS(implicit_log_solve(y, p), kmn::NoSolutionError);
  }
  SUBCASE("coincides with the m = 3 solitary wave") {
    auto sech_params = p;
    sech_params.a = -p.a - floor;
    const auto sech = ClosedForm::sech_n1(3.0, sech_params);
    const auto implicit = ClosedForm::implicit_log13(p);
    for (double rel = floor; rel < floor + 10.0; rel += 0.5) {
      const double y = p.epsilon * (rel + p.a);
      CHECK(std::abs(implicit.eval(y / p.k, 0.0) - sech.eval(y / p.k, 0.0)) < 1e-12);
    }
  }
}
