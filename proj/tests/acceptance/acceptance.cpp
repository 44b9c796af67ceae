// Prints one PASS/FAIL line per acceptance criterion and exits non-zero if any
// criterion fails. Wall-clock limits are part of each criterion.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kmn/constraints.hpp"
#include "kmn/elliptic.hpp"
#include "kmn/model.hpp"
#include "kmn/poly3.hpp"
#include "kmn/solutions.hpp"
#include "kmn/solver.hpp"
#include "kmn/stencil.hpp"
#include "kmn/symmetry.hpp"
#include "kmn/waves.hpp"

namespace {

using kmn::Jet;
using kmn::KmnParams;
using kmn::TravelingWaveParams;
using kmn::solutions::ClosedForm;
using kmn::solutions::SolutionKind;
using kmn::symmetry::Rational;
using Points = std::vector<std::pair<double, double>>;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records a measured quantity against its bound.
  void below(const std::string& what, double value, double bound) {
    if (!(value < bound)) pass = false;
    note(what + "=" + fmt(value));
  }
  void require(const std::string& what, bool ok) {
    if (!ok) {
      pass = false;
      note(what + "=no");
    }
  }
  void note(const std::string& s) {
    if (detail.tellp() > 0) detail << ' ';
    detail << s;
  }
  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
  }
};

int failures = 0;

void criterion(int id, const char* title, double seconds_limit, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.note(std::string("exception=\"") + e.what() + "\"");
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs >= seconds_limit) {
    out.pass = false;
    out.note("over-time");
  }
  if (!out.pass) ++failures;
  std::printf("%s %d %s: %s time=%.2fs (limit %.0fs)\n", out.pass ? "PASS" : "FAIL", id, title,
              out.detail.str().c_str(), secs, seconds_limit);
  std::fflush(stdout);
}

// Random (x, t) with the phase epsilon*(k x - omega t) + a uniform in [lo, hi].
Points phase_points(const TravelingWaveParams& w, double lo, double hi, std::mt19937_64& rng, int count) {
  std::uniform_real_distribution<double> phase(lo, hi), time(-1.0, 1.0);
  Points pts;
  for (int i = 0; i < count; ++i) {
    const double psi = phase(rng), t = time(rng);
    const double y = (psi - w.a) / w.epsilon;
    pts.emplace_back((y + w.omega * t) / w.k, t);
  }
  return pts;
}

double max_residual(const std::function<Jet(double, double)>& f, const KmnParams& eq, const Points& pts) {
  double r = 0.0;
  for (const auto& [x, t] : pts) r = std::max(r, std::abs(kmn::pointwise_residual(f(x, t), eq)));
  return r;
}

void closed_form_residuals(Outcome& out) {
  std::mt19937_64 rng(20240611);
  const int count = 200;
  const TravelingWaveParams sine_shift{0.8, 1.3, 0.0, 0.0, 0.4, 1};
  const TravelingWaveParams compacton{1.2, 0.9, 0.0, 0.0, 0.0, 1};
  const TravelingWaveParams cap{1.0, 4.0, 0.0, 0.0, 0.5, -1};
  const TravelingWaveParams sine33{1.1, 0.7, 0.0, 0.0, -0.3, 1};
  struct Case {
    const char* name;
    ClosedForm form;
    Points pts;
  };
  const double edge = 1.95 * M_PI * compacton.k;
  std::vector<Case> cases{
      {"sine-shift22", ClosedForm::sine_shift22(sine_shift), phase_points(sine_shift, -6.0, 6.0, rng, count)},
      {"compacton22", ClosedForm::compacton22(compacton), phase_points(compacton, -edge, edge, rng, count)},
      {"parabola-cap32", ClosedForm::parabola_cap32(cap), phase_points(cap, -6.0, 6.0, rng, count)},
      {"sine33", ClosedForm::sine33(sine33), phase_points(sine33, -6.0, 6.0, rng, count)},
      {"sin-squared-m1", ClosedForm::sin_squared_m1({1.3, 0.75, 0.2}), {}},
  };
  std::uniform_real_distribution<double> x(-5.0, 5.0), t(-1.0, 1.0);
  for (int i = 0; i < count; ++i) cases.back().pts.emplace_back(x(rng), t(rng));
  for (const auto& c : cases) out.below(c.name, kmn::solutions::residual(c.form, c.pts), 1e-8);
}

void quadrature_inversion(Outcome& out) {
  using namespace kmn::waves;
  auto integral = [](double m, double n, const TravelingWaveParams& w) {
    FirstIntegral fi;
    fi.kind = IntegralCase::General;
    fi.equation = {m, n, 1.0, 1.0};
    fi.wave = w;
    return fi;
  };
  const int count = 100;
  {
    const double k = 0.7, w = 1.1, a = 0.3;
    const double beta = 4.0 * w / (3.0 * k);
    const auto fi = integral(2.0, 2.0, {k, w, 0.0, 0.0, a, 1});
    const Branch b{0.0, beta, beta / 2.0, 0.0};
    const double lo = -M_PI * k - a + 1e-3, hi = M_PI * k - a - 1e-3;
    double err = 0.0;
    for (int i = 0; i < count; ++i) {
      const double y = lo + (hi - lo) * i / (count - 1);
      const double expect = beta / 2.0 * (1.0 + std::sin((y + a) / (2.0 * k)));
      err = std::max(err, std::abs(invert_quadrature(y, fi, b) - expect));
    }
    out.below("sine-shift22", err, 1e-8);
  }
  {
    const double k = 1.0, w = 4.0, a = 0.5;
    const double top = 5.0 * w / (4.0 * k);
    const double reach = std::sqrt(30.0 * k * k * top);
    const auto fi = integral(2.0, 3.0, {k, w, 0.0, 0.0, a, 1});
    const Branch b{0.0, top, top, 0.0};
    double err = 0.0;
    for (int i = 0; i < count; ++i) {
      const double psi = -reach + 1e-3 + (reach - 1e-3) * i / (count - 1);
      const double expect = top - psi * psi / (30.0 * k * k);
      err = std::max(err, std::abs(invert_quadrature(psi - a, fi, b) - expect));
    }
    out.below("parabola-cap32", err, 1e-8);
  }
}

void symmetry_closure(Outcome& out) {
  namespace sym = kmn::symmetry;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> x(-3.0, 3.0), t(-0.5, 0.5);
  Points pts;
  for (int i = 0; i < 100; ++i) pts.emplace_back(x(rng), t(rng));

  for (const Rational m : {Rational(3, 2), Rational(3), Rational(5), Rational(2)}) {
    const double md = boost::rational_cast<double>(m);
    const auto algebra = sym::table1_fields(m, Rational(1));
    const auto& fields = algebra.fields;
    const auto closure = sym::closure_check(fields);
    std::size_t defects = 0;
    for (const auto& a : fields)
      for (const auto& b : fields) {
        if (!(sym::lie_bracket(a, b) + sym::lie_bracket(b, a)).is_zero()) ++defects;
        for (const auto& c : fields)
          if (!sym::jacobi_defect(a, b, c).is_zero()) ++defects;
      }
    const std::string tag = "m=" + std::to_string(m.numerator()) +
                            (m.denominator() == 1 ? "" : "/" + std::to_string(m.denominator()));
    out.require(tag + ":closed", closure.closed);
    out.require(tag + ":no-defects", defects == 0);

    const auto form = ClosedForm::sech_n1(md, {1.0, 1.0, 0.0, 0.0, 0.0, 1});
    const sym::SolutionFn base = [form](double xx, double tt) { return form.eval_derivs(xx, tt); };
    const KmnParams eq{md, 1.0, 1.0, 1.0};
    double worst = 0.0;
    for (int g = 0; g < sym::generator_count(algebra.kind); ++g)
      for (double eps : {-0.3, 0.3})
        worst = std::max(worst, max_residual(sym::apply_transform({algebra.kind, g, eps, md}, base), eq, pts));
    out.below(tag, worst, 1e-7);
  }
}

void compacton_conservation(Outcome& out) {
  const std::size_t n = 1024;
  const double length = 8.0 * M_PI;
  const auto grid = kmn::Grid1D::periodic(-0.5 * length, length, n);
  const auto form = ClosedForm::compacton22({1.0, 1.0, 0.0, 0.0, 0.0, 1});
  const auto u0 = kmn::Field::sample(grid, [&](double x) { return form.eval(x, 0.0); });
  kmn::solver::SolverConfig cfg;
  cfg.t_end = 1.0;
  cfg.cfl_limit = 0.25;
  cfg.derivative_order = 4;
  cfg.record_every = std::numeric_limits<int>::max();
  const auto tr = kmn::solver::simulate(u0, {2.0, 2.0, 1.0, 1.0}, cfg);
  const auto& c0 = tr.conserved.front();
  const auto& c1 = tr.conserved.back();
  out.below("mass_drift", std::abs(c1.mass - c0.mass) / std::abs(c0.mass), 1e-6);
  out.below("l2_drift", std::abs(c1.l2 - c0.l2) / std::abs(c0.l2), 1e-4);

  // Peak position refined by a parabola through the three largest samples.
  auto peak = [&](const kmn::Field& f) {
    std::size_t i = 0;
    for (std::size_t j = 1; j < f.size(); ++j)
      if (f[j] > f[i]) i = j;
    const double a = f[(i + n - 1) % n], b = f[i], c = f[(i + 1) % n];
    const double denom = a - 2.0 * b + c;
    const double shift = denom != 0.0 ? 0.5 * (a - c) / denom : 0.0;
    return grid.node(i) + shift * grid.dx();
  };
  const auto& last = tr.snapshots.back();
  double moved = peak(last) - peak(tr.snapshots.front());
  moved -= length * std::round(moved / length);
  const double speed = moved / last.time();
  out.below("speed_error", std::abs(speed - 1.0), 2.0 * grid.dx() / last.time());
  out.note("steps=" + std::to_string(tr.steps));
}

void similarity_lift(Outcome& out) {
  namespace sym = kmn::symmetry;
  const double m = 2.0;
  sym::ReductionOptions opt;
  opt.rtol = 1e-11;
  opt.atol = 1e-11;
  opt.samples = 20001;
  const auto v = sym::similarity_reduce(m, {0.5, 0.0, 0.0}, -10.0, 10.0, opt);
  // t = 1, so x = chi; the window keeps the stencils inside the samples.
  const std::size_t n = 2048;
  const double width = 0.6 * (v.hi() - v.lo());
  const kmn::Grid1D grid(0.5 * (v.lo() + v.hi()) - 0.5 * width, width / static_cast<double>(n), n);
  const kmn::SpaceTimeFunction u = [&](double x, double t) { return sym::lift_value(v, x, t); };
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    worst = std::max(worst, std::abs(kmn::fd_residual(u, grid.node(i), 1.0, grid.dx(), 1e-3, {m, 1.0, 1.0, 1.0})));
  out.below("fd_residual", worst, 1e-5);
}

void constraint_pipeline(Outcome& out) {
  namespace c = kmn::constraints;
  {
    bool exact = true;
    int checked = 0;
    for (const Rational m : {Rational(0), Rational(1), Rational(2), Rational(3), Rational(4), Rational(5),
                             Rational(-3), Rational(1, 2), Rational(3, 2), Rational(-1, 2), Rational(1, 7),
                             Rational(7, 3), Rational(5, 3), Rational(11, 4), Rational(13, 5), Rational(9, 8),
                             Rational(17, 6), Rational(22, 7), Rational(100, 3), Rational(-5, 2)}) {
      const auto k = c::schrodinger_constants(m);
      const Rational zero(0);
      exact = exact && k.a + k.b == m && k.q * (m - Rational(1)) + k.b / Rational(2) == zero &&
              Rational(4) * k.q + k.a == zero;
      ++checked;
    }
    out.require("splitting_constants", exact && checked == 20);
    out.note("exact_m=" + std::to_string(checked));
  }
  {
    const double lambda = 0.75, C0 = 1.0;
    const auto o = c::phi_orbit(1.0, lambda, C0, {0.0, 1.0}, 2.0 * M_PI, 501);
    const auto u = ClosedForm::sin_squared_m1({C0, lambda, 0.0});
    const double s = std::sqrt(4.0 * lambda + 1.0);
    double ode = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < o.y.size(); ++i) {
      const double phi = 2.0 * std::sqrt(C0 / (4.0 * lambda + 1.0)) * std::sin(0.5 * s * o.y[i]);
      ode = std::max({ode, std::abs(o.ode[i] - phi), std::abs(o.ode[i] * o.ode[i] - u.eval(o.y[i], 0.0))});
      quad = std::max({quad, std::abs(o.quadrature[i] - phi),
                       std::abs(o.quadrature[i] * o.quadrature[i] - u.eval(o.y[i], 0.0))});
    }
    out.below("phi_ode", ode, 1e-8);
    out.below("phi_quadrature", quad, 1e-8);
  }
  {
    const double m = 2.0, K = 2.0;
    const auto w0 = c::quadrature_profile(m, K, 1.0, 1);
    const c::CharacteristicsProblem p{[&](double s) { return w0.eval(s); }, w0.lo(), w0.hi(), m, K};
    const kmn::SpaceTimeFunction w = [&](double x, double t) { return c::characteristics_solve(p, x, t, 16); };
    std::vector<std::array<double, 2>> pts;
    for (double x : {-1.3, 0.2, 0.9, 2.4}) pts.push_back({x, 0.3});
    double transport = 0.0;
    for (const auto& [x, t] : pts) {
      const double wx = kmn::fd::derivative_of([&, t = t](double s) { return w(s, t); }, x, 1e-3, 1, 6);
      const double wt = kmn::fd::derivative_of([&, x = x](double s) { return w(x, s); }, t, 1e-3, 1, 6);
      transport = std::max(transport, std::abs(c::transport_speed(w(x, t), m, K) * wx + wt));
    }
    const auto r = c::reciprocal_pair_check(w, m, 1.0, pts, 2e-2, 1e-3);
    out.below("transport", transport, 1e-6);
    out.below("constraint", r.res_constraint, 1e-6);
    out.below("reciprocal", r.res_recip, 1e-5);
  }
}

void elliptic_oracle(Outcome& out) {
  using namespace kmn::waves;
  double sine = 0.0, hyper = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double u = -5.0 + 10.0 * i / 1000.0;
    sine = std::max(sine, std::abs(jacobi_sn(u, 0.0) - std::sin(u)));
    hyper = std::max(hyper, std::abs(jacobi_sn(u, 1.0) - std::tanh(u)));
  }
  out.below("modulus0", sine, 1e-12);
  out.below("modulus1", hyper, 1e-12);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-5.0, 5.0), k(0.0, 1.0);
  double pyth = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto e = jacobi_elliptic(u(rng), k(rng));
    pyth = std::max(pyth, std::abs(e.sn * e.sn + e.cn * e.cn - 1.0));
  }
  out.below("sn2_plus_cn2", pyth, 1e-11);
}

void constraint_identity(Outcome& out) {
  namespace c = kmn::constraints;
  struct Fn {
    double (*w)(double);
    double (*d1)(double);
    double (*d2)(double);
    double (*d3)(double);
  };
  const Fn fns[] = {
      {[](double x) { return x; }, [](double) { return 1.0; }, [](double) { return 0.0; },
       [](double) { return 0.0; }},
      {[](double x) { return x * x; }, [](double x) { return 2.0 * x; }, [](double) { return 2.0; },
       [](double) { return 0.0; }},
      {[](double x) { return std::exp(x); }, [](double x) { return std::exp(x); },
       [](double x) { return std::exp(x); }, [](double x) { return std::exp(x); }},
      {[](double x) { return 1.0 + x * x; }, [](double x) { return 2.0 * x; }, [](double) { return 2.0; },
       [](double) { return 0.0; }},
  };
  double worst = 0.0;
  for (const auto& f : fns)
    for (double m : {1.5, 2.0, 3.0, 5.0})
      for (int i = 0; i < 50; ++i) {
        const double x = 0.1 + 3.9 * i / 49.0;
        const c::WJet j{f.w(x), f.d1(x), f.d2(x), f.d3(x)};
        const double lhs = c::constraint_418(j, m, 1.0);
        const double rhs = 6.0 * j.wx * c::constraint_49(j, m);
        worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
      }
  out.below("relative_gap", worst, 1e-13);
}

void negative_controls(Outcome& out) {
  namespace sym = kmn::symmetry;
  const TravelingWaveParams w{1.0, 1.0, 0.0, 0.0, 0.0, 1};
  const auto form = ClosedForm::compacton22(w);
  std::mt19937_64 rng(5);
  const auto pts = phase_points(w, -1.95 * M_PI, 1.95 * M_PI, rng, 200);
  const auto scaled = [&](double x, double t) {
    Jet j = form.eval_derivs(x, t);
    for (double* v : {&j.u, &j.ux, &j.uxx, &j.uxxx, &j.ut}) *v *= 1.01;
    return j;
  };
  const double clean = kmn::solutions::residual(form, pts);
  const double perturbed = max_residual(scaled, form.equation(), pts);
  out.note("clean=" + Outcome::fmt(clean));
  out.note("perturbed=" + Outcome::fmt(perturbed));
  out.require("perturbation_detected", perturbed > 1e-3 && clean < 1e-8);

  // {d/dx, x^2 d/dx} is not closed: the bracket 2x d/dx leaves the span.
  sym::PolyVectorField dx{sym::Poly3::constant(1), {}, {}};
  sym::PolyVectorField x2dx{sym::Poly3::monomial(1, 2, 0, 0), {}, {}};
  const auto r = sym::closure_check({dx, x2dx});
  out.require("witness", !r.closed && r.witness.has_value());
  if (r.witness) out.note("witness=[" + std::to_string(r.witness->a) + "," + std::to_string(r.witness->b) + "]");
}

}  // namespace

int main() {
  criterion(1, "closed-form residual suite", 1.0, closed_form_residuals);
  criterion(2, "quadrature inversion oracle", 5.0, quadrature_inversion);
  criterion(3, "symmetry transform closure", 5.0, symmetry_closure);
  criterion(4, "compacton conservation drift", 60.0, compacton_conservation);
  criterion(5, "similarity reduction lift", 10.0, similarity_lift);
  criterion(6, "differential-constraint pipeline", 30.0, constraint_pipeline);
  criterion(7, "elliptic function oracle", 1.0, elliptic_oracle);
  criterion(8, "constraint reduction identity", 1.0, constraint_identity);
  criterion(9, "negative controls", 1.0, negative_controls);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
