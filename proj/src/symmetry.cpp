#include "kmn/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "kmn/errors.hpp"

namespace kmn::symmetry {
namespace {

PolyVectorField dx() { return {Poly3::constant(1), {}, {}}; }
PolyVectorField dt() { return {{}, Poly3::constant(1), {}}; }

PolyVectorField scaling(Rational u_weight) {
  return {Poly3::var(X), Poly3::constant(3) * Poly3::var(T), u_weight * Poly3::var(U)};
}

bool integer_valued(double p) { return std::floor(p) == p; }

}  // namespace

SymmetryCase classify(Rational m, Rational n) {
  if (n != Rational(1)) return SymmetryCase::GeneralN;
  if (m == Rational(1)) return SymmetryCase::Linear;
  if (m == Rational(2)) return SymmetryCase::Quadratic;
  return SymmetryCase::Generic;
}

SymmetryAlgebra table1_fields(Rational m, Rational n) {
  SymmetryAlgebra a;
  a.kind = classify(m, n);
  switch (a.kind) {
    case SymmetryCase::GeneralN:
      a.fields = {dt(), dx()};
      break;
    case SymmetryCase::Linear:
      a.fields = {dx(), dt(), {{}, {}, Poly3::var(U) + Poly3::constant(1)}};
      break;
    case SymmetryCase::Quadratic:
      a.fields = {dx(), dt(), {Poly3::constant(2) * Poly3::var(T), {}, Poly3::constant(1)},
                  scaling(-2)};
      break;
    case SymmetryCase::Generic:
      if (m == Rational(0)) {
        a.fields = {dx(), dt(), scaling(0)};
        a.complete = false;
      } else {
        a.fields = {dx(), dt(), scaling(Rational(-2) / (m - 1))};
      }
      break;
  }
  return a;
}

int generator_count(SymmetryCase kind) {
  switch (kind) {
    case SymmetryCase::Generic: return 3;
    case SymmetryCase::Linear: return 3;
    case SymmetryCase::Quadratic: return 4;
    case SymmetryCase::GeneralN: return 2;
  }
  return 0;
}

SolutionFn apply_transform(const GroupTransform& g, SolutionFn f) {
  if (g.generator < 0 || g.generator >= generator_count(g.kind))
    throw DomainError("generator index " + std::to_string(g.generator) + " out of range");
  const double e = g.epsilon;

  auto shift_x = [f, e](double x, double t) { return f(x - e, t); };
  auto shift_t = [f, e](double x, double t) { return f(x, t - e); };
  auto scale = [f, e](double u_rate) -> SolutionFn {
    const double s = std::exp(u_rate * e);
    const double a = std::exp(-e);
    const double b = std::exp(-3.0 * e);
    return [f, s, a, b](double x, double t) {
      const Jet j = f(a * x, b * t);
      return Jet{s * j.u, s * a * j.ux, s * a * a * j.uxx, s * a * a * a * j.uxxx, s * b * j.ut};
    };
  };

  switch (g.kind) {
    case SymmetryCase::GeneralN:
      return g.generator == 0 ? SolutionFn(shift_t) : SolutionFn(shift_x);
    case SymmetryCase::Generic:
      if (g.generator == 0) return shift_x;
      if (g.generator == 1) return shift_t;
      if (g.m == 1.0) throw DomainError("scaling generator needs m != 1");
      return scale(-2.0 / (g.m - 1.0));
    case SymmetryCase::Linear:
      if (g.generator == 0) return shift_x;
      if (g.generator == 1) return shift_t;
      return [f, e](double x, double t) {
        const double s = std::exp(-e);
        const Jet j = f(x, t);
        return Jet{s * j.u + e, s * j.ux, s * j.uxx, s * j.uxxx, s * j.ut};
      };
    case SymmetryCase::Quadratic:
      if (g.generator == 0) return shift_x;
      if (g.generator == 1) return shift_t;
      if (g.generator == 2) {
        return [f, e](double x, double t) {
          Jet j = f(x - 2.0 * e * t, t);
          j.ut -= 2.0 * e * j.ux;
          j.u += e;
          return j;
        };
      }
      return scale(-2.0);
  }
  throw DomainError("unknown symmetry case");
}

double similarity_alpha(double m) {
  if (m == 1.0) throw DomainError("the similarity reduction needs m != 1");
  return 2.0 / (3.0 * (m - 1.0));
}

double reduced_third_derivative(double m, double chi, double v, double dv) {
  const double p = m - 1.0;
  double vp = 1.0;
  if (p != 0.0) {
    if (!integer_valued(p) && v <= 0.0)
      throw SingularityError(chi, "v^(m-1) undefined for v = " + std::to_string(v));
    if (p < 0.0 && v == 0.0) throw SingularityError(chi, "v^(m-1) undefined at v = 0");
    vp = std::pow(v, p);
  }
  return -m * vp * dv + chi * dv / 3.0 + similarity_alpha(m) * v;
}

ReducedProfile similarity_reduce(double m, const std::array<double, 3>& v0, double chi0,
                                 double chi1, const ReductionOptions& opt) {
  similarity_alpha(m);
  if (!(chi0 != chi1) || !std::isfinite(chi0) || !std::isfinite(chi1))
    throw DomainError("reduction span must be a finite non-empty interval");
  if (opt.samples < 2) throw DomainError("reduction needs at least two samples");

  using State = std::array<double, 3>;
  namespace ode = boost::numeric::odeint;
  auto system = [m](const State& s, State& ds, double chi) {
    ds[0] = s[1];
    ds[1] = s[2];
    ds[2] = reduced_third_derivative(m, chi, s[0], s[1]);
  };

  const std::size_t n = opt.samples;
  std::vector<double> nodes(n);
  for (std::size_t i = 0; i < n; ++i)
    nodes[i] = chi0 + (chi1 - chi0) * static_cast<double>(i) / static_cast<double>(n - 1);
  nodes.back() = chi1;

  ReducedProfile out;
  out.m = m;
  out.chi.reserve(n);
  State s = v0;
  reduced_third_derivative(m, chi0, s[0], s[1]);
  auto stepper = ode::make_controlled(opt.atol, opt.rtol, ode::runge_kutta_dopri5<State>());
  const double h0 = (chi1 - chi0) / static_cast<double>(n - 1);
  ode::integrate_times(stepper, system, s, nodes.begin(), nodes.end(), h0,
                       [&](const State& x, double chi) {
                         out.chi.push_back(chi);
                         out.v.push_back(x[0]);
                         out.dv.push_back(x[1]);
                         out.d2v.push_back(x[2]);
                         out.d3v.push_back(reduced_third_derivative(m, chi, x[0], x[1]));
                       });
  if (chi1 < chi0) {
    std::reverse(out.chi.begin(), out.chi.end());
    std::reverse(out.v.begin(), out.v.end());
    std::reverse(out.dv.begin(), out.dv.end());
    std::reverse(out.d2v.begin(), out.d2v.end());
    std::reverse(out.d3v.begin(), out.d3v.end());
  }
  return out;
}

double ReducedProfile::value(double c) const {
  if (chi.size() < 2) throw DomainError("profile has fewer than two samples");
  if (!(c >= lo() && c <= hi()))
    throw ExtrapolationError("chi = " + std::to_string(c) + " outside sampled span [" +
                             std::to_string(lo()) + ", " + std::to_string(hi()) + "]");
  auto it = std::upper_bound(chi.begin(), chi.end(), c);
  std::size_t i = it == chi.begin() ? 0 : static_cast<std::size_t>(it - chi.begin()) - 1;
  if (i >= chi.size() - 1) i = chi.size() - 2;
  const double h = chi[i + 1] - chi[i];
  const double s = (c - chi[i]) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  return h00 * v[i] + h10 * h * dv[i] + h01 * v[i + 1] + h11 * h * dv[i + 1];
}

double lift_value(const ReducedProfile& v, double x, double t) {
  if (!(t > 0.0)) throw DomainError("lift needs t > 0");
  return std::pow(t, -similarity_alpha(v.m)) * v.value(x * std::cbrt(1.0 / t));
}

Field lift(const ReducedProfile& v, double t, const Grid1D& grid) {
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = lift_value(v, grid.node(i), t);
  return Field(grid, std::move(values), t);
}

}  // namespace kmn::symmetry
