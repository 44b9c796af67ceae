#include "kmn/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include <boost/math/tools/toms748_solve.hpp>
#include <boost/numeric/odeint.hpp>

#include "kmn/errors.hpp"
#include "kmn/stencil.hpp"

namespace kmn::constraints {
namespace {

constexpr int kOrder = 4;
constexpr double kOdeTol = 1e-12;

bool is_integer(double p) { return std::floor(p) == p; }

bool is_odd_integer(double p) { return is_integer(p) && std::fmod(std::abs(p), 2.0) == 1.0; }

void check_same_grid(const Samples& a, const Samples& b) {
  if (a.size() != b.size() || a.x0 != b.x0 || a.dx != b.dx)
    throw DomainError("samples are not on a common grid");
}

std::size_t margin(const Samples& s, int deriv) {
  const auto r = static_cast<std::size_t>(fd::stencil_radius(deriv, kOrder));
  if (s.size() < 2 * r + 1) throw DomainError("too few samples for the difference stencil");
  return r;
}

// u^p at node i, where u may be a sampled value of either sign.
double node_power(double u, double p, std::size_t i) {
  if (p == 0.0) return 1.0;
  if (u == 0.0) {
    if (p < 0.0) throw SingularNodeError(i, "u^" + std::to_string(p) + " at u = 0");
    return 0.0;
  }
  if (u < 0.0 && !is_integer(p))
    throw DomainError("u^" + std::to_string(p) + " undefined for u = " + std::to_string(u));
  return std::pow(u, p);
}

// Real n-th root of F; negative F only for odd integer n.
double real_root(double F, double n) {
  if (n == 1.0) return F;
  if (F < 0.0) {
    if (!is_odd_integer(n))
      throw DomainError("F^(1/n) has no real value for F = " + std::to_string(F));
    return -std::pow(-F, 1.0 / n);
  }
  return std::pow(F, 1.0 / n);
}

template <class System, class State>
void sample_ode(System system, State s, double x0, double x1, std::size_t samples,
                const std::function<void(const State&, double)>& observe) {
  namespace ode = boost::numeric::odeint;
  std::vector<double> nodes(samples);
  for (std::size_t i = 0; i < samples; ++i)
    nodes[i] = x0 + (x1 - x0) * static_cast<double>(i) / static_cast<double>(samples - 1);
  nodes.back() = x1;
  auto stepper = ode::make_controlled(kOdeTol, kOdeTol, ode::runge_kutta_dopri5<State>());
  ode::integrate_times(stepper, system, s, nodes.begin(), nodes.end(),
                       (x1 - x0) / static_cast<double>(samples - 1), observe);
}

// Central difference of sampled data taken against the centre value, so a
// constant gives exactly zero.
double sampled_derivative(std::span<const double> v, std::size_t i, double dx, int deriv,
                          int order = kOrder) {
  const auto w = fd::stencil_weights(deriv, order);
  const std::size_t r = w.size() / 2;
  double acc = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * (v[i - r + k] - v[i]);
  return acc / std::pow(dx, deriv);
}

double callable_derivative(const std::function<double(double)>& f, double x, double h, int deriv) {
  const auto w = fd::stencil_weights(deriv, 6);
  const int r = static_cast<int>(w.size() / 2);
  const double f0 = f(x);
  double acc = 0.0;
  for (int k = 0; k <= 2 * r; ++k)
    if (k != r) acc += w[static_cast<std::size_t>(k)] * (f(x + (k - r) * h) - f0);
  return acc / std::pow(h, deriv);
}

// u_t + (u^m)_x + (u^n)_xxx with 6th-order differences.
double equation_residual(const SpaceTimeFunction& u, double x, double t, double hx, double ht,
                         double m, double n) {
  const double ut = callable_derivative([&](double s) { return u(x, s); }, t, ht, 1);
  const double conv = callable_derivative([&](double s) { return spow(u(s, t), m); }, x, hx, 1);
  const double disp = callable_derivative([&](double s) { return spow(u(s, t), n); }, x, hx, 3);
  return ut + conv + disp;
}

void check_span(double x0, double x1, std::size_t samples) {
  if (!(x1 > x0) || !std::isfinite(x0) || !std::isfinite(x1))
    throw DomainError("integration span must be finite with end > start");
  if (samples < 2) throw DomainError("need at least two samples");
}

}  // namespace

void validate(const ConstraintSpec& s) {
  if (!std::isfinite(s.m) || !std::isfinite(s.n) || !std::isfinite(s.lambda) || !std::isfinite(s.K))
    throw DomainError("constraint parameters must be finite");
  const bool needs_m_ne_1 = s.kind == ConstraintKind::Reciprocal49 ||
                            s.kind == ConstraintKind::FirstIntegral412 ||
                            s.kind == ConstraintKind::Transport414;
  if (needs_m_ne_1 && s.m == 1.0) throw DomainError("this constraint needs m != 1");
}

Samples Samples::of(const std::function<double(double)>& f, double x0, double x1,
                    std::size_t npoints) {
  if (npoints < 2) throw DomainError("need at least two samples");
  Samples s;
  s.x0 = x0;
  s.dx = (x1 - x0) / static_cast<double>(npoints - 1);
  s.v.resize(npoints);
  for (std::size_t i = 0; i < npoints; ++i) s.v[i] = f(s.x(i));
  return s;
}

SpaceTimeSamples SpaceTimeSamples::of(const SpaceTimeFunction& f, double x0, double x1,
                                      std::size_t nx, double t0, double t1, std::size_t nt) {
  if (nx < 2 || nt < 2) throw DomainError("need at least two samples per direction");
  SpaceTimeSamples s;
  s.x0 = x0;
  s.dx = (x1 - x0) / static_cast<double>(nx - 1);
  s.t0 = t0;
  s.dt = (t1 - t0) / static_cast<double>(nt - 1);
  s.v.assign(nt, std::vector<double>(nx));
  for (std::size_t j = 0; j < nt; ++j)
    for (std::size_t i = 0; i < nx; ++i)
      s.v[j][i] = f(x0 + static_cast<double>(i) * s.dx, t0 + static_cast<double>(j) * s.dt);
  return s;
}

SplittingConstants schrodinger_constants(Rational m) {
  if (m == Rational(-1)) throw DomainError("splitting constants need m != -1");
  // 4q + a = 0 and q(m-1) + b/2 = 0 give b = a(m-1)/2; a + b = m fixes a.
  const Rational a = Rational(2) * m / (m + Rational(1));
  const Rational b = a * (m - Rational(1)) / Rational(2);
  return {a, b, -a / Rational(4)};
}

double schrodinger_residual(const Samples& psi, const Samples& u, double m, double lambda) {
  check_same_grid(psi, u);
  const std::size_t r = margin(psi, 2);
  const double c = m / (2.0 * (m + 1.0));
  double worst = 0.0;
  for (std::size_t i = r; i + r < psi.size(); ++i) {
    const double pxx = sampled_derivative(psi.v, i, psi.dx, 2);
    const double res = pxx + (c * node_power(u.v[i], m - 1.0, i) + lambda) * psi.v[i];
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

double factored_transport_residual(const SpaceTimeSamples& f, const SpaceTimeSamples& g,
                                   double lambda) {
  const std::size_t nt = f.v.size();
  if (nt < 3) throw DomainError("transport residual needs at least three time levels");
  if (g.v.size() != nt || f.x0 != g.x0 || f.dx != g.dx || f.t0 != g.t0 || f.dt != g.dt)
    throw DomainError("space-time samples are not on a common grid");
  const std::size_t nx = f.v.front().size();
  for (std::size_t j = 0; j < nt; ++j)
    if (f.v[j].size() != nx || g.v[j].size() != nx)
      throw DomainError("ragged space-time samples");
  const std::size_t rx = static_cast<std::size_t>(fd::stencil_radius(1, kOrder));
  if (nx < 2 * rx + 1) throw DomainError("too few spatial samples for the difference stencil");
  const int t_order = nt >= 5 ? 4 : 2;
  const std::size_t rt = static_cast<std::size_t>(fd::stencil_radius(1, t_order));

  std::vector<double> fcol(nt), gcol(nt);
  double worst = 0.0;
  for (std::size_t i = rx; i + rx < nx; ++i) {
    for (std::size_t j = 0; j < nt; ++j) {
      fcol[j] = f.v[j][i];
      gcol[j] = g.v[j][i];
    }
    for (std::size_t j = rt; j + rt < nt; ++j) {
      const double ft = sampled_derivative(fcol, j, f.dt, 1, t_order);
      const double gt = sampled_derivative(gcol, j, f.dt, 1, t_order);
      const double fx = sampled_derivative(f.v[j], i, f.dx, 1);
      const double gx = sampled_derivative(g.v[j], i, f.dx, 1);
      const double res = f.v[j][i] * (gt - 4.0 * lambda * gx) + g.v[j][i] * (ft - 4.0 * lambda * fx);
      worst = std::max(worst, std::abs(res));
    }
  }
  return worst;
}

double phi_first_integral(double phi, double m, double lambda, double C0) {
  return C0 - std::pow(std::abs(phi), 2.0 * m) / (2.0 * (m + 1.0)) - lambda * phi * phi;
}

PhiOrbit phi_orbit(double m, double lambda, double C0, std::array<double, 2> phi0, double y_end,
                   std::size_t samples) {
  check_span(0.0, y_end, samples);
  if (!(m > 0.0)) throw DomainError("phi orbit needs m > 0");
  const double defect = phi0[1] * phi0[1] - phi_first_integral(phi0[0], m, lambda, C0);
  if (std::abs(defect) > 1e-10 * (1.0 + std::abs(C0)))
    throw InconsistencyError(defect, "initial data misses the first integral by " +
                                         std::to_string(defect));

  const double c = m / (2.0 * (m + 1.0));
  auto accel = [=](double phi) { return -c * spow(phi, 2.0 * m - 1.0) - lambda * phi; };

  PhiOrbit out;
  out.y.reserve(samples);
  out.ode.reserve(samples);
  using State = std::array<double, 2>;
  auto system = [&](const State& s, State& ds, double) {
    ds[0] = s[1];
    ds[1] = accel(s[0]);
  };
  sample_ode<decltype(system), State>(system, phi0, 0.0, y_end, samples,
                                      [&](const State& s, double y) {
                                        out.y.push_back(y);
                                        out.ode.push_back(s[0]);
                                      });

  if (phi0[1] == 0.0 && accel(phi0[0]) == 0.0) {
    out.quadrature.assign(samples, phi0[0]);
    return out;
  }

  auto rhs = [=](double phi) { return phi_first_integral(phi, m, lambda, C0); };
  // Any turning point satisfies |phi|^{2m}/(2(m+1)) + lambda phi^2 = C0.
  double bound = std::abs(phi0[0]) + 1.0;
  if (lambda > 0.0) bound += std::sqrt(std::abs(C0) / lambda);
  bound += std::pow(2.0 * (m + 1.0) * std::abs(C0), 1.0 / (2.0 * m));
  const auto tp = waves::find_turning_points(rhs, phi0[0], 4.0 * bound);
  if (!tp.below || !tp.above) throw DomainError("the orbit through phi0 is not closed");

  int direction = phi0[1] > 0.0 ? 1 : -1;
  if (phi0[1] == 0.0) direction = accel(phi0[0]) > 0.0 ? 1 : -1;
  const waves::PeriodicOrbit orbit({rhs, {}}, *tp.below, *tp.above,
                                   std::clamp(phi0[0], *tp.below, *tp.above), direction);
  out.quadrature.reserve(samples);
  for (double y : out.y) out.quadrature.push_back(orbit.eval(y));
  return out;
}

double constraint_49(const WJet& j, double m) {
  if (!(j.w > 0.0)) throw DomainError("constraint needs w > 0");
  return j.wxx - j.wx * j.wx / j.w +
         (m / 6.0) * j.w * (std::pow(j.w, m - 1.0) - std::pow(j.w, 1.0 - m));
}

double constraint_418(const WJet& j, double m, double n) {
  if (!(j.w > 0.0)) throw DomainError("constraint needs w > 0");
  const double w = j.w;
  const double t3 = (std::pow(w, n) - std::pow(w, 2.0 - n)) * j.wxxx;
  const double t1 = (3.0 * ((n + 1.0) * std::pow(w, 1.0 - n) + (n - 1.0) * std::pow(w, n - 1.0)) * j.wxx +
                     (m / n) * (std::pow(w, m) - std::pow(w, 2.0 - m))) *
                    j.wx;
  const double t0 = (std::pow(w, n - 2.0) * (n * n - 3.0 * n + 2.0) -
                     std::pow(w, -n) * (n * n + 3.0 * n + 2.0)) *
                    j.wx * j.wx * j.wx;
  return t3 + t1 + t0;
}

double reciprocal_constraint_residual(const Samples& w, double m) {
  const std::size_t r = margin(w, 2);
  for (std::size_t i = 0; i < w.size(); ++i)
    if (!(w.v[i] > 0.0))
      throw DomainError("w must be positive; w = " + std::to_string(w.v[i]) + " at node " +
                        std::to_string(i));
  double worst = 0.0;
  for (std::size_t i = r; i + r < w.size(); ++i) {
    const WJet j{w.v[i], sampled_derivative(w.v, i, w.dx, 1), sampled_derivative(w.v, i, w.dx, 2),
                 0.0};
    worst = std::max(worst, std::abs(constraint_49(j, m)));
  }
  return worst;
}

double first_integral_coefficient(double m) {
  if (m == 1.0) throw DomainError("the first integral needs m != 1");
  return -m / (3.0 * (m - 1.0));
}

double first_integral_rhs(double w, double m, double K) {
  if (!(w > 0.0)) throw DomainError("first integral needs w > 0");
  const double a = first_integral_coefficient(m);
  return a * std::pow(w, m + 1.0) + a * std::pow(w, 3.0 - m) + K * w * w;
}

WOrbit first_integral_orbit(double m, double K, double w0, int sign, double x_end,
                            std::size_t samples) {
  check_span(0.0, x_end, samples);
  const double a = first_integral_coefficient(m);
  double r0 = first_integral_rhs(w0, m, K);
  if (r0 < 0.0) {
    if (r0 < -1e-14 * std::max(1.0, std::abs(K) * w0 * w0))
      throw DomainError("first integral is negative at w0: " + std::to_string(r0));
    r0 = 0.0;
  }
  using State = std::array<double, 2>;
  auto system = [=](const State& s, State& ds, double x) {
    if (!(s[0] > 0.0)) throw SingularityError(x, "orbit left w > 0");
    ds[0] = s[1];
    ds[1] = 0.5 * a * (m + 1.0) * std::pow(s[0], m) - 0.5 * a * (m - 3.0) * std::pow(s[0], 2.0 - m) +
            K * s[0];
  };
  WOrbit out;
  const State start{w0, (sign < 0 ? -1.0 : 1.0) * std::sqrt(r0)};
  sample_ode<decltype(system), State>(system, start, 0.0, x_end, samples,
                                      [&](const State& s, double x) {
                                        out.x.push_back(x);
                                        out.w.push_back(s[0]);
                                        out.wx.push_back(s[1]);
                                      });
  return out;
}

TransportCoefficients transport_coefficients(double m) {
  const double a = first_integral_coefficient(m);
  return {0.5 * a * m * (m + 1.0) + m, 0.5 * a * (m - 3.0) * (m - 2.0)};
}

double transport_speed(double w, double m, double K) {
  if (!(w > 0.0)) throw DomainError("transport speed needs w > 0");
  const auto [alpha, beta] = transport_coefficients(m);
  double tau = K;
  if (alpha != 0.0) tau += alpha * std::pow(w, m - 1.0);
  if (beta != 0.0) tau += beta * std::pow(w, 1.0 - m);
  return tau;
}

waves::PeriodicOrbit quadrature_profile(double m, double K, double w_start, int direction) {
  auto rhs = [=](double w) { return w > 0.0 ? first_integral_rhs(w, m, K) : -1.0; };
  if (rhs(w_start) < 0.0) throw DomainError("first integral is negative at the start point");
  const auto tp = waves::find_turning_points(rhs, w_start, 1e3 * (1.0 + w_start));
  if (!tp.below || !tp.above) throw DomainError("the orbit through w_start is not closed");
  return waves::PeriodicOrbit({rhs, {}}, *tp.below, *tp.above, w_start, direction);
}

double characteristics_solve(const CharacteristicsProblem& p, double x, double t,
                             std::size_t scan) {
  if (!(p.lo <= p.hi)) throw DomainError("w0 range needs lo <= hi");
  if (scan < 1) throw DomainError("scan needs at least one subinterval");
  auto phi = [&](double w) { return w - p.w0(x - transport_speed(w, p.m, p.K) * t); };
  constexpr double kTol = 1e-12;

  if (p.lo == p.hi) {
    const double r = phi(p.lo);
    if (std::abs(r) >= kTol) throw PreBreakingError("constant w0 does not match its range");
    return p.lo;
  }
  const double pad = 1e-12 * (p.hi - p.lo + std::abs(p.hi));
  const double lo = p.lo - pad;
  const double hi = p.hi + pad;

  std::vector<double> w(scan + 1), v(scan + 1);
  for (std::size_t k = 0; k <= scan; ++k) {
    w[k] = k == scan ? hi : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(scan);
    v[k] = phi(w[k]);
  }
  std::size_t roots = 0;
  std::size_t at = 0;
  for (std::size_t k = 0; k <= scan; ++k) {
    if (v[k] == 0.0) {
      ++roots;
      at = k;
    } else if (k < scan && v[k + 1] != 0.0 && (v[k] < 0.0) != (v[k + 1] < 0.0)) {
      ++roots;
      at = k;
    }
  }
  const std::string where = " at x = " + std::to_string(x) + ", t = " + std::to_string(t);
  if (roots == 0) throw PreBreakingError("w = w0(x - tau(w) t) has no root in the w0 range" + where);
  if (roots > 1)
    throw PreBreakingError("w = w0(x - tau(w) t) has " + std::to_string(roots) +
                           " roots; the solution has broken" + where);
  if (v[at] == 0.0) return w[at];

  std::uintmax_t iters = 200;
  const auto tol = boost::math::tools::eps_tolerance<double>(52);
  const auto [a, b] = boost::math::tools::toms748_solve(phi, w[at], w[at + 1], v[at], v[at + 1],
                                                        tol, iters);
  const double root = std::abs(phi(a)) <= std::abs(phi(b)) ? a : b;
  if (!(std::abs(phi(root)) < kTol))
    throw PreBreakingError("characteristic relation not resolved to 1e-12" + where);
  return root;
}

ReciprocalCheck reciprocal_pair_check(const SpaceTimeFunction& w, double m, double n,
                                      const std::vector<std::array<double, 2>>& points,
                                      double hx, double ht) {
  const SpaceTimeFunction recip = [&](double x, double t) {
    const double v = w(x, t);
    if (!(v > 0.0)) throw DomainError("reciprocal check needs w > 0");
    return 1.0 / v;
  };
  ReciprocalCheck out;
  for (const auto& [x, t] : points) {
    auto at = [&, t = t](double s) { return w(s, t); };
    const double wv = w(x, t);
    if (!(wv > 0.0)) throw DomainError("reciprocal check needs w > 0");
    const WJet j{wv, callable_derivative(at, x, hx, 1), callable_derivative(at, x, hx, 2),
                 callable_derivative(at, x, hx, 3)};
    out.res_w = std::max(out.res_w, std::abs(equation_residual(w, x, t, hx, ht, m, n)));
    out.res_recip = std::max(out.res_recip, std::abs(equation_residual(recip, x, t, hx, ht, m, n)));
    const double c = n == 1.0 ? constraint_49(j, m) : constraint_418(j, m, n);
    out.res_constraint = std::max(out.res_constraint, std::abs(c));
  }
  return out;
}

double separation_g(double n, double lambda, double c, double t) {
  if (n == 1.0) return c * std::exp(lambda * t);
  const double s = lambda * t + c;
  if (s == 0.0) throw BlowUpTimeError("lambda t + c = 0 at t = " + std::to_string(t));
  // g^{n-1} = -1/((n-1) s)
  const double base = -1.0 / ((n - 1.0) * s);
  const double p = 1.0 / (n - 1.0);
  if (base >= 0.0) return std::pow(base, p);
  if (is_integer(n - 1.0) && std::fmod(std::abs(n - 1.0), 2.0) == 1.0) return -std::pow(-base, p);
  throw DomainError("g^(n-1) = " + std::to_string(base) + " has no real root");
}

SeparationSolution separation_solve(double n, double lambda, std::array<double, 3> F0, double c,
                                    double x0, double x1, std::size_t samples) {
  check_span(x0, x1, samples);
  if (n == 0.0) throw DomainError("separation needs n != 0");
  using State = std::array<double, 3>;
  auto system = [=](const State& s, State& ds, double) {
    ds[0] = s[1];
    ds[1] = s[2];
    ds[2] = lambda == 0.0 ? -s[1] : -s[1] - lambda * real_root(s[0], n);
  };
  real_root(F0[0], n);
  SeparationSolution out;
  out.n = n;
  out.lambda = lambda;
  out.c = c;
  sample_ode<decltype(system), State>(system, F0, x0, x1, samples,
                                      [&](const State& s, double x) {
                                        out.x.push_back(x);
                                        out.F.push_back(s[0]);
                                        out.dF.push_back(s[1]);
                                        out.d2F.push_back(s[2]);
                                        out.f.push_back(real_root(s[0], n));
                                      });
  return out;
}

}  // namespace kmn::constraints
