#ifndef KMN_CONSTRAINTS_HPP
#define KMN_CONSTRAINTS_HPP

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "kmn/model.hpp"
#include "kmn/poly3.hpp"
#include "kmn/waves.hpp"

// Differential constraints for u_t + (u^m)_x + (u^n)_xxx = 0 (n = 1 unless
// stated otherwise): a Schrodinger-type constraint that factors the equation
// into a transport law, reciprocal solutions u = 1/w, the quasilinear equation
// their first integral leads to, and separation of variables for m = n.
namespace kmn::constraints {

using symmetry::Rational;

enum class ConstraintKind {
  Schrodinger41,
  Reciprocal49,
  FirstIntegral412,
  Transport414,
  ReciprocalN418,
  Separation420,
};

struct ConstraintSpec {
  ConstraintKind kind = ConstraintKind::Schrodinger41;
  double m = 2.0;
  double n = 1.0;
  double lambda = 0.0;
  double K = 0.0;
};

/// Throws DomainError if a reciprocal or first-integral spec has m = 1.
void validate(const ConstraintSpec& s);

/// Uniform samples v[i] = f(x0 + i dx) of a function on a bounded interval.
/// Residuals are evaluated on interior nodes only.
struct Samples {
  double x0 = 0.0;
  double dx = 1.0;
  std::vector<double> v;

  double x(std::size_t i) const noexcept { return x0 + static_cast<double>(i) * dx; }
  std::size_t size() const noexcept { return v.size(); }

  static Samples of(const std::function<double(double)>& f, double x0, double x1,
                    std::size_t npoints);
};

/// Space-time samples v[j][i] = f(x0 + i dx, t0 + j dt).
struct SpaceTimeSamples {
  double x0 = 0.0;
  double dx = 1.0;
  double t0 = 0.0;
  double dt = 1.0;
  std::vector<std::vector<double>> v;

  static SpaceTimeSamples of(const SpaceTimeFunction& f, double x0, double x1, std::size_t nx,
                             double t0, double t1, std::size_t nt);
};

/// Solution of a + b = m, q(m-1) + b/2 = 0, 4q + a = 0.
struct SplittingConstants {
  Rational a;
  Rational b;
  Rational q;
};

/// Exact solution of the linear system above; DomainError at m = -1.
SplittingConstants schrodinger_constants(Rational m);

/// max |psi_xx + (m/(2(m+1)) u^{m-1} + lambda) psi| over interior nodes, with a
/// 4th-order psi_xx. Throws SingularNodeError where u = 0 meets m < 1 and
/// DomainError for u < 0 with non-integer m - 1.
double schrodinger_residual(const Samples& psi, const Samples& u, double m, double lambda);

/// max |f (g_t - 4 lambda g_x) + g (f_t - 4 lambda f_x)| over interior nodes of
/// the interior time levels. Needs at least three time levels; t-derivatives
/// are 4th order from five levels on, 2nd order otherwise.
double factored_transport_residual(const SpaceTimeSamples& f, const SpaceTimeSamples& g,
                                   double lambda);

/// phi' ^2 = C0 - |phi|^{2m}/(2(m+1)) - lambda phi^2.
double phi_first_integral(double phi, double m, double lambda, double C0);

struct PhiOrbit {
  std::vector<double> y;
  /// phi'' = -m/(2(m+1)) phi^{2m-1} - lambda phi integrated directly.
  std::vector<double> ode;
  /// Inversion of the quadrature y + a = integral d phi / sqrt(first integral).
  std::vector<double> quadrature;
};

/// Both paths on [0, y_end] with `samples` nodes, starting from (phi, phi').
/// phi^{2m-1} is the odd extension sign(phi)|phi|^{2m-1}. Throws
/// InconsistencyError when phi0 misses the first integral by more than
/// 1e-10 (1 + |C0|), and DomainError when the orbit through phi0 is not closed.
PhiOrbit phi_orbit(double m, double lambda, double C0, std::array<double, 2> phi0, double y_end,
                   std::size_t samples = 2001);

/// Pointwise derivatives of w at one x.
struct WJet {
  double w = 1.0;
  double wx = 0.0;
  double wxx = 0.0;
  double wxxx = 0.0;
};

/// w_xx - w_x^2/w + (m/6) w (w^{m-1} - w^{1-m}).
double constraint_49(const WJet& j, double m);

/// (w^n - w^{2-n}) w_xxx
///   + [3((n+1) w^{1-n} + (n-1) w^{n-1}) w_xx + (m/n)(w^m - w^{2-m})] w_x
///   + (w^{n-2}(n^2-3n+2) - w^{-n}(n^2+3n+2)) w_x^3.
/// At n = 1 this equals 6 w_x constraint_49.
double constraint_418(const WJet& j, double m, double n);

/// max |constraint_49| over interior nodes with 4th-order derivatives.
/// DomainError if any sample is <= 0.
double reciprocal_constraint_residual(const Samples& w, double m);

/// The common coefficient a = b = -m/(3(m-1)) of the first integral.
double first_integral_coefficient(double m);

/// a w^{m+1} + b w^{3-m} + K w^2 = w_x^2 on an orbit.
double first_integral_rhs(double w, double m, double K);

struct WOrbit {
  std::vector<double> x;
  std::vector<double> w;
  std::vector<double> wx;
};

/// Orbit of the first integral from w(0) = w0 with w_x(0) = sign sqrt(rhs(w0)),
/// sampled on [0, x_end]. Integrated as the second-order equation obtained by
/// differentiating the first integral, so turning points are passed smoothly.
/// DomainError if rhs(w0) < 0, w0 <= 0 or m = 1.
WOrbit first_integral_orbit(double m, double K, double w0, int sign, double x_end,
                            std::size_t samples = 2001);

/// alpha = (a/2) m (m+1) + m, beta = (b/2)(m-3)(m-2).
struct TransportCoefficients {
  double alpha;
  double beta;
};
TransportCoefficients transport_coefficients(double m);

/// tau(w) = alpha w^{m-1} + beta w^{1-m} + K; DomainError for w <= 0.
double transport_speed(double w, double m, double K);

/// Initial data w0 generated by the quadrature of the first integral: the
/// closed orbit through w_start, moving up if direction > 0.
waves::PeriodicOrbit quadrature_profile(double m, double K, double w_start, int direction);

struct CharacteristicsProblem {
  std::function<double(double)> w0;
  /// Range of w0; the solution of w = w0(x - tau(w) t) lies inside it.
  double lo;
  double hi;
  double m;
  double K;
};

/// w with w = w0(x - tau(w) t) and |Phi| < 1e-12. Phi is scanned on
/// `scan` subintervals of [lo, hi]; anything other than a single sign change
/// (no root, or several roots after breaking) throws PreBreakingError.
double characteristics_solve(const CharacteristicsProblem& p, double x, double t,
                             std::size_t scan = 256);

struct ReciprocalCheck {
  double res_w = 0.0;
  double res_recip = 0.0;
  double res_constraint = 0.0;
};

/// FD residuals at each (x, t) point (6th order, spacings hx, ht): w and 1/w
/// against the equation with exponents (m, n), and w against constraint_49
/// (n = 1) or constraint_418. Maxima over the points. DomainError if w <= 0.
ReciprocalCheck reciprocal_pair_check(const SpaceTimeFunction& w, double m, double n,
                                      const std::vector<std::array<double, 2>>& points,
                                      double hx, double ht);

/// g with g' = lambda g^n: (n-1) g^{n-1} = -1/(lambda t + c) for n != 1, taking
/// the real root (positive for even roots); c e^{lambda t} for n = 1.
/// BlowUpTimeError where lambda t + c = 0, DomainError where no real root exists.
double separation_g(double n, double lambda, double c, double t);

struct SeparationSolution {
  std::vector<double> x;
  /// F = f^n and its first two derivatives.
  std::vector<double> F;
  std::vector<double> dF;
  std::vector<double> d2F;
  std::vector<double> f;
  double n;
  double lambda;
  double c;

  double g(double t) const { return separation_g(n, lambda, c, t); }
};

/// Integrates F' + F''' + lambda F^{1/n} = 0 from (F, F', F'') at x0 to x1 and
/// returns f = F^{1/n}. Negative F is allowed only for odd integer n;
/// otherwise DomainError.
SeparationSolution separation_solve(double n, double lambda, std::array<double, 3> F0,
                                    double c, double x0, double x1,
                                    std::size_t samples = 2001);

}  // namespace kmn::constraints

#endif  // KMN_CONSTRAINTS_HPP
