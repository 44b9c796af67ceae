#ifndef KMN_WAVES_HPP
#define KMN_WAVES_HPP

#include <functional>
#include <optional>

#include "kmn/model.hpp"
#include "kmn/wave_params.hpp"

// Traveling-wave first integrals of the K(m,n) equation and the quadratures
// they reduce to. With u = g(y), y = k x - omega t, two integrations give
//
//   n = 1:      f_y^2 = C0 f + (omega/k^3) f^2 - 2/(k^2 (m+1)) f^{m+1} + gamma
//   general n:  (g^{n-1} g_y)^2 = 2 omega/(n(n+1)k^3) g^{n+1}
//                                 - 2/(n(m+n)k^2) g^{m+n} + 2C/n^2 g^n + gamma
//
// and separating variables, epsilon*y + a = integral of g^{n-1} dg / sqrt(rhs).
namespace kmn::waves {

enum class IntegralCase { UnitDispersion, General };

struct FirstIntegral {
  IntegralCase kind = IntegralCase::General;
  KmnParams equation;
  TravelingWaveParams wave;
};

/// Right side of the n = 1 first integral (value of f_y^2).
double rhs_n1(double f, const FirstIntegral& fi);

/// Right side of the general-n first integral (value of (g^{n-1} g_y)^2).
double rhs_general(double g, const FirstIntegral& fi);

/// Integrand weight(s) / sqrt(rhs(s)) of a separated first-order ODE.
/// An empty weight means 1.
struct OrbitIntegrand {
  std::function<double(double)> rhs;
  std::function<double(double)> weight;

  double operator()(double s) const;
};

OrbitIntegrand integrand(const FirstIntegral& fi);

/// Integral of weight/sqrt(rhs) from `from` to `to`. Both halves are mapped
/// through s = e +- tau^2 at their endpoint e, which removes inverse
/// square-root singularities at simple roots of rhs; the smooth remainder is
/// integrated by adaptive Gauss-Kronrod. Throws DivergenceError when an
/// endpoint singularity is not integrable (double root) and DomainError when
/// rhs is not positive inside the interval.
double orbit_integral(const OrbitIntegrand& f, double from, double to);

/// A monotone branch of an orbit: g in [lo, hi], phase `phase_ref` at g_ref.
/// The phase grows with g (weight > 0), so a decreasing profile is selected by
/// epsilon = -1 in the phase epsilon*y + a.
struct Branch {
  double lo;
  double hi;
  double g_ref;
  double phase_ref = 0.0;
};

/// g on the branch with orbit_integral(g_ref, g) = phase - phase_ref, to
/// |residual| < 1e-10. Throws OutOfBranchError beyond the branch range.
double invert_orbit_integral(const OrbitIntegrand& f, const Branch& b, double phase);

/// y(g) - y(g_ref) in phase units: the quadrature from g_ref to g.
double quadrature_y_of_g(double g, const FirstIntegral& fi, double g_ref);

/// g(y) on the branch, using the phase epsilon*y + a from fi.wave.
double invert_quadrature(double y, const FirstIntegral& fi, const Branch& b);

/// Nearest roots of rhs below and above g0 (with rhs(g0) >= 0), searched up to
/// `max_extent` away. Roots of even multiplicity are not sign changes and are
/// not reported.
struct TurningPoints {
  std::optional<double> below;
  std::optional<double> above;
};
TurningPoints find_turning_points(const std::function<double(double)>& rhs, double g0,
                                  double max_extent);

/// Closed orbit between two simple turning points, unfolded over all phases:
/// the state runs lo -> hi on the rising half and back on the falling half.
class PeriodicOrbit {
 public:
  /// Starts at g0 at phase 0, moving up if direction > 0.
  PeriodicOrbit(OrbitIntegrand f, double lo, double hi, double g0, int direction);

  double half_period() const noexcept { return half_period_; }
  double period() const noexcept { return 2.0 * half_period_; }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

  double eval(double phase) const;
  /// +1 on the rising half, -1 on the falling half.
  int direction(double phase) const;

 private:
  double cycle_position(double phase) const;

  OrbitIntegrand f_;
  double lo_;
  double hi_;
  double half_period_;
  double start_;
};

}  // namespace kmn::waves

#endif  // KMN_WAVES_HPP
