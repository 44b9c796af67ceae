#ifndef KMN_MODEL_HPP
#define KMN_MODEL_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "kmn/errors.hpp"

// The K(m,n) equation
//
//     u_t + kappa (u^m)_x + delta (u^n)_xxx = 0
//
// together with its residual operators and conservation laws. kappa = delta = 1
// is the fully nonlinear KdV family; n = 1 gives u_t + u_xxx + m u^{m-1} u_x = 0.
namespace kmn {

struct KmnParams {
  double m = 2.0;
  double n = 2.0;
  double kappa = 1.0;
  double delta = 1.0;
};

/// Throws DomainError when an active term has a zero exponent or a value is
/// not finite.
void validate(const KmnParams& p);

/// Uniform grid x_i = x0 + i*dx, i in [0, npoints). Periodic with period
/// npoints*dx.
class Grid1D {
 public:
  Grid1D(double x0, double dx, std::size_t npoints);

  /// `npoints` cells covering [x0, x0 + length).
  static Grid1D periodic(double x0, double length, std::size_t npoints);

  double x0() const noexcept { return x0_; }
  double dx() const noexcept { return dx_; }
  std::size_t size() const noexcept { return npoints_; }
  bool is_periodic() const noexcept { return true; }
  double length() const noexcept { return dx_ * static_cast<double>(npoints_); }
  double node(std::size_t i) const noexcept { return x0_ + static_cast<double>(i) * dx_; }

 private:
  double x0_;
  double dx_;
  std::size_t npoints_;
};

/// Samples of u(., t) on a grid. All values are finite.
class Field {
 public:
  Field(Grid1D grid, std::vector<double> values, double time = 0.0);

  static Field sample(const Grid1D& grid, const std::function<double(double)>& f,
                      double time = 0.0);

  const Grid1D& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  double time() const noexcept { return time_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }

  /// Same grid and time, new values (validated).
  Field with_values(std::vector<double> values) const;
  Field at_time(double time) const;

 private:
  Grid1D grid_;
  std::vector<double> values_;
  double time_;
};

/// sign(u)|u|^p, computed exactly by repeated multiplication for integer p.
/// spow(0, p) = 0 for p > 0; p <= 0 with u = 0 is a DomainError.
double spow(double u, double p);

/// Pointwise derivatives of a solution candidate at one (x, t).
struct Jet {
  double u = 0.0;
  double ux = 0.0;
  double uxx = 0.0;
  double uxxx = 0.0;
  double ut = 0.0;
};

/// kappa (u^m)_x + delta (u^n)_xxx from pointwise derivatives, expanded by
/// the chain rule. Terms whose coefficient vanishes are skipped, so e.g.
/// u^{n-3} is never evaluated for n = 2. Throws DomainError if a negative
/// power is needed where |u| < 1e-12.
double spatial_operator(double u, double ux, double uxx, double uxxx, const KmnParams& p);

/// u_t + kappa (u^m)_x + delta (u^n)_xxx.
double pointwise_residual(const Jet& j, const KmnParams& p);

/// Provides x-derivatives of a periodic field.
class Differentiator {
 public:
  virtual ~Differentiator() = default;
  virtual std::vector<double> d1(const Field& u) const = 0;
  virtual std::vector<double> d2(const Field& u) const = 0;
  virtual std::vector<double> d3(const Field& u) const = 0;
};

/// u_t implied by the equation, assembled from the fully expanded form
///   -kappa m u^{m-1}u_x - delta[n(n-1)(n-2)u^{n-3}u_x^3 + 3n(n-1)u^{n-2}u_x u_xx + n u^{n-1}u_xxx].
/// Throws SingularNodeError with the offending node index.
Field pde_rhs(const Field& u, const KmnParams& p, const Differentiator& deriv);

/// The same u_t in conservative form -kappa D1(u^m) - delta D3(u^n); the sum
/// of its values is zero to round-off on a periodic grid.
Field pde_rhs_conservative(const Field& u, const KmnParams& p, const Differentiator& deriv);

struct ConservedSet {
  double mass = 0.0;
  double l2 = 0.0;
  std::optional<double> energy;
};

/// Periodic rectangle-rule integrals of u, u^2 and (when `with_energy`)
/// kappa u^{m+1}/(m+1) - delta u_x^2/2. The energy law only exists for n = 1;
/// requesting it otherwise throws UnsupportedLawError.
ConservedSet conserved_quantities(const Field& u, const KmnParams& p,
                                  const Differentiator& deriv, bool with_energy);

struct DensityFlux {
  double density = 0.0;
  double flux = 0.0;
};

/// density u, flux kappa u^m + delta (u^n)_xx. Valid for every (m, n).
DensityFlux mass_law(const Jet& j, const KmnParams& p);

/// density u^2, flux kappa 2m/(m+1) u^{m+1} + delta(2u u_xx - u_x^2). n = 1 only.
DensityFlux l2_law(const Jet& j, const KmnParams& p);

/// density kappa u^{m+1}/(m+1) - delta u_x^2/2 with flux
///   kappa^2 u^{2m}/2 + kappa delta (u^m u_xx - m u^{m-1} u_x^2)
///   + delta^2 (u_xx^2/2 - u_x u_xxx).
/// At kappa = delta = 1 this is the printed third law term for term. n = 1 only.
DensityFlux energy_law(const Jet& j, const KmnParams& p);

/// Space-time callable u(x, t).
using SpaceTimeFunction = std::function<double(double, double)>;

/// Residual of the equation at (x, t) with every derivative replaced by a
/// 6th-order central difference (spacing hx in x, ht in t).
double fd_residual(const SpaceTimeFunction& u, double x, double t, double hx, double ht,
                   const KmnParams& p);

}  // namespace kmn

#endif  // KMN_MODEL_HPP
