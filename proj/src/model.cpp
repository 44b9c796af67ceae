#include "kmn/model.hpp"

#include <cmath>
#include <string>

#include "kmn/stencil.hpp"

namespace kmn {
namespace {

constexpr double kSingularThreshold = 1e-12;

bool is_integer(double p) { return std::isfinite(p) && p == std::nearbyint(p); }

double integer_power(double u, long e) {
  double base = e < 0 ? 1.0 / u : u;
  unsigned long k = static_cast<unsigned long>(e < 0 ? -e : e);
  double r = 1.0;
  while (k != 0) {
    if (k & 1UL) r *= base;
    base *= base;
    k >>= 1;
  }
  return r;
}

// u^e inside an operator: e == 0 gives 1 even at u == 0, negative powers at
// |u| < threshold are reported instead of regularized.
double operator_power(double u, double e) {
  if (e == 0.0) return 1.0;
  if (e < 0.0 && std::abs(u) < kSingularThreshold)
    throw DomainError("negative power u^" + std::to_string(e) + " at u = " + std::to_string(u));
  return spow(u, e);
}

void require_finite(std::span<const double> v) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i])) throw DomainError("non-finite field value at node " + std::to_string(i));
}

}  // namespace

void validate(const KmnParams& p) {
  if (!std::isfinite(p.m) || !std::isfinite(p.n) || !std::isfinite(p.kappa) ||
      !std::isfinite(p.delta))
    throw DomainError("equation parameters must be finite");
  if (p.kappa != 0.0 && p.m == 0.0) throw DomainError("m must be nonzero when kappa != 0");
  if (p.delta != 0.0 && p.n == 0.0) throw DomainError("n must be nonzero when delta != 0");
}

Grid1D::Grid1D(double x0, double dx, std::size_t npoints) : x0_(x0), dx_(dx), npoints_(npoints) {
  if (!(dx > 0.0) || !std::isfinite(dx)) throw DomainError("grid spacing must be positive");
  if (npoints < 8) throw DomainError("grid needs at least 8 points");
  if (!std::isfinite(x0)) throw DomainError("grid origin must be finite");
}

Grid1D Grid1D::periodic(double x0, double length, std::size_t npoints) {
  if (npoints == 0) throw DomainError("grid needs at least 8 points");
  return Grid1D(x0, length / static_cast<double>(npoints), npoints);
}

Field::Field(Grid1D grid, std::vector<double> values, double time)
    : grid_(grid), values_(std::move(values)), time_(time) {
  if (values_.size() != grid_.size())
    throw DomainError("field has " + std::to_string(values_.size()) + " values for " +
                      std::to_string(grid_.size()) + " grid points");
  require_finite(values_);
}

Field Field::sample(const Grid1D& grid, const std::function<double(double)>& f, double time) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.node(i));
  return Field(grid, std::move(v), time);
}

Field Field::with_values(std::vector<double> values) const {
  return Field(grid_, std::move(values), time_);
}

Field Field::at_time(double time) const { return Field(grid_, values_, time); }

double spow(double u, double p) {
  if (u == 0.0) {
    if (p <= 0.0) throw DomainError("spow(0, p) undefined for p <= 0");
    return 0.0;
  }
  if (is_integer(p) && std::abs(p) <= 64.0) return integer_power(u, static_cast<long>(p));
  const double mag = std::pow(std::abs(u), p);
  return u < 0.0 ? -mag : mag;
}

double spatial_operator(double u, double ux, double uxx, double uxxx, const KmnParams& p) {
  double acc = 0.0;
  if (p.kappa != 0.0 && p.m != 0.0) acc += p.kappa * p.m * operator_power(u, p.m - 1.0) * ux;
  if (p.delta != 0.0 && p.n != 0.0) {
    const double n = p.n;
    double disp = n * operator_power(u, n - 1.0) * uxxx;
    const double c2 = 3.0 * n * (n - 1.0);
    if (c2 != 0.0) disp += c2 * operator_power(u, n - 2.0) * ux * uxx;
    const double c3 = n * (n - 1.0) * (n - 2.0);
    if (c3 != 0.0) disp += c3 * operator_power(u, n - 3.0) * ux * ux * ux;
    acc += p.delta * disp;
  }
  return acc;
}

double pointwise_residual(const Jet& j, const KmnParams& p) {
  return j.ut + spatial_operator(j.u, j.ux, j.uxx, j.uxxx, p);
}

Field pde_rhs(const Field& u, const KmnParams& p, const Differentiator& deriv) {
  const auto ux = deriv.d1(u);
  const auto uxx = deriv.d2(u);
  const auto uxxx = deriv.d3(u);
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    try {
      out[i] = -spatial_operator(u[i], ux[i], uxx[i], uxxx[i], p);
    } catch (const DomainError& e) {
      throw SingularNodeError(i, e.what());
    }
  }
  return u.with_values(std::move(out));
}

Field pde_rhs_conservative(const Field& u, const KmnParams& p, const Differentiator& deriv) {
  std::vector<double> um(u.size()), un(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    try {
      um[i] = p.kappa != 0.0 ? spow(u[i], p.m) : 0.0;
      un[i] = p.delta != 0.0 ? spow(u[i], p.n) : 0.0;
    } catch (const DomainError& e) {
      throw SingularNodeError(i, e.what());
    }
  }
  const auto convective = deriv.d1(u.with_values(std::move(um)));
  const auto dispersive = deriv.d3(u.with_values(std::move(un)));
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = -p.kappa * convective[i] - p.delta * dispersive[i];
  return u.with_values(std::move(out));
}

ConservedSet conserved_quantities(const Field& u, const KmnParams& p,
                                  const Differentiator& deriv, bool with_energy) {
  if (with_energy && p.n != 1.0)
    throw UnsupportedLawError("energy law exists only for n = 1 (got n = " + std::to_string(p.n) + ")");
  const double dx = u.grid().dx();
  ConservedSet out;
  for (double v : u.values()) {
    out.mass += v;
    out.l2 += v * v;
  }
  out.mass *= dx;
  out.l2 *= dx;
  if (with_energy) {
    const auto ux = deriv.d1(u);
    double e = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      try {
        e += p.kappa * spow(u[i], p.m + 1.0) / (p.m + 1.0) - 0.5 * p.delta * ux[i] * ux[i];
      } catch (const DomainError& err) {
        throw SingularNodeError(i, err.what());
      }
    }
    out.energy = e * dx;
  }
  return out;
}

DensityFlux mass_law(const Jet& j, const KmnParams& p) {
  const double n = p.n;
  double unxx = n * operator_power(j.u, n - 1.0) * j.uxx;
  if (n * (n - 1.0) != 0.0) unxx += n * (n - 1.0) * operator_power(j.u, n - 2.0) * j.ux * j.ux;
  return {j.u, p.kappa * spow(j.u, p.m) + p.delta * unxx};
}

DensityFlux l2_law(const Jet& j, const KmnParams& p) {
  if (p.n != 1.0) throw UnsupportedLawError("the u^2 law is stated for n = 1");
  const double m = p.m;
  return {j.u * j.u,
          p.kappa * 2.0 * m / (m + 1.0) * spow(j.u, m + 1.0) +
              p.delta * (2.0 * j.u * j.uxx - j.ux * j.ux)};
}

DensityFlux energy_law(const Jet& j, const KmnParams& p) {
  if (p.n != 1.0) throw UnsupportedLawError("the energy law is stated for n = 1");
  const double m = p.m;
  const double k = p.kappa;
  const double d = p.delta;
  const double um = spow(j.u, m);
  const double density = k * spow(j.u, m + 1.0) / (m + 1.0) - 0.5 * d * j.ux * j.ux;
  const double flux = 0.5 * k * k * um * um +
                      k * d * (um * j.uxx - m * operator_power(j.u, m - 1.0) * j.ux * j.ux) +
                      d * d * (0.5 * j.uxx * j.uxx - j.ux * j.uxxx);
  return {density, flux};
}

double fd_residual(const SpaceTimeFunction& u, double x, double t, double hx, double ht,
                   const KmnParams& p) {
  const double ut = fd::derivative_of([&](double s) { return u(x, s); }, t, ht, 1, 6);
  const double conv = p.kappa == 0.0 ? 0.0
                                     : fd::derivative_of([&](double s) { return spow(u(s, t), p.m); },
                                                         x, hx, 1, 6);
  const double disp = p.delta == 0.0 ? 0.0
                                     : fd::derivative_of([&](double s) { return spow(u(s, t), p.n); },
                                                         x, hx, 3, 6);
  return ut + p.kappa * conv + p.delta * disp;
}

}  // namespace kmn
