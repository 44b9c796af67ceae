#include "kmn/elliptic.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "kmn/errors.hpp"

namespace kmn::waves {

JacobiTriple jacobi_elliptic(double u, double modulus) {
  if (!(modulus >= 0.0 && modulus <= 1.0))
    throw DomainError("Jacobi modulus must lie in [0, 1]");
  if (modulus == 0.0) return {std::sin(u), std::cos(u), 1.0};
  if (modulus == 1.0) {
    const double sech = 1.0 / std::cosh(u);
    return {std::tanh(u), sech, sech};
  }

  // a_0 = 1, b_0 = k', c_0 = k; iterate until c_N is negligible.
  constexpr int kMaxLevels = 40;
  std::array<double, kMaxLevels + 1> a{}, c{};
  a[0] = 1.0;
  c[0] = modulus;
  double b = std::sqrt((1.0 - modulus) * (1.0 + modulus));
  int levels = 0;
  while (levels < kMaxLevels && std::abs(c[levels]) > std::numeric_limits<double>::epsilon() * a[levels]) {
    const double an = 0.5 * (a[levels] + b);
    c[levels + 1] = 0.5 * (a[levels] - b);
    b = std::sqrt(a[levels] * b);
    a[levels + 1] = an;
    ++levels;
  }

  double phi = std::ldexp(a[levels] * u, levels);
  for (int j = levels; j > 0; --j) phi = 0.5 * (phi + std::asin(c[j] / a[j] * std::sin(phi)));

  const double sn = std::sin(phi);
  const double cn = std::cos(phi);
  const double dn = std::sqrt(1.0 - modulus * modulus * sn * sn);
  return {sn, cn, dn};
}

double jacobi_sn(double u, double modulus) { return jacobi_elliptic(u, modulus).sn; }
double jacobi_cn(double u, double modulus) { return jacobi_elliptic(u, modulus).cn; }
double jacobi_dn(double u, double modulus) { return jacobi_elliptic(u, modulus).dn; }

}  // namespace kmn::waves
