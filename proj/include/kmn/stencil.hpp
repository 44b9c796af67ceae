#ifndef KMN_STENCIL_HPP
#define KMN_STENCIL_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

// Central finite-difference stencils shared by the solver and the residual
// checks. Periodic variants wrap indices; interior variants need a margin of
// `stencil_radius(deriv, order)` nodes on each side.
namespace kmn::fd {

/// Half-width of the central stencil for the given derivative and accuracy.
/// Supported: deriv in {1, 2, 3}, order in {2, 4, 6}.
int stencil_radius(int deriv, int order);

/// Weights w[j], j = 0..2r, applied to u[i - r + j]; divide by dx^deriv.
std::span<const double> stencil_weights(int deriv, int order);

void periodic_derivative(std::span<const double> u, double dx, int deriv, int order,
                         std::span<double> out);
std::vector<double> periodic_derivative(std::span<const double> u, double dx, int deriv,
                                        int order);

double interior_derivative(std::span<const double> u, std::size_t i, double dx, int deriv,
                           int order);

/// Central difference of a callable at x with spacing h.
double derivative_of(const std::function<double(double)>& f, double x, double h, int deriv,
                     int order);

}  // namespace kmn::fd

#endif  // KMN_STENCIL_HPP
