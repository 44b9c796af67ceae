#include "kmn/stencil.hpp"

#include <array>
#include <stdexcept>

namespace kmn::fd {
namespace {

constexpr std::array<double, 3> kD1o2{-0.5, 0.0, 0.5};
constexpr std::array<double, 5> kD1o4{1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12};
constexpr std::array<double, 7> kD1o6{-1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0, 3.0 / 4, -3.0 / 20, 1.0 / 60};

constexpr std::array<double, 3> kD2o2{1.0, -2.0, 1.0};
constexpr std::array<double, 5> kD2o4{-1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12};
constexpr std::array<double, 7> kD2o6{1.0 / 90, -3.0 / 20, 3.0 / 2, -49.0 / 18, 3.0 / 2, -3.0 / 20, 1.0 / 90};

constexpr std::array<double, 5> kD3o2{-0.5, 1.0, 0.0, -1.0, 0.5};
constexpr std::array<double, 7> kD3o4{1.0 / 8, -1.0, 13.0 / 8, 0.0, -13.0 / 8, 1.0, -1.0 / 8};
constexpr std::array<double, 9> kD3o6{-7.0 / 240, 3.0 / 10, -169.0 / 120, 61.0 / 30, 0.0,
                                      -61.0 / 30, 169.0 / 120, -3.0 / 10, 7.0 / 240};

double inverse_power(double dx, int deriv) {
  double p = dx;
  for (int k = 1; k < deriv; ++k) p *= dx;
  return 1.0 / p;
}

}  // namespace

std::span<const double> stencil_weights(int deriv, int order) {
  switch (deriv * 10 + order) {
    case 12: return kD1o2;
    case 14: return kD1o4;
    case 16: return kD1o6;
    case 22: return kD2o2;
    case 24: return kD2o4;
    case 26: return kD2o6;
    case 32: return kD3o2;
    case 34: return kD3o4;
    case 36: return kD3o6;
    default: break;
  }
  throw std::invalid_argument("unsupported stencil: derivative " + std::to_string(deriv) +
                              ", order " + std::to_string(order));
}

int stencil_radius(int deriv, int order) {
  return static_cast<int>(stencil_weights(deriv, order).size() / 2);
}

namespace {

// Weights are symmetric (even derivative) or antisymmetric (odd), so the sum
// pairs u[i+j] with u[i-j]. Constants then give exactly zero and odd data
// exactly odd output.
template <class At>
double paired_sum(std::span<const double> w, int deriv, At at) {
  const int r = static_cast<int>(w.size() / 2);
  const bool odd = deriv % 2 == 1;
  const double centre = odd ? 0.0 : at(0);
  double acc = 0.0;
  for (int j = r; j >= 1; --j) {
    const double a = at(j), b = at(-j);
    acc += w[r + j] * (odd ? a - b : (a - centre) + (b - centre));
  }
  return acc;
}

template <int R, bool Odd>
void periodic_loop(const double* p, int n, const double* w, double scale, double* out) {
  auto one = [&](int i, auto at) {
    const double centre = Odd ? 0.0 : at(0);
    double acc = 0.0;
    for (int j = R; j >= 1; --j) {
      const double a = at(j), b = at(-j);
      acc += w[R + j] * (Odd ? a - b : (a - centre) + (b - centre));
    }
    out[i] = scale * acc;
  };
  auto wrapped = [&](int i) { one(i, [&](int j) { return p[((i + j) % n + n) % n]; }); };
  for (int i = 0; i < R; ++i) wrapped(i);
  for (int i = R; i < n - R; ++i) one(i, [&](int j) { return p[i + j]; });
  for (int i = n - R; i < n; ++i) wrapped(i);
}

}  // namespace

void periodic_derivative(std::span<const double> u, double dx, int deriv, int order,
                         std::span<double> out) {
  const int r = stencil_radius(deriv, order);
  if (static_cast<int>(u.size()) < 2 * r + 1)
    throw std::invalid_argument("periodic grid too small for stencil");
  if (out.size() != u.size()) throw std::invalid_argument("output size mismatch");
  const double scale = inverse_power(dx, deriv);
  const double* w = stencil_weights(deriv, order).data();
  const int n = static_cast<int>(u.size());
  const bool odd = deriv % 2 == 1;
  switch (r * 2 + (odd ? 1 : 0)) {
    case 2: return periodic_loop<1, false>(u.data(), n, w, scale, out.data());
    case 3: return periodic_loop<1, true>(u.data(), n, w, scale, out.data());
    case 4: return periodic_loop<2, false>(u.data(), n, w, scale, out.data());
    case 5: return periodic_loop<2, true>(u.data(), n, w, scale, out.data());
    case 6: return periodic_loop<3, false>(u.data(), n, w, scale, out.data());
    case 7: return periodic_loop<3, true>(u.data(), n, w, scale, out.data());
    case 9: return periodic_loop<4, true>(u.data(), n, w, scale, out.data());
    default: throw std::logic_error("no periodic kernel for this stencil");
  }
}

std::vector<double> periodic_derivative(std::span<const double> u, double dx, int deriv,
                                        int order) {
  std::vector<double> out(u.size());
  periodic_derivative(u, dx, deriv, order, out);
  return out;
}

double interior_derivative(std::span<const double> u, std::size_t i, double dx, int deriv,
                           int order) {
  const auto w = stencil_weights(deriv, order);
  const std::size_t r = w.size() / 2;
  if (i < r || i + r >= u.size()) throw std::out_of_range("stencil leaves the sampled window");
  return paired_sum(w, deriv, [&](int j) { return u[static_cast<std::ptrdiff_t>(i) + j]; }) * inverse_power(dx, deriv);
}

double derivative_of(const std::function<double(double)>& f, double x, double h, int deriv,
                     int order) {
  const auto w = stencil_weights(deriv, order);
  return paired_sum(w, deriv, [&](int j) { return f(x + j * h); }) *
         inverse_power(h, deriv);
}

}  // namespace kmn::fd
