#include "kmn/waves.hpp"

#include "kmn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

namespace kmn {

void validate(const TravelingWaveParams& w) {
  if (w.epsilon != 1 && w.epsilon != -1)
    throw DomainError("epsilon must be +1 or -1, got " + std::to_string(w.epsilon));
  if (w.k == 0.0 || !std::isfinite(w.k)) throw DomainError("wavenumber k must be nonzero");
  if (!std::isfinite(w.omega) || !std::isfinite(w.c) || !std::isfinite(w.gamma) ||
      !std::isfinite(w.a))
    throw DomainError("traveling-wave parameters must be finite");
}

}  // namespace kmn

namespace kmn::waves {
namespace {

constexpr double kQuadTol = 1e-12;
constexpr int kQuadSegments = 64;

// Globally adaptive Gauss-Kronrod: always bisects the segment with the largest
// error estimate and stops once the summed estimate is below kQuadTol times
// the integral of |f|. Round-off noise confined to a tiny segment cannot stall
// it, unlike a per-segment relative test.
double gk(const std::function<double(double)>& f, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  struct Segment {
    double a, b, value, error, l1;
  };
  auto eval = [&](double lo, double hi) {
    Segment s{lo, hi, 0.0, 0.0, 0.0};
    s.value = gauss_kronrod<double, 31>::integrate(f, lo, hi, 0, 0.0, &s.error, &s.l1);
    return s;
  };
  auto by_error = [](const Segment& x, const Segment& y) { return x.error < y.error; };
  std::vector<Segment> heap{eval(a, b)};
  double total = heap[0].value, error = heap[0].error, l1 = heap[0].l1;
  for (int n = 1; n < kQuadSegments && error > kQuadTol * l1; ++n) {
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const Segment worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    for (const Segment& s : {eval(worst.a, mid), eval(mid, worst.b)}) {
      heap.push_back(s);
      std::push_heap(heap.begin(), heap.end(), by_error);
    }
    total = error = l1 = 0.0;
    for (const Segment& s : heap) {
      total += s.value;
      error += s.error;
      l1 += s.l1;
    }
  }
  return total;
}

// Integrand value with rhs clamped at zero; a root reached by round-off
// contributes nothing.
double safe_value(const OrbitIntegrand& f, double s) {
  const double r = f.rhs(s);
  if (!(r > 0.0)) return 0.0;
  const double w = f.weight ? f.weight(s) : 1.0;
  return w / std::sqrt(r);
}

bool is_turning_point(const OrbitIntegrand& f, double e, double toward) {
  const double r_in = std::abs(f.rhs(e + 0.5 * (toward - e)));
  return std::abs(f.rhs(e)) <= 1e-10 * std::max(r_in, 1e-300);
}

// Rejects endpoint singularities that behave like |s - e|^{-p} with p near 1.
void check_endpoint(const OrbitIntegrand& f, double e, double toward) {
  const double sgn = toward > e ? 1.0 : -1.0;
  const double d1 = 1e-4 * std::abs(toward - e);
  const double d2 = d1 / 16.0;
  const double f1 = std::abs(safe_value(f, e + sgn * d1));
  const double f2 = std::abs(safe_value(f, e + sgn * d2));
  if (f1 > 0.0 && f2 > 0.0) {
    const double p = std::log(f2 / f1) / std::log(16.0);
    if (p > 0.9)
      throw DivergenceError("quadrature diverges at endpoint " + std::to_string(e) +
                            " (integrand ~ |s - e|^-" + std::to_string(p) + ")");
  }
}

// Integral from e to target via s = e + sigma tau^2. At a turning point rhs
// is round-off within a few ulps of e, while the transformed integrand is
// smooth in tau. The innermost sliver [0, tau_min] is therefore integrated
// from the cubic through j at tau_min, 2 tau_min, 3 tau_min, 4 tau_min rather
// than sampled, which also places the root where the smooth part of rhs puts
// it instead of at the rounded endpoint.
double half_piece(const OrbitIntegrand& f, double e, double target) {
  if (e == target) return 0.0;
  const double sigma = target > e ? 1.0 : -1.0;
  const double tau_max = std::sqrt(std::abs(target - e));
  auto j = [&](double tau) { return 2.0 * tau * safe_value(f, e + sigma * tau * tau); };
  if (!is_turning_point(f, e, target)) return sigma * gk(j, 0.0, tau_max);
  check_endpoint(f, e, target);
  // Only a root up to round-off, where rhs changes sign just beyond e, gets the
  // sliver; a merely small positive rhs near a farther root is sampled normally.
  if (f.rhs(e - sigma * 1e-12 * std::max(1.0, std::abs(e))) >= 0.0) return sigma * gk(j, 0.0, tau_max);

  const double h = std::min(1e-3 * std::sqrt(std::max(1.0, std::abs(e))), 0.05 * tau_max);
  const double sliver = h * (55.0 * j(h) - 59.0 * j(2.0 * h) + 37.0 * j(3.0 * h) - 9.0 * j(4.0 * h)) / 24.0;
  return sigma * (sliver + gk(j, h, tau_max));
}

constexpr std::uintmax_t kRootIterations = 200;

}  // namespace

double rhs_n1(double f, const FirstIntegral& fi) {
  const auto& w = fi.wave;
  const double m = fi.equation.m;
  const double k = w.k;
  return w.c * f + w.omega / (k * k * k) * f * f - 2.0 / (k * k * (m + 1.0)) * spow(f, m + 1.0) + w.gamma;
}

double rhs_general(double g, const FirstIntegral& fi) {
  const auto& w = fi.wave;
  const double m = fi.equation.m;
  const double n = fi.equation.n;
  const double k = w.k;
  return 2.0 * w.omega / (n * (n + 1.0) * k * k * k) * spow(g, n + 1.0) -
         2.0 / (n * (m + n) * k * k) * spow(g, m + n) + 2.0 * w.c / (n * n) * spow(g, n) + w.gamma;
}

double OrbitIntegrand::operator()(double s) const {
  const double w = weight ? weight(s) : 1.0;
  return w / std::sqrt(rhs(s));
}

OrbitIntegrand integrand(const FirstIntegral& fi) {
  validate(fi.wave);
  if (fi.kind == IntegralCase::UnitDispersion) {
    return {[fi](double f) { return rhs_n1(f, fi); }, {}};
  }
  const double n = fi.equation.n;
  return {[fi](double g) { return rhs_general(g, fi); },
          [n](double g) { return n == 1.0 ? 1.0 : (g == 0.0 ? 0.0 : spow(g, n - 1.0)); }};
}

double orbit_integral(const OrbitIntegrand& f, double from, double to) {
  if (from == to) return 0.0;
  for (int i = 1; i < 8; ++i) {
    const double s = from + (to - from) * i / 8.0;
    if (!(f.rhs(s) > 0.0))
      throw DomainError("first-integral right side is not positive at " + std::to_string(s) +
                        " between " + std::to_string(from) + " and " + std::to_string(to));
  }
  const double mid = 0.5 * (from + to);
  return half_piece(f, from, mid) - half_piece(f, to, mid);
}

double invert_orbit_integral(const OrbitIntegrand& f, const Branch& b, double phase) {
  if (!(b.lo < b.hi) || b.g_ref < b.lo || b.g_ref > b.hi)
    throw DomainError("branch must satisfy lo <= g_ref <= hi with lo < hi");
  const double target = phase - b.phase_ref;
  const double q_lo = orbit_integral(f, b.g_ref, b.lo);
  const double q_hi = orbit_integral(f, b.g_ref, b.hi);
  const double slack = 1e-12 * std::max(1.0, q_hi - q_lo);
  if (target < q_lo - slack || target > q_hi + slack)
    throw OutOfBranchError("phase " + std::to_string(phase) + " outside branch range [" +
                           std::to_string(q_lo + b.phase_ref) + ", " +
                           std::to_string(q_hi + b.phase_ref) + "]");
  if (target <= q_lo) return b.lo;
  if (target >= q_hi) return b.hi;

  auto h = [&](double g) { return orbit_integral(f, b.g_ref, g) - target; };
  std::uintmax_t iters = kRootIterations;
  const auto tol = boost::math::tools::eps_tolerance<double>(52);
  const auto [x0, x1] =
      boost::math::tools::toms748_solve(h, b.lo, b.hi, q_lo - target, q_hi - target, tol, iters);
  const double g = 0.5 * (x0 + x1);
  return g;
}

double quadrature_y_of_g(double g, const FirstIntegral& fi, double g_ref) {
  return orbit_integral(integrand(fi), g_ref, g);
}

double invert_quadrature(double y, const FirstIntegral& fi, const Branch& b) {
  const double phase = fi.wave.epsilon * y + fi.wave.a;
  return invert_orbit_integral(integrand(fi), b, phase);
}

TurningPoints find_turning_points(const std::function<double(double)>& rhs, double g0,
                                  double max_extent) {
  if (rhs(g0) < 0.0) throw DomainError("first-integral right side is negative at the start point");
  const double h0 = 1e-8 * std::max(1.0, std::abs(g0));
  const double h_cap = max_extent / 256.0;

  auto search = [&](double dir) -> std::optional<double> {
    double prev = g0;
    double h = h0;
    while (std::abs(prev - g0) < max_extent) {
      const double s = g0 + dir * std::min(std::abs(prev - g0) + h, max_extent);
      const double r = rhs(s);
      if (r < 0.0) {
        if (rhs(prev) == 0.0) return prev;
        std::uintmax_t iters = kRootIterations;
        const auto tol = boost::math::tools::eps_tolerance<double>(52);
        const auto [a, b] = boost::math::tools::toms748_solve(rhs, std::min(prev, s),
                                                              std::max(prev, s), tol, iters);
        // Keep the point on the non-negative side.
        const double lo = std::min(a, b);
        const double hi = std::max(a, b);
        return dir > 0 ? (rhs(hi) >= 0.0 ? hi : lo) : (rhs(lo) >= 0.0 ? lo : hi);
      }
      prev = s;
      h = std::min(2.0 * h, h_cap);
    }
    return std::nullopt;
  };
  return {search(-1.0), search(1.0)};
}

PeriodicOrbit::PeriodicOrbit(OrbitIntegrand f, double lo, double hi, double g0, int direction)
    : f_(std::move(f)), lo_(lo), hi_(hi) {
  if (!(lo < hi)) throw DomainError("periodic orbit needs lo < hi");
  if (g0 < lo || g0 > hi) throw DomainError("orbit start lies outside its turning points");
  half_period_ = orbit_integral(f_, lo_, hi_);
  const double q0 = orbit_integral(f_, lo_, g0);
  start_ = direction > 0 ? q0 : 2.0 * half_period_ - q0;
}

double PeriodicOrbit::cycle_position(double phase) const {
  const double p = period();
  double theta = std::fmod(start_ + phase, p);
  if (theta < 0.0) theta += p;
  return theta;
}

double PeriodicOrbit::eval(double phase) const {
  const double theta = cycle_position(phase);
  const Branch rising{lo_, hi_, lo_, 0.0};
  if (theta <= half_period_) return invert_orbit_integral(f_, rising, theta);
  return invert_orbit_integral(f_, rising, period() - theta);
}

int PeriodicOrbit::direction(double phase) const {
  return cycle_position(phase) <= half_period_ ? 1 : -1;
}

}  // namespace kmn::waves
