#include "kmn/solutions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "kmn/elliptic.hpp"
#include "kmn/errors.hpp"

namespace kmn::solutions {
namespace {

void require_traveling(const TravelingWaveParams& w, const char* name) {
  validate(w);
  if (!(w.omega > 0.0) || !(w.k > 0.0))
    throw DomainError(std::string(name) + " needs omega > 0 and k > 0");
}

void require_solitary(const TravelingWaveParams& w, const char* name) {
  if (w.c != 0.0 || w.gamma != 0.0)
    throw DomainError(std::string(name) + " needs both integration constants equal to zero");
}

struct ImplicitCoefficients {
  double A;
  double B;
};

ImplicitCoefficients implicit_coefficients(const TravelingWaveParams& p) {
  require_traveling(p, "implicit (3,1) branch");
  require_solitary(p, "implicit (3,1) branch");
  return {p.omega / (p.k * p.k * p.k), 1.0 / (2.0 * p.k * p.k)};
}

}  // namespace

const char* to_string(SolutionKind k) {
  switch (k) {
    case SolutionKind::SineShift22: return "SineShift22";
    case SolutionKind::Compacton22: return "Compacton22";
    case SolutionKind::ParabolaCap32: return "ParabolaCap32";
    case SolutionKind::Sn23: return "Sn23";
    case SolutionKind::Sine33: return "Sine33";
    case SolutionKind::SinSquaredM1: return "SinSquaredM1";
    case SolutionKind::ImplicitLog13: return "ImplicitLog13";
    case SolutionKind::SechN1: return "SechN1";
  }
  return "unknown";
}

ClosedForm::ClosedForm(SolutionKind kind, KmnParams eq, TravelingWaveParams w, SinSquaredParams s)
    : kind_(kind), equation_(eq), wave_(w), sin_squared_(s) {}

ClosedForm ClosedForm::sine_shift22(const TravelingWaveParams& w) {
  require_traveling(w, "SineShift22");
  return {SolutionKind::SineShift22, {2.0, 2.0, 1.0, 1.0}, w, {}};
}

ClosedForm ClosedForm::compacton22(const TravelingWaveParams& w) {
  require_traveling(w, "Compacton22");
  return {SolutionKind::Compacton22, {2.0, 2.0, 1.0, 1.0}, w, {}};
}

ClosedForm ClosedForm::parabola_cap32(const TravelingWaveParams& w) {
  require_traveling(w, "ParabolaCap32");
  return {SolutionKind::ParabolaCap32, {2.0, 3.0, 1.0, 1.0}, w, {}};
}

ClosedForm ClosedForm::sn23(const TravelingWaveParams& w) {
  require_traveling(w, "Sn23");
  return {SolutionKind::Sn23, {3.0, 2.0, 1.0, 1.0}, w, {}};
}

ClosedForm ClosedForm::sine33(const TravelingWaveParams& w) {
  require_traveling(w, "Sine33");
  return {SolutionKind::Sine33, {3.0, 3.0, 1.0, 1.0}, w, {}};
}

ClosedForm ClosedForm::sin_squared_m1(const SinSquaredParams& s) {
  if (!(4.0 * s.lambda + 1.0 > 0.0)) throw DomainError("SinSquaredM1 needs 4 lambda + 1 > 0");
  if (!(s.c0 >= 0.0)) throw DomainError("SinSquaredM1 needs c0 >= 0");
  if (!std::isfinite(s.a)) throw DomainError("SinSquaredM1 shift must be finite");
  return {SolutionKind::SinSquaredM1, {1.0, 1.0, 1.0, 1.0}, {}, s};
}

ClosedForm ClosedForm::implicit_log13(const TravelingWaveParams& w) {
  implicit_coefficients(w);
  return {SolutionKind::ImplicitLog13, {3.0, 1.0, 1.0, 1.0}, w, {}};
}

ClosedForm ClosedForm::sech_n1(double m, const TravelingWaveParams& w) {
  if (!(m > 1.0) || !std::isfinite(m)) throw DomainError("SechN1 needs m > 1");
  require_traveling(w, "SechN1");
  require_solitary(w, "SechN1");
  return {SolutionKind::SechN1, {m, 1.0, 1.0, 1.0}, w, {}};
}

std::array<double, 4> ClosedForm::profile(double y) const {
  const double k = wave_.k;
  const double w = wave_.omega;
  const double e = wave_.epsilon;
  const double psi = e * y + wave_.a;
  // Derivatives below are taken in psi; odd orders pick up epsilon in y.
  std::array<double, 4> d{};
  switch (kind_) {
    case SolutionKind::SineShift22: {
      const double beta = 4.0 * w / (3.0 * k);
      const double s = std::sin(psi / (2.0 * k));
      const double c = std::cos(psi / (2.0 * k));
      d = {beta / 2.0 * (1.0 + s), beta / (4.0 * k) * c, -beta / (8.0 * k * k) * s,
           -beta / (16.0 * k * k * k) * c};
      break;
    }
    case SolutionKind::Compacton22: {
      const double edge = 2.0 * M_PI * k;
      if (std::abs(psi) == edge) throw EdgeError("derivatives requested on the compacton edge");
      if (std::abs(psi) > edge) return {0.0, 0.0, 0.0, 0.0};
      const double beta = 4.0 * w / (3.0 * k);
      const double s = std::sin(psi / (2.0 * k));
      const double c = std::cos(psi / (2.0 * k));
      d = {beta / 2.0 * (1.0 + c), -beta / (4.0 * k) * s, -beta / (8.0 * k * k) * c,
           beta / (16.0 * k * k * k) * s};
      break;
    }
    case SolutionKind::ParabolaCap32:
      d = {5.0 * w / (4.0 * k) - psi * psi / (30.0 * k * k), -psi / (15.0 * k * k),
           -1.0 / (15.0 * k * k), 0.0};
      break;
    case SolutionKind::Sn23: {
      const double beta = 5.0 * w / (3.0 * k);
      const double amp = std::sqrt(beta);
      const double q = std::sqrt(amp / 10.0) / k;
      const double kappa2 = 0.5;
      const auto j = waves::jacobi_elliptic(q * psi, std::sqrt(kappa2));
      const double s = j.sn, c = j.cn, dn = j.dn;
      d = {amp * c * c, amp * q * (-2.0 * c * s * dn),
           amp * q * q * 2.0 * (s * s * dn * dn - c * c * dn * dn + kappa2 * s * s * c * c),
           amp * q * q * q * 8.0 * c * dn * s * (kappa2 * c * c + dn * dn - kappa2 * s * s)};
      break;
    }
    case SolutionKind::Sine33: {
      const double amp = std::sqrt(3.0 * w / (2.0 * k));
      const double s = std::sin(psi / (3.0 * k));
      const double c = std::cos(psi / (3.0 * k));
      d = {amp * s, amp / (3.0 * k) * c, -amp / (9.0 * k * k) * s, -amp / (27.0 * k * k * k) * c};
      break;
    }
    case SolutionKind::SechN1: {
      const double m = equation_.m;
      const double p = 2.0 / (m - 1.0);
      const double b = (m - 1.0) / 2.0 * std::sqrt(w / (k * k * k));
      const double amp = std::pow((m + 1.0) * w / (2.0 * k), 1.0 / (m - 1.0));
      const double T = std::tanh(b * psi);
      const double Sp = std::pow(1.0 / std::cosh(b * psi), p);
      d = {amp * Sp, -p * b * amp * Sp * T, p * b * b * amp * Sp * ((p + 1.0) * T * T - 1.0),
           p * b * b * b * amp * Sp * T * ((3.0 * p + 2.0) - (p + 1.0) * (p + 2.0) * T * T)};
      break;
    }
    case SolutionKind::ImplicitLog13: {
      // Already in y: the implicit relation fixes the orientation.
      const auto [A, B] = implicit_coefficients(wave_);
      const double f = implicit_log_solve(y, wave_);
      const double fy = -e * f * std::sqrt(std::max(A - B * f * f, 0.0));
      return {f, fy, A * f - 2.0 * B * f * f * f, (A - 6.0 * B * f * f) * fy};
    }
    case SolutionKind::SinSquaredM1:
      throw DomainError("SinSquaredM1 is not a traveling profile");
  }
  d[1] *= e;
  d[3] *= e;
  return d;
}

double ClosedForm::eval(double x, double t) const {
  if (kind_ == SolutionKind::SinSquaredM1) return eval_derivs(x, t).u;
  if (kind_ == SolutionKind::Compacton22) {
    const double psi = wave_.epsilon * (wave_.k * x - wave_.omega * t) + wave_.a;
    if (std::abs(psi) >= 2.0 * M_PI * wave_.k) return 0.0;
  }
  return profile(wave_.k * x - wave_.omega * t)[0];
}

Jet ClosedForm::eval_derivs(double x, double t) const {
  if (kind_ == SolutionKind::SinSquaredM1) {
    const auto& s = sin_squared_;
    const double big_omega = std::sqrt(4.0 * s.lambda + 1.0);
    const double amp2 = 4.0 * s.c0 / (4.0 * s.lambda + 1.0);
    const double z = x + 4.0 * s.lambda * t + s.a;
    const double c = amp2 / 2.0;
    const double sn = std::sin(big_omega * z);
    const double cs = std::cos(big_omega * z);
    Jet j;
    j.u = c * (1.0 - cs);
    j.ux = c * big_omega * sn;
    j.uxx = c * big_omega * big_omega * cs;
    j.uxxx = -c * big_omega * big_omega * big_omega * sn;
    j.ut = 4.0 * s.lambda * j.ux;
    return j;
  }
  const double k = wave_.k;
  const auto d = profile(k * x - wave_.omega * t);
  Jet j;
  j.u = d[0];
  j.ux = k * d[1];
  j.uxx = k * k * d[2];
  j.uxxx = k * k * k * d[3];
  j.ut = -wave_.omega * d[1];
  return j;
}

double residual(const ClosedForm& s, const std::vector<std::pair<double, double>>& points) {
  const KmnParams eq = s.equation();
  double worst = 0.0;
  for (const auto& [x, t] : points)
    worst = std::max(worst, std::abs(pointwise_residual(s.eval_derivs(x, t), eq)));
  return worst;
}

double implicit_log_lhs(double f, const TravelingWaveParams& p) {
  const auto [A, B] = implicit_coefficients(p);
  if (!(f > 0.0)) throw DomainError("implicit (3,1) branch needs f > 0");
  double gap = A - B * f * f;
  if (gap < 0.0 && gap > -1e-14 * A) gap = 0.0;
  if (gap < 0.0) throw DomainError("implicit (3,1) branch needs f <= sqrt(A/B)");
  const double root_gap = std::sqrt(gap);
  const double num = f * root_gap;
  const double den = std::sqrt(f * f * gap) * std::sqrt(A);
  const double prefactor = den > 0.0 ? num / den : 1.0 / std::sqrt(A);
  return prefactor * std::log(2.0 * (A + std::sqrt(A) * root_gap) / f);
}

double implicit_log_solve(double y, const TravelingWaveParams& p) {
  const auto [A, B] = implicit_coefficients(p);
  const double target = p.epsilon * y - p.a;
  const double f_max = std::sqrt(A / B);
  const double floor = implicit_log_lhs(f_max, p);
  const double slack = 1e-14 * std::max(1.0, std::abs(floor));
  if (target < floor - slack)
    throw NoSolutionError("implicit (3,1) relation has no solution: epsilon*y - a = " +
                          std::to_string(target) + " is below the minimum " +
                          std::to_string(floor));
  if (target <= floor) return f_max;

  // For small f the left side behaves like ln(4A/f)/sqrt(A).
  double f_lo = std::min(0.5 * f_max, 2.0 * A * std::exp(-std::sqrt(A) * target));
  while (f_lo > 0.0 && implicit_log_lhs(f_lo, p) < target) f_lo *= 0.5;
  if (!(f_lo > 1e-300)) return 4.0 * A * std::exp(-std::sqrt(A) * target);

  auto h = [&](double f) { return implicit_log_lhs(f, p) - target; };
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      h, f_lo, f_max, h(f_lo), floor - target, boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (a + b);
}

}  // namespace kmn::solutions
