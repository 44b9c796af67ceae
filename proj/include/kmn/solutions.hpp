#ifndef KMN_SOLUTIONS_HPP
#define KMN_SOLUTIONS_HPP

#include <array>
#include <utility>
#include <vector>

#include "kmn/model.hpp"
#include "kmn/wave_params.hpp"

// Closed-form solutions of u_t + (u^m)_x + (u^n)_xxx = 0 with analytic
// derivatives. Traveling kinds depend on the phase psi = epsilon*(k x - omega t) + a.
namespace kmn::solutions {

enum class SolutionKind {
  SineShift22,    // (2,2): (beta/2)(1 + sin(psi/2k)),       beta = 4 omega/3k
  Compacton22,    // (2,2): beta cos^2(psi/4k) on |psi| < 2 pi k, else 0
  ParabolaCap32,  // (2,3): 5 omega/4k - psi^2/30k^2
  Sn23,           // (3,2): sqrt(beta) cn^2(sqrt(sqrt(beta)/10) psi/k, 1/sqrt 2), beta = 5 omega/3k
  Sine33,         // (3,3): sqrt(beta) sin(psi/3k),          beta = 3 omega/2k
  SinSquaredM1,   // (1,1): (A^2/2)(1 - cos(Omega z)),       z = x + 4 lambda t + a
  ImplicitLog13,  // (3,1): implicit logarithmic branch, C0 = gamma = 0
  SechN1,         // (m,1): solitary wave Amp sech^p(b psi), p = 2/(m-1)
};

const char* to_string(SolutionKind k);

/// Parameters of the m = 1 family: A = 2 sqrt(c0/(4 lambda + 1)),
/// Omega = sqrt(4 lambda + 1).
struct SinSquaredParams {
  double c0 = 1.0;
  double lambda = 0.0;
  double a = 0.0;
};

class ClosedForm {
 public:
  static ClosedForm sine_shift22(const TravelingWaveParams& w);
  static ClosedForm compacton22(const TravelingWaveParams& w);
  static ClosedForm parabola_cap32(const TravelingWaveParams& w);
  static ClosedForm sn23(const TravelingWaveParams& w);
  static ClosedForm sine33(const TravelingWaveParams& w);
  static ClosedForm sin_squared_m1(const SinSquaredParams& s);
  /// Requires c = gamma = 0.
  static ClosedForm implicit_log13(const TravelingWaveParams& w);
  /// Requires m > 1 and c = gamma = 0.
  static ClosedForm sech_n1(double m, const TravelingWaveParams& w);

  SolutionKind kind() const noexcept { return kind_; }
  /// The (m, n) this member solves, with kappa = delta = 1.
  KmnParams equation() const noexcept { return equation_; }
  const TravelingWaveParams& wave() const noexcept { return wave_; }
  const SinSquaredParams& sin_squared() const noexcept { return sin_squared_; }
  bool traveling() const noexcept { return kind_ != SolutionKind::SinSquaredM1; }

  double eval(double x, double t) const;
  /// Throws EdgeError exactly on a compacton edge and NoSolutionError where
  /// the implicit branch is undefined.
  Jet eval_derivs(double x, double t) const;

 private:
  ClosedForm(SolutionKind kind, KmnParams eq, TravelingWaveParams w, SinSquaredParams s);

  // Profile and its first three derivatives in y = k x - omega t.
  std::array<double, 4> profile(double y) const;

  SolutionKind kind_;
  KmnParams equation_;
  TravelingWaveParams wave_;
  SinSquaredParams sin_squared_;
};

/// max |u_t + (u^m)_x + (u^n)_xxx| over the points, from analytic derivatives.
double residual(const ClosedForm& s, const std::vector<std::pair<double, double>>& points);

/// Left side of the implicit (3,1) relation, with A = omega/k^3, B = 1/2k^2:
///   f sqrt(A - B f^2) / (sqrt(f^2 (A - B f^2)) sqrt(A))
///     * ln(2 (A + sqrt(A) sqrt(A - B f^2)) / f).
/// The prefactor is sign(f)/sqrt(A) wherever it is defined; at f = sqrt(A/B)
/// it is 0/0 and that limit is used.
double implicit_log_lhs(double f, const TravelingWaveParams& p);

/// f in (0, sqrt(A/B)] with implicit_log_lhs(f) = epsilon*y - a. Throws
/// NoSolutionError when epsilon*y - a lies below the minimum of the left side.
double implicit_log_solve(double y, const TravelingWaveParams& p);

}  // namespace kmn::solutions

#endif  // KMN_SOLUTIONS_HPP
