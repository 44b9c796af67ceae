#ifndef KMN_WAVE_PARAMS_HPP
#define KMN_WAVE_PARAMS_HPP

namespace kmn {

/// Traveling-wave data for u(x, t) = g(y), y = k x - omega t. `c` is the
/// first integration constant (C0 when n = 1, C otherwise), `gamma` the second,
/// `a` the phase shift and `epsilon` = +-1 the branch sign; the profile is a
/// function of the phase epsilon*y + a.
struct TravelingWaveParams {
  double k = 1.0;
  double omega = 1.0;
  double c = 0.0;
  double gamma = 0.0;
  double a = 0.0;
  int epsilon = 1;
};

/// Throws DomainError unless epsilon is +-1 and k != 0.
void validate(const TravelingWaveParams& w);

}  // namespace kmn

#endif  // KMN_WAVE_PARAMS_HPP
