#ifndef KMN_SYMMETRY_HPP
#define KMN_SYMMETRY_HPP

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "kmn/model.hpp"
#include "kmn/poly3.hpp"

namespace kmn::symmetry {

enum class SymmetryCase {
  Generic,    // n = 1, m not in {1, 2}: translations and a scaling
  Linear,     // n = 1, m = 1
  Quadratic,  // n = 1, m = 2: adds the Galilean boost
  GeneralN,   // n != 1: translations only, ordered {d/dt, d/dx}
};

SymmetryCase classify(Rational m, Rational n);

struct SymmetryAlgebra {
  SymmetryCase kind;
  std::vector<PolyVectorField> fields;
  /// False for m = 0, n = 1, where the algebra is only partially known.
  bool complete = true;
};

/// Spanning fields of the point-symmetry algebra:
///   n = 1, m not in {0, 1, 2}: d/dx, d/dt, x d/dx + 3t d/dt - 2/(m-1) u d/du
///   n = 1, m = 1:              d/dx, d/dt, (u + 1) d/du
///   n = 1, m = 2:              d/dx, d/dt, 2t d/dx + d/du, x d/dx + 3t d/dt - 2u d/du
///   n = 1, m = 0:              d/dx, d/dt, x d/dx + 3t d/dt   (complete = false)
///   n != 1:                    d/dt, d/dx
SymmetryAlgebra table1_fields(Rational m, Rational n);

/// A pointwise solution with its derivatives.
using SolutionFn = std::function<Jet(double x, double t)>;

/// One exponentiated generator of the algebra for `kind`; `generator`
/// indexes the list returned by table1_fields. `m` is used by the Generic
/// scaling only.
struct GroupTransform {
  SymmetryCase kind;
  int generator;
  double epsilon;
  double m = 3.0;
};

/// Number of generators available for a case.
int generator_count(SymmetryCase kind);

/// The transformed solution, with derivatives carried through by the chain rule:
///   translations   f(x - e, t), f(x, t - e)
///   Generic scale  e^{-2e/(m-1)} f(e^{-e} x, e^{-3e} t)
///   Linear         e^{-e} f + e
///   Galilean       f(x - 2 e t, t) + e
///   Quadratic scale e^{-2e} f(e^{-e} x, e^{-3e} t)
SolutionFn apply_transform(const GroupTransform& g, SolutionFn f);

/// Sampled solution of the reduced equation
///   v''' + m v^{m-1} v' - (1/3) chi v' - alpha v = 0,  alpha = 2/(3(m-1)),
/// on a uniform chi grid in ascending order.
struct ReducedProfile {
  double m = 2.0;
  std::vector<double> chi;
  std::vector<double> v;
  std::vector<double> dv;
  std::vector<double> d2v;
  std::vector<double> d3v;

  double lo() const { return chi.front(); }
  double hi() const { return chi.back(); }
  /// Cubic Hermite interpolation of (v, v'). Throws ExtrapolationError off the span.
  double value(double c) const;
};

struct ReductionOptions {
  double rtol = 1e-10;
  double atol = 1e-10;
  std::size_t samples = 4001;
};

double similarity_alpha(double m);

/// v''' from the reduced equation.
double reduced_third_derivative(double m, double chi, double v, double dv);

/// Integrates the reduced equation from (v, v', v'') = v0 at chi0 to chi1
/// (either direction) with an adaptive Dormand-Prince 5(4) stepper that lands
/// on every sample node. Throws SingularityError where v^{m-1} is undefined.
ReducedProfile similarity_reduce(double m, const std::array<double, 3>& v0, double chi0,
                                 double chi1, const ReductionOptions& opt = {});

/// u(x, t) = t^{-alpha} v(t^{-1/3} x).
double lift_value(const ReducedProfile& v, double x, double t);

/// The lifted field on a grid; t > 0.
Field lift(const ReducedProfile& v, double t, const Grid1D& grid);

}  // namespace kmn::symmetry

#endif  // KMN_SYMMETRY_HPP
