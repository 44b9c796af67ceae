#ifndef KMN_POLY3_HPP
#define KMN_POLY3_HPP

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/rational.hpp>

namespace kmn::symmetry {

using Rational = boost::rational<long long>;

/// Exponents (i, j, l) of x^i t^j u^l.
using Monomial = std::array<int, 3>;

enum Variable { X = 0, T = 1, U = 2 };

/// Sparse polynomial in (x, t, u) with exact rational coefficients. Zero
/// coefficients are never stored, so equality is structural.
class Poly3 {
 public:
  Poly3() = default;
  static Poly3 constant(Rational c);
  static Poly3 monomial(Rational c, int i, int j, int l);
  static Poly3 var(Variable v) { return monomial(1, v == X, v == T, v == U); }

  const std::map<Monomial, Rational>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  Rational coefficient(const Monomial& e) const;
  std::size_t degree_in(Variable v) const;

  Poly3 derivative(Variable v) const;
  double evaluate(double x, double t, double u) const;

  Poly3& operator+=(const Poly3& o);
  Poly3& operator-=(const Poly3& o);
  Poly3& operator*=(Rational c);
  friend Poly3 operator+(Poly3 a, const Poly3& b) { return a += b; }
  friend Poly3 operator-(Poly3 a, const Poly3& b) { return a -= b; }
  friend Poly3 operator*(Poly3 a, Rational c) { return a *= c; }
  friend Poly3 operator*(Rational c, Poly3 a) { return a *= c; }
  friend Poly3 operator*(const Poly3& a, const Poly3& b);
  friend bool operator==(const Poly3& a, const Poly3& b) { return a.terms_ == b.terms_; }

  std::string str() const;

 private:
  void add_term(const Monomial& e, Rational c);
  std::map<Monomial, Rational> terms_;
};

/// xi d/dx + tau d/dt + phi d/du.
struct PolyVectorField {
  Poly3 xi;
  Poly3 tau;
  Poly3 phi;

  /// The derivation applied to a polynomial.
  Poly3 apply(const Poly3& f) const;
  bool is_zero() const noexcept { return xi.is_zero() && tau.is_zero() && phi.is_zero(); }
  std::string str() const;

  PolyVectorField& operator+=(const PolyVectorField& o);
  PolyVectorField& operator-=(const PolyVectorField& o);
  PolyVectorField& operator*=(Rational c);
  friend PolyVectorField operator+(PolyVectorField a, const PolyVectorField& b) { return a += b; }
  friend PolyVectorField operator-(PolyVectorField a, const PolyVectorField& b) { return a -= b; }
  friend PolyVectorField operator*(Rational c, PolyVectorField a) { return a *= c; }
  friend bool operator==(const PolyVectorField& a, const PolyVectorField& b) {
    return a.xi == b.xi && a.tau == b.tau && a.phi == b.phi;
  }
};

/// [v, w]^i = v(w^i) - w(v^i) over the coordinates (x, t, u).
PolyVectorField lie_bracket(const PolyVectorField& v, const PolyVectorField& w);

/// [u,[v,w]] + [v,[w,u]] + [w,[u,v]]; identically zero for any three fields.
PolyVectorField jacobi_defect(const PolyVectorField& u, const PolyVectorField& v,
                              const PolyVectorField& w);

/// Exact coefficients c with sum_k c_k fields[k] = target, if they exist.
std::optional<std::vector<Rational>> express_in_span(const std::vector<PolyVectorField>& fields,
                                                     const PolyVectorField& target);

struct ClosureWitness {
  std::size_t a;
  std::size_t b;
  PolyVectorField bracket;
};

struct ClosureResult {
  bool closed = false;
  /// constants[a][b][k]: [fields[a], fields[b]] = sum_k constants[a][b][k] fields[k].
  std::vector<std::vector<std::vector<Rational>>> constants;
  std::optional<ClosureWitness> witness;
};

/// Checks that every pairwise bracket lies in the rational span of the
/// fields. Stops at the first bracket that does not and returns it.
ClosureResult closure_check(const std::vector<PolyVectorField>& fields);

}  // namespace kmn::symmetry

#endif  // KMN_POLY3_HPP
