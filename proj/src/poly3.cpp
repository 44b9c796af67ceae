#include "kmn/poly3.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <utility>

#include "kmn/errors.hpp"

namespace kmn::symmetry {

Poly3 Poly3::constant(Rational c) { return monomial(c, 0, 0, 0); }

Poly3 Poly3::monomial(Rational c, int i, int j, int l) {
  if (i < 0 || j < 0 || l < 0) throw DomainError("monomial exponents must be non-negative");
  Poly3 p;
  p.add_term({i, j, l}, c);
  return p;
}

void Poly3::add_term(const Monomial& e, Rational c) {
  if (c == Rational(0)) return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (inserted) return;
  it->second += c;
  if (it->second == Rational(0)) terms_.erase(it);
}

Rational Poly3::coefficient(const Monomial& e) const {
  const auto it = terms_.find(e);
  return it == terms_.end() ? Rational(0) : it->second;
}

std::size_t Poly3::degree_in(Variable v) const {
  std::size_t d = 0;
  for (const auto& [e, c] : terms_) d = std::max<std::size_t>(d, static_cast<std::size_t>(e[v]));
  return d;
}

Poly3 Poly3::derivative(Variable v) const {
  Poly3 out;
  for (const auto& [e, c] : terms_) {
    if (e[v] == 0) continue;
    Monomial d = e;
    --d[v];
    out.add_term(d, c * Rational(e[v]));
  }
  return out;
}

double Poly3::evaluate(double x, double t, double u) const {
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    sum += boost::rational_cast<double>(c) * std::pow(x, e[0]) * std::pow(t, e[1]) * std::pow(u, e[2]);
  }
  return sum;
}

Poly3& Poly3::operator+=(const Poly3& o) {
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Poly3& Poly3::operator-=(const Poly3& o) {
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Poly3& Poly3::operator*=(Rational c) {
  if (c == Rational(0)) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, v] : terms_) v *= c;
  return *this;
}

Poly3 operator*(const Poly3& a, const Poly3& b) {
  Poly3 out;
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_)
      out.add_term({ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]}, ca * cb);
  return out;
}

std::string Poly3::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  static const char* names[3] = {"x", "t", "u"};
  for (const auto& [e, c] : terms_) {
    Rational mag = c;
    if (c < Rational(0)) {
      os << (first ? "-" : " - ");
      mag = -c;
    } else if (!first) {
      os << " + ";
    }
    first = false;
    const bool bare = e == Monomial{0, 0, 0};
    if (mag != Rational(1) || bare) {
      os << mag.numerator();
      if (mag.denominator() != 1) os << "/" << mag.denominator();
    }
    bool need_star = mag != Rational(1) || bare;
    for (int v = 0; v < 3; ++v) {
      if (e[v] == 0) continue;
      if (need_star) os << "*";
      os << names[v];
      if (e[v] > 1) os << "^" << e[v];
      need_star = true;
    }
  }
  return os.str();
}

Poly3 PolyVectorField::apply(const Poly3& f) const {
  return xi * f.derivative(X) + tau * f.derivative(T) + phi * f.derivative(U);
}

std::string PolyVectorField::str() const {
  std::ostringstream os;
  os << "(" << xi.str() << ") d/dx + (" << tau.str() << ") d/dt + (" << phi.str() << ") d/du";
  return os.str();
}

PolyVectorField& PolyVectorField::operator+=(const PolyVectorField& o) {
  xi += o.xi;
  tau += o.tau;
  phi += o.phi;
  return *this;
}

PolyVectorField& PolyVectorField::operator-=(const PolyVectorField& o) {
  xi -= o.xi;
  tau -= o.tau;
  phi -= o.phi;
  return *this;
}

PolyVectorField& PolyVectorField::operator*=(Rational c) {
  xi *= c;
  tau *= c;
  phi *= c;
  return *this;
}

PolyVectorField lie_bracket(const PolyVectorField& v, const PolyVectorField& w) {
  return {v.apply(w.xi) - w.apply(v.xi), v.apply(w.tau) - w.apply(v.tau),
          v.apply(w.phi) - w.apply(v.phi)};
}

PolyVectorField jacobi_defect(const PolyVectorField& u, const PolyVectorField& v,
                              const PolyVectorField& w) {
  return lie_bracket(u, lie_bracket(v, w)) + lie_bracket(v, lie_bracket(w, u)) +
         lie_bracket(w, lie_bracket(u, v));
}

std::optional<std::vector<Rational>> express_in_span(const std::vector<PolyVectorField>& fields,
                                                     const PolyVectorField& target) {
  const std::size_t k = fields.size();
  auto components = [](const PolyVectorField& f) {
    return std::array<const Poly3*, 3>{&f.xi, &f.tau, &f.phi};
  };

  // One equation per (component, monomial) that appears anywhere.
  std::set<std::pair<int, Monomial>> keys;
  auto collect = [&](const PolyVectorField& f) {
    const auto comps = components(f);
    for (int c = 0; c < 3; ++c)
      for (const auto& [e, coeff] : comps[c]->terms()) keys.emplace(c, e);
  };
  for (const auto& f : fields) collect(f);
  collect(target);

  std::vector<std::vector<Rational>> rows;
  rows.reserve(keys.size());
  for (const auto& [c, e] : keys) {
    std::vector<Rational> row(k + 1);
    for (std::size_t j = 0; j < k; ++j) row[j] = components(fields[j])[c]->coefficient(e);
    row[k] = components(target)[c]->coefficient(e);
    rows.push_back(std::move(row));
  }

  // Reduced row echelon form.
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t col = 0; col < k && r < rows.size(); ++col) {
    std::size_t p = r;
    while (p < rows.size() && rows[p][col] == Rational(0)) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[r]);
    const Rational inv = Rational(1) / rows[r][col];
    for (auto& v : rows[r]) v *= inv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][col] == Rational(0)) continue;
      const Rational f = rows[i][col];
      for (std::size_t j = col; j <= k; ++j) rows[i][j] -= f * rows[r][j];
    }
    pivot_col.push_back(col);
    ++r;
  }
  for (std::size_t i = r; i < rows.size(); ++i)
    if (rows[i][k] != Rational(0)) return std::nullopt;

  std::vector<Rational> coeffs(k, Rational(0));
  for (std::size_t i = 0; i < r; ++i) coeffs[pivot_col[i]] = rows[i][k];
  return coeffs;
}

ClosureResult closure_check(const std::vector<PolyVectorField>& fields) {
  if (fields.size() < 2) throw DomainError("closure check needs at least two fields");
  const std::size_t k = fields.size();
  ClosureResult result;
  result.constants.assign(k, std::vector<std::vector<Rational>>(k, std::vector<Rational>(k)));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      const auto br = lie_bracket(fields[a], fields[b]);
      const auto c = express_in_span(fields, br);
      if (!c) {
        result.witness = ClosureWitness{a, b, br};
        result.constants.clear();
        return result;
      }
      for (std::size_t i = 0; i < k; ++i) {
        result.constants[a][b][i] = (*c)[i];
        result.constants[b][a][i] = -(*c)[i];
      }
    }
  }
  result.closed = true;
  return result;
}

}  // namespace kmn::symmetry
