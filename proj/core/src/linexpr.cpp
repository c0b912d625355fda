#include "lexrsm/linexpr.hpp"

#include <sstream>

namespace lexrsm {

LinExpr LinExpr::var(const std::string& v, Rational coeff) {
  LinExpr e;
  if (coeff != 0) e.coeffs[v] = std::move(coeff);
  return e;
}

LinExpr& LinExpr::operator+=(const LinExpr& o) {
  for (const auto& [v, c] : o.coeffs) {
    Rational& mine = coeffs[v];
    mine += c;
    if (mine == 0) coeffs.erase(v);
  }
  constant += o.constant;
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o) {
  for (const auto& [v, c] : o.coeffs) {
    Rational& mine = coeffs[v];
    mine -= c;
    if (mine == 0) coeffs.erase(v);
  }
  constant -= o.constant;
  return *this;
}

LinExpr& LinExpr::operator*=(const Rational& k) {
  if (k == 0) {
    coeffs.clear();
    constant = 0;
    return *this;
  }
  for (auto& [v, c] : coeffs) c *= k;
  constant *= k;
  return *this;
}

Rational LinExpr::coeff(const std::string& v) const {
  auto it = coeffs.find(v);
  return it == coeffs.end() ? Rational(0) : it->second;
}

LinExpr LinExpr::subst(const std::string& v, const LinExpr& rhs) const {
  auto it = coeffs.find(v);
  if (it == coeffs.end()) return *this;
  Rational k = it->second;
  LinExpr out = *this;
  out.coeffs.erase(v);
  LinExpr scaled = rhs;
  scaled *= k;
  out += scaled;
  return out;
}

Rational LinExpr::eval(const Valuation& val) const {
  Rational acc = constant;
  for (const auto& [v, c] : coeffs) {
    auto it = val.find(v);
    if (it != val.end()) acc += c * it->second;
  }
  return acc;
}

std::string LinExpr::str() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [v, c] : coeffs) {
    if (first) {
      if (c == -1) os << "-";
      else if (c != 1) os << rat_str(c) << "*";
    } else {
      os << (c < 0 ? " - " : " + ");
      Rational a = abs(c);
      if (a != 1) os << rat_str(a) << "*";
    }
    os << v;
    first = false;
  }
  if (first) return rat_str(constant);
  if (constant != 0) {
    os << (constant < 0 ? " - " : " + ") << rat_str(abs(constant));
  }
  return os.str();
}

bool LinConstraint::holds(const Valuation& val) const {
  Rational v = expr.eval(val);
  return strict ? v < 0 : v <= 0;
}

std::string LinConstraint::str() const {
  return expr.str() + (strict ? " < 0" : " <= 0");
}

Polyhedron Polyhedron::closure() const {
  Polyhedron out;
  out.cs.reserve(cs.size());
  for (const auto& c : cs) out.cs.push_back(c.closed());
  return out;
}

Polyhedron Polyhedron::conjoin(const Polyhedron& o) const {
  Polyhedron out = *this;
  for (const auto& c : o.cs) out.cs.push_back(c);
  return out;
}

bool Polyhedron::contains(const Valuation& val) const {
  for (const auto& c : cs)
    if (!c.holds(val)) return false;
  return true;
}

std::set<std::string> Polyhedron::vars() const {
  std::set<std::string> out;
  for (const auto& c : cs)
    for (const auto& [v, _] : c.expr.coeffs) out.insert(v);
  return out;
}

std::string Polyhedron::str() const {
  if (cs.empty()) return "true";
  std::string out;
  for (size_t i = 0; i < cs.size(); ++i) {
    if (i) out += "  &&  ";
    out += cs[i].str();
  }
  return out;
}

}  // namespace lexrsm
