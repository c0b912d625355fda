#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "lexrsm/rational.hpp"

namespace lexrsm {

using Valuation = std::map<std::string, Rational>;

// Linear expression  sum(coeffs[v] * v) + constant.  Zero coefficients are
// never stored, so structural equality is semantic equality.
struct LinExpr {
  std::map<std::string, Rational> coeffs;
  Rational constant;

  LinExpr() = default;
  explicit LinExpr(Rational c) : constant(std::move(c)) {}
  static LinExpr var(const std::string& v, Rational coeff = Rational(1));

  LinExpr& operator+=(const LinExpr& o);
  LinExpr& operator-=(const LinExpr& o);
  LinExpr& operator*=(const Rational& k);
  friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
  friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
  friend LinExpr operator*(LinExpr a, const Rational& k) { return a *= k; }
  friend LinExpr operator-(LinExpr a) { return a *= Rational(-1); }
  bool operator==(const LinExpr& o) const = default;

  Rational coeff(const std::string& v) const;
  bool is_constant() const { return coeffs.empty(); }

  // Replaces v by rhs. rhs may mention v itself; the substitution is
  // simultaneous, not iterated.
  LinExpr subst(const std::string& v, const LinExpr& rhs) const;

  Rational eval(const Valuation& val) const;  // absent vars read as 0
  std::string str() const;                    // e.g. "-2*x + y + 15"
};

// expr <= 0, or expr < 0 when strict.
struct LinConstraint {
  LinExpr expr;
  bool strict = false;

  bool operator==(const LinConstraint& o) const = default;
  LinConstraint closed() const { return {expr, false}; }
  bool holds(const Valuation& val) const;
  std::string str() const;
};

// Conjunction of linear constraints.
struct Polyhedron {
  std::vector<LinConstraint> cs;

  Polyhedron() = default;
  explicit Polyhedron(std::vector<LinConstraint> c) : cs(std::move(c)) {}

  bool operator==(const Polyhedron& o) const = default;
  Polyhedron closure() const;
  Polyhedron conjoin(const Polyhedron& o) const;
  bool contains(const Valuation& val) const;
  std::set<std::string> vars() const;
  std::string str() const;
};

}  // namespace lexrsm
