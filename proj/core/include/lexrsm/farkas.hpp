#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "lexrsm/lp.hpp"

namespace lexrsm {

// Linear expression over program variables whose coefficients are themselves
// affine expressions over template unknowns. This is the shape of template
// consequents fed to the Farkas reduction: unknowns never multiply program
// variables of the antecedent side.
struct ParamLinExpr {
  std::map<std::string, LinExpr> coeffs;  // program var -> expr over unknowns
  LinExpr constant;                       // expr over unknowns

  static ParamLinExpr lift(const LinExpr& concrete);

  ParamLinExpr& operator+=(const ParamLinExpr& o);
  ParamLinExpr& operator-=(const ParamLinExpr& o);
  ParamLinExpr& operator*=(const Rational& k);
  friend ParamLinExpr operator+(ParamLinExpr a, const ParamLinExpr& b) { return a += b; }
  friend ParamLinExpr operator-(ParamLinExpr a, const ParamLinExpr& b) { return a -= b; }
  friend ParamLinExpr operator*(ParamLinExpr a, const Rational& k) { return a *= k; }
  friend ParamLinExpr operator-(ParamLinExpr a) { return a *= Rational(-1); }

  // Program-variable substitution v := rhs (rhs numeric over program vars).
  ParamLinExpr subst(const std::string& v, const LinExpr& rhs) const;

  // Resolves the unknowns, leaving a concrete expression over program vars.
  LinExpr instantiate(const Valuation& unknowns) const;

  LinExpr coeff(const std::string& v) const;
  std::string str() const;
};

class UnsatisfiableAntecedent : public std::runtime_error {
 public:
  explicit UnsatisfiableAntecedent(const std::string& what)
      : std::runtime_error(what) {}
};

// Farkas reduction of  "for all x: antecedent(x) => consequent(x) <= 0"  to
// linear constraints over the template unknowns and fresh multipliers
// <prefix>_<row>. Output order: multiplier sign rows, then one equality pair
// (adjacent <=-rows) per program variable in sorted order, then the bound row.
// A satisfiable assignment of the output certifies the implication for every
// point of the antecedent.
//
// The antecedent must be closed (non-strict) and satisfiable; an empty
// antecedent polyhedron makes the implication vacuous and must be
// short-circuited by the caller, so it is reported as UnsatisfiableAntecedent.
std::vector<LinConstraint> farkas_encode(const Polyhedron& antecedent,
                                         const ParamLinExpr& consequent,
                                         const std::string& prefix);

// Deterministic sample of `count` points of closure(p) (duplicates possible):
// rejection sampling inside an LP-derived bounding box, falling back to convex
// combinations of optimizer vertices. Throws UnsatisfiableAntecedent when p is
// empty.
std::vector<Valuation> sample_polyhedron(const Polyhedron& p, int count,
                                         std::uint64_t seed);

}  // namespace lexrsm
