#include <random>

#include "doctest.h"
#include "lexrsm/lp.hpp"

using namespace lexrsm;

namespace {

LinExpr lx(std::initializer_list<std::pair<const char*, Rational>> terms,
           Rational c = Rational(0)) {
  LinExpr e(c);
  for (const auto& [v, k] : terms) e += LinExpr::var(v, k);
  return e;
}

LinConstraint le(LinExpr e) { return {std::move(e), false}; }

}  // namespace

TEST_CASE("rational parsing and printing") {
  CHECK(parse_rational("7") == Rational(7));
  CHECK(parse_rational("-3/4") == Rational(-3, 4));
  CHECK(parse_rational("2.5") == Rational(5, 2));
  CHECK(parse_rational("-0.125") == Rational(-1, 8));
  // Fraction digits with leading zeros must stay decimal, never octal.
  CHECK(parse_rational("1.030857") == Rational(1030857, 1000000));
  CHECK(parse_rational("-0.089") == Rational(-89, 1000));
  CHECK(parse_rational("007") == Rational(7));
  CHECK_THROWS_AS(parse_rational("0x10"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("1e5"), std::invalid_argument);
  CHECK(rat_str(Rational(-3, 4)) == "-3/4");
  CHECK(rat_str(Rational(6, 3)) == "2");
  CHECK(floor_log2(Rational(10)) == 3);
  CHECK(floor_log2(Rational(1, 10)) == -4);
  CHECK(floor_log2(Rational(8)) == 3);
}

TEST_CASE("linexpr algebra and substitution") {
  LinExpr e = lx({{"x", 2}, {"y", -1}}, Rational(3));
  CHECK(e.eval({{"x", Rational(1)}, {"y", Rational(4)}}) == Rational(1));
  LinExpr s = e.subst("x", lx({{"y", 1}}, Rational(5)));  // x := y + 5
  CHECK(s == lx({{"y", 1}}, Rational(13)));
  // Simultaneous, not iterated: x := x + 1.
  LinExpr t = lx({{"x", 1}}).subst("x", lx({{"x", 1}}, Rational(1)));
  CHECK(t == lx({{"x", 1}}, Rational(1)));
  CHECK((e - e) == LinExpr());
  CHECK((e * Rational(0)) == LinExpr());
}

TEST_CASE("lp: bounded box optimum at a vertex") {
  // max x + y  s.t.  x <= 1, y <= 1, x >= 0, y >= 0  ->  2 at (1,1)
  LPProblem p;
  p.objective = lx({{"x", 1}, {"y", 1}});
  p.constraints.cs = {
      le(lx({{"x", 1}}, Rational(-1))), le(lx({{"y", 1}}, Rational(-1))),
      le(lx({{"x", -1}})), le(lx({{"y", -1}}))};
  LPResult r = lp_solve(p);
  REQUIRE(r.status == LPStatus::Optimal);
  CHECK(r.value == Rational(2));
  CHECK(r.assignment.at("x") == Rational(1));
  CHECK(r.assignment.at("y") == Rational(1));
  for (const auto& c : p.constraints.cs) CHECK(c.holds(r.assignment));
}

TEST_CASE("lp: infeasible and unbounded") {
  LPProblem inf;
  inf.objective = lx({{"x", 1}});
  inf.constraints.cs = {le(lx({{"x", 1}}, Rational(-1))),   // x <= 1
                        le(lx({{"x", -1}}, Rational(2)))};  // x >= 2
  CHECK(lp_solve(inf).status == LPStatus::Infeasible);

  LPProblem unb;
  unb.objective = lx({{"x", 1}});
  unb.constraints.cs = {le(lx({{"x", -1}}))};  // x >= 0
  LPResult r = lp_solve(unb);
  REQUIRE(r.status == LPStatus::Unbounded);
  CHECK(unb.constraints.contains(r.assignment));
  // Ray improves the objective.
  CHECK(r.ray.at("x") > 0);
  CHECK(unb.constraints.contains(unbounded_witness(r)));
}

TEST_CASE("lp: free variables, minimization, exact rationals") {
  // min 3x - y  s.t.  x >= -5/3, y <= 7/2, y - x <= 1
  LPProblem p;
  p.maximize = false;
  p.objective = lx({{"x", 3}, {"y", -1}});
  p.constraints.cs = {le(lx({{"x", -1}}, Rational(-5, 3))),
                      le(lx({{"y", 1}}, Rational(-7, 2))),
                      le(lx({{"y", 1}, {"x", -1}}, Rational(-1)))};
  LPResult r = lp_solve(p);
  REQUIRE(r.status == LPStatus::Optimal);
  // x = -5/3, y = x + 1 = -2/3:
  CHECK(r.assignment.at("x") == Rational(-5, 3));
  CHECK(r.assignment.at("y") == Rational(-2, 3));
  CHECK(r.value == Rational(-13, 3));
}

TEST_CASE("lp: equality handled via adjacent opposite rows") {
  // x + y == 2, x - y <= 0, max x  ->  x = 1, y = 1
  LinExpr eq = lx({{"x", 1}, {"y", 1}}, Rational(-2));
  LPProblem p;
  p.objective = lx({{"x", 1}});
  p.constraints.cs = {le(eq), le(-eq), le(lx({{"x", 1}, {"y", -1}}))};
  LPResult r = lp_solve(p);
  REQUIRE(r.status == LPStatus::Optimal);
  CHECK(r.value == Rational(1));
  CHECK(r.assignment.at("y") == Rational(1));
}

TEST_CASE("lp: deterministic across repeated solves") {
  LPProblem p;
  p.objective = lx({{"a", 1}, {"b", 2}, {"c", -1}});
  p.constraints.cs = {le(lx({{"a", 1}, {"b", 1}}, Rational(-4))),
                      le(lx({{"b", 1}, {"c", -2}}, Rational(-3))),
                      le(lx({{"a", -1}})), le(lx({{"b", -1}})),
                      le(lx({{"c", -1}}, Rational(-1)))};
  LPResult r1 = lp_solve(p);
  LPResult r2 = lp_solve(p);
  REQUIRE(r1.status == LPStatus::Optimal);
  CHECK(r1.value == r2.value);
  CHECK(r1.assignment == r2.assignment);
  CHECK(r1.duals == r2.duals);
}

TEST_CASE("lp: duality spot check on inequality problems") {
  // Random small max problems; at Optimal verify y >= 0, y^T b = value, and
  // y^T A - c >= 0 on the non-negative half (constraints include v >= 0 rows).
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> coeff(-4, 4);
  std::uniform_int_distribution<int> rhs(0, 6);
  int optimal_seen = 0;
  for (int iter = 0; iter < 60; ++iter) {
    std::vector<std::string> vars = {"x", "y", "z"};
    LPProblem p;
    for (const auto& v : vars) p.objective += LinExpr::var(v, Rational(coeff(rng)));
    for (int r = 0; r < 3; ++r) {
      LinExpr e;
      for (const auto& v : vars) e += LinExpr::var(v, Rational(coeff(rng)));
      e += LinExpr(Rational(-rhs(rng)));
      p.constraints.cs.push_back(le(e));
    }
    for (const auto& v : vars) p.constraints.cs.push_back(le(-LinExpr::var(v)));
    LPResult r = lp_solve(p);
    if (r.status != LPStatus::Optimal) continue;
    ++optimal_seen;
    REQUIRE(r.duals_valid);
    REQUIRE(r.duals.size() == p.constraints.cs.size());
    Rational ytb(0);
    for (size_t i = 0; i < r.duals.size(); ++i) {
      CHECK(r.duals[i] >= 0);
      ytb += r.duals[i] * (-p.constraints.cs[i].expr.constant);
    }
    CHECK(ytb == r.value);
    // Dual feasibility: for every variable, sum_i y_i A[i][v] >= c_v.
    for (const auto& v : vars) {
      Rational lhs(0);
      for (size_t i = 0; i < r.duals.size(); ++i)
        lhs += r.duals[i] * p.constraints.cs[i].expr.coeff(v);
      CHECK(lhs >= p.objective.coeff(v));
    }
  }
  CHECK(optimal_seen > 10);
}

TEST_CASE("entails") {
  Polyhedron p;
  p.cs = {le(lx({{"x", -1}})), le(lx({{"x", 1}}, Rational(-5)))};  // 0<=x<=5
  CHECK(entails(p, le(lx({{"x", 1}}, Rational(-7)))));             // x <= 7
  CHECK(!entails(p, le(lx({{"x", 1}}, Rational(-4)))));            // x <= 4
  CHECK(entails(p, {lx({{"x", 1}}, Rational(-6)), true}));         // x < 6 via closure
  // Empty polyhedron entails everything.
  Polyhedron empty;
  empty.cs = {le(lx({{"x", 1}}, Rational(-1))), le(lx({{"x", -1}}, Rational(2)))};
  CHECK(entails(empty, le(lx({{"x", 1}}, Rational(100)))));
  // Unbounded direction is never entailed.
  Polyhedron half;
  half.cs = {le(lx({{"x", -1}}))};
  CHECK(!entails(half, le(lx({{"x", 1}}, Rational(-1000000)))));
}

TEST_CASE("lp / entails coherence on random boxes") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> coeff(-3, 3);
  std::uniform_int_distribution<int> bound(-5, 5);
  for (int iter = 0; iter < 80; ++iter) {
    Polyhedron p;
    for (int r = 0; r < 4; ++r) {
      LinExpr e = lx({{"x", Rational(coeff(rng))}, {"y", Rational(coeff(rng))}},
                     Rational(bound(rng)));
      p.cs.push_back(le(e));
    }
    LinConstraint c = le(lx({{"x", Rational(coeff(rng))}, {"y", Rational(coeff(rng))}},
                            Rational(bound(rng))));
    LPResult r = lp_solve({c.expr, true, p});
    bool expect = r.status == LPStatus::Infeasible ||
                  (r.status == LPStatus::Optimal && r.value <= 0);
    CHECK(entails(p, c) == expect);
  }
}
