#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lexrsm/linexpr.hpp"

namespace lexrsm {

enum class LPStatus { Optimal, Infeasible, Unbounded };

// Cooperative deadline, checked once per pivot.
struct Deadline {
  std::chrono::steady_clock::time_point at{};
  bool enabled = false;

  static Deadline in_ms(long ms) {
    return {std::chrono::steady_clock::now() + std::chrono::milliseconds(ms), true};
  }
  bool expired() const {
    return enabled && std::chrono::steady_clock::now() >= at;
  }
};

class LPTimeout : public std::runtime_error {
 public:
  LPTimeout() : std::runtime_error("LP deadline exceeded") {}
};

struct LPProblem {
  LinExpr objective;
  bool maximize = true;
  Polyhedron constraints;  // non-strict rows only
};

struct LPResult {
  LPStatus status = LPStatus::Infeasible;
  Rational value;          // Optimal only
  Valuation assignment;    // Optimal: optimum vertex; Unbounded: feasible point
  Valuation ray;           // Unbounded only: improving direction
  // Dual multiplier per input constraint row, in input order. Valid for
  // Optimal results unless presolve merged an equality pair.
  std::vector<Rational> duals;
  bool duals_valid = false;
};

// Exact rational simplex over free variables (internally split into
// non-negative pairs; rows of the form -k*v <= 0 become sign bounds, adjacent
// rows forming e <= 0 / -e <= 0 pairs become equality rows). Pivoting follows
// Bland's rule with lowest-index tie-breaks, so results are deterministic:
// identical problems give bit-identical results. The Optimal assignment is a
// basic feasible solution, i.e. a vertex of the standard-form polytope.
//
// Throws std::invalid_argument on strict constraints and LPTimeout when the
// deadline expires mid-solve.
LPResult lp_solve(const LPProblem& p, const Deadline* deadline = nullptr);

// True iff the maximum of c.expr over closure(p) is <= 0 (Infeasible p counts
// as entailed, Unbounded as not entailed). A strict atom is checked as its
// closed weakening: `true` certifies expr <= 0 everywhere on closure(p),
// which may accept an atom whose strict form fails on the boundary.
bool entails(const Polyhedron& p, const LinConstraint& c,
             const Deadline* deadline = nullptr);

// Unbounded results carry a feasible point plus an improving ray; witnesses
// are reported at the fixed parameter 10^6 along the ray.
Valuation unbounded_witness(const LPResult& r);

// Exact emptiness of p including strict atoms: a point satisfying every strict
// atom with positive slack exists iff max s over {e <= 0, e' + s <= 0, s <= 1}
// is positive. Returns such a point, or nullopt when the set is empty.
std::optional<Valuation> nonempty_witness(const Polyhedron& p,
                                          const Deadline* deadline = nullptr);

}  // namespace lexrsm
