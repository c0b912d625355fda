#pragma once

#include <map>
#include <stdexcept>

#include "lexrsm/ast.hpp"

namespace lexrsm {

class LowerError : public std::runtime_error {
 public:
  explicit LowerError(const std::string& what) : std::runtime_error(what) {}
};

// Disjoint polyhedra whose union is the condition / its complement. Equality
// negations and != atoms split; the expansion is capped at 16 disjuncts.
std::vector<Polyhedron> cond_pos(const BExpr& b);
std::vector<Polyhedron> cond_neg(const BExpr& b);

struct LowerResult {
  PCFG g;
  std::map<int, Polyhedron> loop_annotations;  // while-head @invariant facts
};

// One location per control point, created in source order and named l0, l1,
// ... with the exit location last; transitions named t0, t1, ... in creation
// order (guard transitions of a branch point precede its bodies' transitions).
// Boolean branches become one transition per disjunct, `star` two guard-true
// transitions, `prob(p)` a single two-branch transition; p in {0, 1} is
// rejected. Identical trees lower to identical graphs.
LowerResult lower(const Stmt& program);

}  // namespace lexrsm
