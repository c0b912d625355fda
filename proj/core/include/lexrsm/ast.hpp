#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lexrsm/pcfg.hpp"

namespace lexrsm {

enum class CmpOp { Lt, Le, Gt, Ge, Eq, Ne };

struct Comparison {
  LinExpr lhs;
  CmpOp op = CmpOp::Le;
  LinExpr rhs;

  // lhs - rhs, the <= / < 0 normal form's left side.
  LinExpr diff() const { return lhs - rhs; }
  std::string str() const;
};

// Conjunction of comparisons; no atoms means true.
struct BExpr {
  std::vector<Comparison> atoms;
  std::string str() const;
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

enum class CondKind { Boolean, Star, Prob };

struct Stmt {
  enum class Kind { Skip, Assign, Seq, If, While };
  Kind kind = Kind::Skip;
  int line = 0;

  // Assign
  std::string var;
  UpdateElem rhs;

  // Seq: a then b. If: a = then branch, b = else branch (b may be null).
  // While: a = body.
  StmtPtr a, b;

  // If condition; While uses ckind Boolean and cond.
  CondKind ckind = CondKind::Boolean;
  BExpr cond;
  Rational prob;  // CondKind::Prob

  // While only: @invariant annotation on the loop head.
  std::optional<BExpr> annotation;
};

// Canonical single-line source; parsing it back gives the same tree.
std::string print_program(const Stmt& s);

}  // namespace lexrsm
