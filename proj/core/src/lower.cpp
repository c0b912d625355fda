#include "lexrsm/lower.hpp"

#include <set>

namespace lexrsm {

namespace {

constexpr size_t kMaxDisjuncts = 16;

CmpOp negate(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return CmpOp::Ge;
    case CmpOp::Le: return CmpOp::Gt;
    case CmpOp::Gt: return CmpOp::Le;
    case CmpOp::Ge: return CmpOp::Lt;
    case CmpOp::Eq: return CmpOp::Ne;
    case CmpOp::Ne: return CmpOp::Eq;
  }
  return op;
}

std::vector<std::vector<LinConstraint>> atom_pos(const Comparison& c) {
  LinExpr e = c.diff();
  switch (c.op) {
    case CmpOp::Lt: return {{{e, true}}};
    case CmpOp::Le: return {{{e, false}}};
    case CmpOp::Gt: return {{{-e, true}}};
    case CmpOp::Ge: return {{{-e, false}}};
    case CmpOp::Eq: return {{{e, false}, {-e, false}}};
    case CmpOp::Ne: return {{{e, true}}, {{-e, true}}};
  }
  return {};
}

std::vector<std::vector<LinConstraint>> atom_neg(const Comparison& c) {
  return atom_pos({c.lhs, negate(c.op), c.rhs});
}

void cap_check(size_t n) {
  if (n > kMaxDisjuncts)
    throw LowerError("condition expands to more than " +
                     std::to_string(kMaxDisjuncts) + " disjuncts");
}

// Cartesian conjunction of per-atom disjunct families.
std::vector<Polyhedron> product(
    const std::vector<std::vector<std::vector<LinConstraint>>>& families) {
  std::vector<Polyhedron> acc = {Polyhedron{}};
  for (const auto& family : families) {
    std::vector<Polyhedron> nxt;
    cap_check(acc.size() * family.size());
    for (const auto& base : acc)
      for (const auto& extra : family) {
        Polyhedron p = base;
        p.cs.insert(p.cs.end(), extra.begin(), extra.end());
        nxt.push_back(std::move(p));
      }
    acc = std::move(nxt);
  }
  return acc;
}

}  // namespace

std::vector<Polyhedron> cond_pos(const BExpr& b) {
  std::vector<std::vector<std::vector<LinConstraint>>> families;
  for (const auto& a : b.atoms) families.push_back(atom_pos(a));
  return product(families);
}

std::vector<Polyhedron> cond_neg(const BExpr& b) {
  // Disjoint expansion: the i-th group satisfies atoms 0..i-1 and refutes i.
  std::vector<Polyhedron> out;
  for (size_t i = 0; i < b.atoms.size(); ++i) {
    std::vector<std::vector<std::vector<LinConstraint>>> families;
    for (size_t j = 0; j < i; ++j) families.push_back(atom_pos(b.atoms[j]));
    families.push_back(atom_neg(b.atoms[i]));
    for (auto& p : product(families)) out.push_back(std::move(p));
    cap_check(out.size());
  }
  return out;
}

namespace {

using Dangle = std::pair<int, int>;  // transition index, branch index

struct Builder {
  PCFG g;
  std::map<int, Polyhedron> annots;

  int new_loc() {
    g.locations.push_back("l" + std::to_string(g.locations.size()));
    return int(g.locations.size()) - 1;
  }

  int new_trans(int src, Polyhedron guard, std::optional<Update> up,
                std::vector<Branch> branches = {{Rational(1), -1}}) {
    Transition t;
    t.id = "t" + std::to_string(g.transitions.size());
    t.src = src;
    t.guard = std::move(guard);
    t.update = std::move(up);
    t.branches = std::move(branches);
    g.transitions.push_back(std::move(t));
    return int(g.transitions.size()) - 1;
  }

  void patch(const std::vector<Dangle>& ds, int target) {
    for (const auto& [ti, bi] : ds) g.transitions[ti].branches[bi].target = target;
  }
};

std::pair<int, std::vector<Dangle>> lower_stmt(Builder& b, const Stmt& s) {
  switch (s.kind) {
    case Stmt::Kind::Skip: {
      int loc = b.new_loc();
      int t = b.new_trans(loc, {}, std::nullopt);
      return {loc, {{t, 0}}};
    }
    case Stmt::Kind::Assign: {
      int loc = b.new_loc();
      int t = b.new_trans(loc, {}, Update{s.var, s.rhs});
      return {loc, {{t, 0}}};
    }
    case Stmt::Kind::Seq: {
      auto [ea, da] = lower_stmt(b, *s.a);
      auto [eb, db] = lower_stmt(b, *s.b);
      b.patch(da, eb);
      return {ea, db};
    }
    case Stmt::Kind::If: {
      int head = b.new_loc();
      std::vector<Dangle> then_slots, else_slots, out;
      if (s.ckind == CondKind::Prob) {
        if (s.prob == 0 || s.prob == 1)
          throw LowerError("prob(" + rat_str(s.prob) + ") is not probabilistic");
        int t = b.new_trans(head, {}, std::nullopt,
                            {{s.prob, -1}, {Rational(1) - s.prob, -1}});
        then_slots = {{t, 0}};
        else_slots = {{t, 1}};
      } else if (s.ckind == CondKind::Star) {
        then_slots = {{b.new_trans(head, {}, std::nullopt), 0}};
        else_slots = {{b.new_trans(head, {}, std::nullopt), 0}};
      } else {
        for (auto& p : cond_pos(s.cond))
          then_slots.push_back({b.new_trans(head, std::move(p), std::nullopt), 0});
        for (auto& p : cond_neg(s.cond))
          else_slots.push_back({b.new_trans(head, std::move(p), std::nullopt), 0});
      }
      auto [et, dt] = lower_stmt(b, *s.a);
      b.patch(then_slots, et);
      out.insert(out.end(), dt.begin(), dt.end());
      if (s.b) {
        auto [ee, de] = lower_stmt(b, *s.b);
        b.patch(else_slots, ee);
        out.insert(out.end(), de.begin(), de.end());
      } else {
        out.insert(out.end(), else_slots.begin(), else_slots.end());
      }
      return {head, out};
    }
    case Stmt::Kind::While: {
      int head = b.new_loc();
      if (s.annotation) {
        auto ps = cond_pos(*s.annotation);
        if (ps.size() != 1)
          throw LowerError("loop invariant must be a plain conjunction");
        b.annots[head] = ps[0];
      }
      std::vector<Dangle> enter, leave;
      for (auto& p : cond_pos(s.cond))
        enter.push_back({b.new_trans(head, std::move(p), std::nullopt), 0});
      for (auto& p : cond_neg(s.cond))
        leave.push_back({b.new_trans(head, std::move(p), std::nullopt), 0});
      auto [eb, db] = lower_stmt(b, *s.a);
      b.patch(enter, eb);
      b.patch(db, head);
      return {head, leave};
    }
  }
  throw LowerError("unreachable statement kind");
}

void collect_vars(const Stmt& s, std::set<std::string>& vars) {
  auto from_expr = [&](const LinExpr& e) {
    for (const auto& [v, c] : e.coeffs) vars.insert(v);
  };
  auto from_bexpr = [&](const BExpr& b) {
    for (const auto& a : b.atoms) {
      for (const auto& [v, c] : a.lhs.coeffs) vars.insert(v);
      for (const auto& [v, c] : a.rhs.coeffs) vars.insert(v);
    }
  };
  switch (s.kind) {
    case Stmt::Kind::Skip: break;
    case Stmt::Kind::Assign:
      vars.insert(s.var);
      from_expr(s.rhs.expr);
      break;
    case Stmt::Kind::Seq:
      collect_vars(*s.a, vars);
      collect_vars(*s.b, vars);
      break;
    case Stmt::Kind::If:
      if (s.ckind == CondKind::Boolean) from_bexpr(s.cond);
      collect_vars(*s.a, vars);
      if (s.b) collect_vars(*s.b, vars);
      break;
    case Stmt::Kind::While:
      from_bexpr(s.cond);
      if (s.annotation) from_bexpr(*s.annotation);
      collect_vars(*s.a, vars);
      break;
  }
}

}  // namespace

LowerResult lower(const Stmt& program) {
  Builder b;
  std::set<std::string> vars;
  collect_vars(program, vars);
  b.g.variables.assign(vars.begin(), vars.end());

  auto [entry, dangles] = lower_stmt(b, program);
  int out = b.new_loc();
  b.patch(dangles, out);
  int tout = b.new_trans(out, {}, std::nullopt, {{Rational(1), out}});
  b.g.l_in = entry;
  b.g.l_out = out;
  b.g.tau_out = b.g.transitions[tout].id;

  auto bad = b.g.validate();
  if (!bad.empty()) throw LowerError("lowering produced a bad graph: " + bad[0]);
  return {std::move(b.g), std::move(b.annots)};
}

}  // namespace lexrsm
