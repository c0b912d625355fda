#include "lexrsm/lp.hpp"

#include <algorithm>
#include <cassert>

namespace lexrsm {

namespace {

struct Row {
  std::map<int, Rational> a;  // structural var index -> coefficient
  Rational b;                 // a * x (<=|==) b
  bool eq = false;
  int origin = -1;   // index of the input constraint this row came from
  int origin2 = -1;  // second input row for merged equality pairs
};

// Dense rational simplex tableau. Columns: structural columns first, then one
// slack per inequality row, then phase-1 artificials. Bland's rule throughout.
class Simplex {
 public:
  Simplex(int rows, int cols) : m_(rows), n_(cols), t_(rows), rhs_(rows, Rational(0)), basis_(rows, -1) {
    for (auto& r : t_) r.assign(cols, Rational(0));
  }

  int m_, n_;
  std::vector<std::vector<Rational>> t_;
  std::vector<Rational> rhs_;
  std::vector<int> basis_;
  std::vector<char> allowed_;  // columns eligible to enter
  std::vector<Rational> zrow_;
  Rational zval_;
  const Deadline* deadline_ = nullptr;

  void price_out(const std::vector<Rational>& obj) {
    zrow_ = obj;
    zrow_.resize(n_, Rational(0));
    zval_ = 0;
    for (int r = 0; r < m_; ++r) {
      Rational cb = size_t(basis_[r]) < obj.size() ? obj[basis_[r]] : Rational(0);
      if (cb == 0) continue;
      for (int j = 0; j < n_; ++j) {
        if (!t_[r][j].is_zero()) zrow_[j] -= cb * t_[r][j];
      }
      zval_ += cb * rhs_[r];
    }
  }

  void pivot(int pr, int pc) {
    Rational d = t_[pr][pc];
    if (d != 1) {
      for (int j = 0; j < n_; ++j)
        if (!t_[pr][j].is_zero()) t_[pr][j] /= d;
      rhs_[pr] /= d;
    }
    for (int r = 0; r < m_; ++r) {
      if (r == pr) continue;
      const Rational f = t_[r][pc];
      if (f.is_zero()) continue;
      for (int j = 0; j < n_; ++j)
        if (!t_[pr][j].is_zero()) t_[r][j] -= f * t_[pr][j];
      t_[r][pc] = 0;
      rhs_[r] -= f * rhs_[pr];
    }
    const Rational f = zrow_[pc];
    if (!f.is_zero()) {
      for (int j = 0; j < n_; ++j)
        if (!t_[pr][j].is_zero()) zrow_[j] -= f * t_[pr][j];
      zrow_[pc] = 0;
      zval_ += f * rhs_[pr];
    }
    basis_[pr] = pc;
  }

  // Returns false when unbounded; *uc is the runaway column.
  bool optimize(int* uc) {
    std::vector<char> in_basis(n_, 0);
    for (int r = 0; r < m_; ++r) in_basis[basis_[r]] = 1;
    for (;;) {
      if (deadline_ && deadline_->expired()) throw LPTimeout();
      int enter = -1;
      for (int j = 0; j < n_; ++j) {
        if (!allowed_[j] || in_basis[j]) continue;
        if (zrow_[j] > 0) { enter = j; break; }
      }
      if (enter < 0) return true;
      int leave = -1;
      Rational best;
      for (int r = 0; r < m_; ++r) {
        if (t_[r][enter] <= 0) continue;
        Rational ratio = rhs_[r] / t_[r][enter];
        if (leave < 0 || ratio < best ||
            (ratio == best && basis_[r] < basis_[leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave < 0) {
        if (uc) *uc = enter;
        return false;
      }
      in_basis[basis_[leave]] = 0;
      in_basis[enter] = 1;
      pivot(leave, enter);
    }
  }
};

}  // namespace

LPResult lp_solve(const LPProblem& p, const Deadline* deadline) {
  for (const auto& c : p.constraints.cs)
    if (c.strict)
      throw std::invalid_argument("lp_solve accepts non-strict constraints only");

  // Variable order: sorted names, fixed for the whole solve.
  std::set<std::string> varset = p.constraints.vars();
  for (const auto& [v, _] : p.objective.coeffs) varset.insert(v);
  std::vector<std::string> vars(varset.begin(), varset.end());
  std::map<std::string, int> vidx;
  for (size_t i = 0; i < vars.size(); ++i) vidx[vars[i]] = int(i);

  const int nin = int(p.constraints.cs.size());
  std::vector<char> consumed(nin, 0);
  std::vector<char> nonneg(vars.size(), 0);
  std::vector<int> nonneg_origin(vars.size(), -1);
  std::vector<Rational> nonneg_scale(vars.size(), Rational(1));
  std::vector<Row> rows;
  bool merged_eq = false;

  // Adjacent e <= 0 / -e <= 0 pairs become single equality rows.
  for (int i = 0; i < nin; ++i) {
    if (consumed[i]) continue;
    const LinExpr& e = p.constraints.cs[i].expr;
    if (i + 1 < nin && !consumed[i + 1]) {
      LinExpr neg = -p.constraints.cs[i + 1].expr;
      if (neg == e) {
        Row r;
        for (const auto& [v, c] : e.coeffs) r.a[vidx[v]] = c;
        r.b = -e.constant;
        r.eq = true;
        r.origin = i;
        r.origin2 = i + 1;
        rows.push_back(std::move(r));
        consumed[i] = consumed[i + 1] = 1;
        merged_eq = true;
        continue;
      }
    }
    // -k*v <= 0 with k > 0 is a sign bound, not a row.
    if (e.constant == 0 && e.coeffs.size() == 1) {
      const auto& [v, c] = *e.coeffs.begin();
      if (c < 0) {
        int vi = vidx[v];
        if (!nonneg[vi]) {
          nonneg[vi] = 1;
          nonneg_origin[vi] = i;
          nonneg_scale[vi] = -c;
        }
        consumed[i] = 1;
        continue;
      }
    }
    Row r;
    for (const auto& [v, c] : e.coeffs) r.a[vidx[v]] = c;
    r.b = -e.constant;
    r.origin = i;
    rows.push_back(std::move(r));
    consumed[i] = 1;
  }

  // Column layout: per variable one column (non-negative) or a split pair.
  std::vector<int> col_pos(vars.size()), col_neg(vars.size(), -1);
  int ncols = 0;
  for (size_t i = 0; i < vars.size(); ++i) {
    col_pos[i] = ncols++;
    if (!nonneg[i]) col_neg[i] = ncols++;
  }
  const int nstruct = ncols;
  const int m = int(rows.size());
  const int slack0 = ncols;
  std::vector<int> slack_col(m, -1);
  for (int r = 0; r < m; ++r)
    if (!rows[r].eq) slack_col[r] = ncols++;
  const int art0 = ncols;

  std::vector<char> flipped(m, 0);
  std::vector<int> art_col(m, -1);
  int nart = 0;
  for (int r = 0; r < m; ++r) {
    bool neg_rhs = rows[r].b < 0;
    if (neg_rhs) flipped[r] = 1;
    if (rows[r].eq || neg_rhs) art_col[r] = ncols + nart++;
  }
  const int total_cols = ncols + nart;

  Simplex sx(m, total_cols);
  sx.deadline_ = deadline;
  for (int r = 0; r < m; ++r) {
    Rational sign(flipped[r] ? -1 : 1);
    for (const auto& [vi, c] : rows[r].a) {
      sx.t_[r][col_pos[vi]] = c * sign;
      if (col_neg[vi] >= 0) sx.t_[r][col_neg[vi]] = -c * sign;
    }
    if (slack_col[r] >= 0) sx.t_[r][slack_col[r]] = sign;
    sx.rhs_[r] = rows[r].b * sign;
    if (art_col[r] >= 0) {
      sx.t_[r][art_col[r]] = 1;
      sx.basis_[r] = art_col[r];
    } else {
      sx.basis_[r] = slack_col[r];
    }
  }

  std::vector<Rational> obj(total_cols, Rational(0));
  for (const auto& [v, c] : p.objective.coeffs) {
    Rational k = p.maximize ? c : -c;
    int vi = vidx.at(v);
    obj[col_pos[vi]] += k;
    if (col_neg[vi] >= 0) obj[col_neg[vi]] -= k;
  }

  sx.allowed_.assign(total_cols, 1);
  if (nart > 0) {
    std::vector<Rational> phase1(total_cols, Rational(0));
    for (int j = art0; j < total_cols; ++j) phase1[j] = -1;
    sx.price_out(phase1);
    sx.optimize(nullptr);  // bounded: objective <= 0
    if (sx.zval_ < 0) {
      LPResult res;
      res.status = LPStatus::Infeasible;
      return res;
    }
    // Drive remaining artificials out of the basis.
    for (int r = 0; r < sx.m_; ++r) {
      if (sx.basis_[r] < art0) continue;
      int pc = -1;
      for (int j = 0; j < art0; ++j)
        if (!sx.t_[r][j].is_zero()) { pc = j; break; }
      if (pc >= 0) sx.pivot(r, pc);
    }
    // Rows still basic in an artificial are all-zero over real columns.
    for (int r = sx.m_ - 1; r >= 0; --r) {
      if (sx.basis_[r] >= art0) {
        sx.t_.erase(sx.t_.begin() + r);
        sx.rhs_.erase(sx.rhs_.begin() + r);
        sx.basis_.erase(sx.basis_.begin() + r);
        --sx.m_;
      }
    }
    for (int j = art0; j < total_cols; ++j) sx.allowed_[j] = 0;
  }

  sx.price_out(obj);
  int uc = -1;
  bool ok = sx.optimize(&uc);

  auto point_of_basis = [&]() {
    std::vector<Rational> x(total_cols, Rational(0));
    for (int r = 0; r < sx.m_; ++r) x[sx.basis_[r]] = sx.rhs_[r];
    Valuation val;
    for (size_t i = 0; i < vars.size(); ++i) {
      Rational v = x[col_pos[i]];
      if (col_neg[i] >= 0) v -= x[col_neg[i]];
      if (v != 0) val[vars[i]] = v;
    }
    return val;
  };

  LPResult res;
  if (!ok) {
    res.status = LPStatus::Unbounded;
    res.assignment = point_of_basis();
    std::vector<Rational> d(total_cols, Rational(0));
    d[uc] = 1;
    for (int r = 0; r < sx.m_; ++r) d[sx.basis_[r]] = -sx.t_[r][uc];
    for (size_t i = 0; i < vars.size(); ++i) {
      Rational v = d[col_pos[i]];
      if (col_neg[i] >= 0) v -= d[col_neg[i]];
      if (v != 0) res.ray[vars[i]] = v;
    }
    return res;
  }

  res.status = LPStatus::Optimal;
  res.value = (p.maximize ? sx.zval_ : -sx.zval_) + p.objective.constant;
  res.assignment = point_of_basis();
  for (size_t i = 0; i < vars.size(); ++i)
    if (!res.assignment.count(vars[i])) res.assignment[vars[i]] = 0;

  if (!merged_eq) {
    // y_i = -reduced_cost(slack_i); bound rows read the variable's column.
    res.duals.assign(nin, Rational(0));
    for (int r = 0; r < m; ++r)
      if (slack_col[r] >= 0 && rows[r].origin >= 0)
        res.duals[rows[r].origin] = -sx.zrow_[slack_col[r]];
    for (size_t i = 0; i < vars.size(); ++i)
      if (nonneg[i] && nonneg_origin[i] >= 0)
        res.duals[nonneg_origin[i]] = -sx.zrow_[col_pos[i]] / nonneg_scale[i];
    if (!p.maximize)
      for (auto& y : res.duals) y = -y;
    res.duals_valid = true;
  }
  return res;
}

bool entails(const Polyhedron& p, const LinConstraint& c, const Deadline* deadline) {
  LPProblem prob;
  prob.objective = c.expr;
  prob.maximize = true;
  prob.constraints = p.closure();
  LPResult r = lp_solve(prob, deadline);
  if (r.status == LPStatus::Infeasible) return true;
  if (r.status == LPStatus::Unbounded) return false;
  return r.value <= 0;
}

std::optional<Valuation> nonempty_witness(const Polyhedron& p,
                                          const Deadline* deadline) {
  bool any_strict = false;
  for (const auto& c : p.cs)
    if (c.strict) { any_strict = true; break; }

  if (!any_strict) {
    LPProblem feas;
    feas.constraints = p;
    LPResult r = lp_solve(feas, deadline);
    if (r.status == LPStatus::Infeasible) return std::nullopt;
    return r.assignment;
  }

  // Slack variable shared by every strict atom; fresh name outside the
  // program-variable namespace.
  const std::string slack = "~strict_slack";
  LPProblem prob;
  prob.objective = LinExpr::var(slack);
  prob.maximize = true;
  for (const auto& c : p.cs) {
    LinExpr e = c.expr;
    if (c.strict) e += LinExpr::var(slack);
    prob.constraints.cs.push_back({std::move(e), false});
  }
  prob.constraints.cs.push_back({LinExpr::var(slack) + LinExpr(Rational(-1)), false});
  prob.constraints.cs.push_back({LinExpr::var(slack, Rational(-1)), false});
  LPResult r = lp_solve(prob, deadline);
  if (r.status != LPStatus::Optimal || r.value <= 0) return std::nullopt;
  Valuation out = r.assignment;
  out.erase(slack);
  return out;
}

Valuation unbounded_witness(const LPResult& r) {
  const Rational scale(1000000);
  Valuation out = r.assignment;
  for (const auto& [v, d] : r.ray) {
    Rational& slot = out[v];
    slot += scale * d;
    if (slot == 0) out.erase(v);
  }
  return out;
}

}  // namespace lexrsm
