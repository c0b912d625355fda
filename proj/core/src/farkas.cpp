#include "lexrsm/farkas.hpp"

#include <random>
#include <sstream>

namespace lexrsm {

ParamLinExpr ParamLinExpr::lift(const LinExpr& concrete) {
  ParamLinExpr out;
  for (const auto& [v, c] : concrete.coeffs) out.coeffs[v] = LinExpr(c);
  out.constant = LinExpr(concrete.constant);
  return out;
}

ParamLinExpr& ParamLinExpr::operator+=(const ParamLinExpr& o) {
  for (const auto& [v, e] : o.coeffs) {
    LinExpr& mine = coeffs[v];
    mine += e;
    if (mine == LinExpr()) coeffs.erase(v);
  }
  constant += o.constant;
  return *this;
}

ParamLinExpr& ParamLinExpr::operator-=(const ParamLinExpr& o) {
  for (const auto& [v, e] : o.coeffs) {
    LinExpr& mine = coeffs[v];
    mine -= e;
    if (mine == LinExpr()) coeffs.erase(v);
  }
  constant -= o.constant;
  return *this;
}

ParamLinExpr& ParamLinExpr::operator*=(const Rational& k) {
  if (k == 0) {
    coeffs.clear();
    constant = LinExpr();
    return *this;
  }
  for (auto& [v, e] : coeffs) e *= k;
  constant *= k;
  return *this;
}

ParamLinExpr ParamLinExpr::subst(const std::string& v, const LinExpr& rhs) const {
  auto it = coeffs.find(v);
  if (it == coeffs.end()) return *this;
  LinExpr k = it->second;  // affine in unknowns
  ParamLinExpr out = *this;
  out.coeffs.erase(v);
  for (const auto& [pv, pc] : rhs.coeffs) {
    LinExpr add = k;
    add *= pc;
    LinExpr& slot = out.coeffs[pv];
    slot += add;
    if (slot == LinExpr()) out.coeffs.erase(pv);
  }
  LinExpr addc = k;
  addc *= rhs.constant;
  out.constant += addc;
  return out;
}

LinExpr ParamLinExpr::instantiate(const Valuation& unknowns) const {
  LinExpr out;
  for (const auto& [v, e] : coeffs) {
    Rational c = e.eval(unknowns);
    if (c != 0) out.coeffs[v] = c;
  }
  out.constant = constant.eval(unknowns);
  return out;
}

LinExpr ParamLinExpr::coeff(const std::string& v) const {
  auto it = coeffs.find(v);
  return it == coeffs.end() ? LinExpr() : it->second;
}

std::string ParamLinExpr::str() const {
  std::ostringstream os;
  for (const auto& [v, e] : coeffs) os << "(" << e.str() << ")*" << v << " + ";
  os << "(" << constant.str() << ")";
  return os.str();
}

std::vector<LinConstraint> farkas_encode(const Polyhedron& antecedent,
                                         const ParamLinExpr& consequent,
                                         const std::string& prefix) {
  for (const auto& c : antecedent.cs)
    if (c.strict)
      throw std::invalid_argument("farkas_encode needs a closed antecedent");

  {
    LPProblem feas;
    feas.constraints = antecedent;
    LPResult r = lp_solve(feas);
    if (r.status == LPStatus::Infeasible)
      throw UnsatisfiableAntecedent("empty antecedent for " + prefix +
                                    ": " + antecedent.str());
  }

  const size_t m = antecedent.cs.size();
  std::vector<std::string> lam(m);
  for (size_t r = 0; r < m; ++r)
    lam[r] = prefix + "_" + std::to_string(r);

  std::vector<LinConstraint> out;
  for (size_t r = 0; r < m; ++r)
    out.push_back({-LinExpr::var(lam[r]), false});

  std::set<std::string> pvars;
  for (const auto& c : antecedent.cs)
    for (const auto& [v, _] : c.expr.coeffs) pvars.insert(v);
  for (const auto& [v, _] : consequent.coeffs) pvars.insert(v);

  // For each program variable: sum_r lambda_r * A[r][v] == c_v, emitted as an
  // adjacent pair of opposite inequalities.
  for (const auto& v : pvars) {
    LinExpr lhs;
    for (size_t r = 0; r < m; ++r) {
      Rational a = antecedent.cs[r].expr.coeff(v);
      if (a != 0) lhs += LinExpr::var(lam[r], a);
    }
    lhs -= consequent.coeff(v);
    out.push_back({lhs, false});
    out.push_back({-lhs, false});
  }

  // d - sum_r lambda_r * b_r <= 0.
  LinExpr bound = consequent.constant;
  for (size_t r = 0; r < m; ++r) {
    Rational b = antecedent.cs[r].expr.constant;
    if (b != 0) bound -= LinExpr::var(lam[r], b);
  }
  out.push_back({bound, false});
  return out;
}

namespace {

Rational rand_rational(std::mt19937_64& rng, const Rational& lo, const Rational& hi) {
  const long den = 64;
  Rational lo_s = lo * den, hi_s = hi * den;
  Int lo_n = numerator(lo_s) / denominator(lo_s);
  Int hi_n = numerator(hi_s) / denominator(hi_s);
  if (hi_n < lo_n) return lo;
  // Spread is desk-scale; draw via uint64.
  Int span = hi_n - lo_n + 1;
  std::uint64_t span_u = span.convert_to<std::uint64_t>();
  std::uniform_int_distribution<std::uint64_t> dist(0, span_u - 1);
  return Rational(lo_n + Int(dist(rng)), Int(den));
}

}  // namespace

std::vector<Valuation> sample_polyhedron(const Polyhedron& p, int count,
                                         std::uint64_t seed) {
  Polyhedron cp = p.closure();
  {
    LPProblem feas;
    feas.constraints = cp;
    if (lp_solve(feas).status == LPStatus::Infeasible)
      throw UnsatisfiableAntecedent("sample_polyhedron: empty polyhedron");
  }
  const std::set<std::string> var_set = cp.vars();
  std::vector<std::string> vars(var_set.begin(), var_set.end());
  std::vector<Valuation> out;
  out.reserve(count);
  if (vars.empty()) {
    out.assign(count, Valuation{});
    return out;
  }

  const Rational cap(1000);
  std::map<std::string, std::pair<Rational, Rational>> box;
  for (const auto& v : vars) {
    LPProblem lo{LinExpr::var(v), false, cp};
    LPProblem hi{LinExpr::var(v), true, cp};
    LPResult rlo = lp_solve(lo), rhi = lp_solve(hi);
    Rational l = rlo.status == LPStatus::Optimal ? rlo.value : -cap;
    Rational h = rhi.status == LPStatus::Optimal ? rhi.value : cap;
    if (l < -cap) l = -cap;
    if (h > cap) h = cap;
    if (h < l) h = l;
    box[v] = {l, h};
  }

  std::mt19937_64 rng(seed);
  long attempts = 0;
  const long max_attempts = 60L * count;
  while (int(out.size()) < count && attempts < max_attempts) {
    ++attempts;
    Valuation pt;
    for (const auto& v : vars) {
      const auto& [l, h] = box[v];
      pt[v] = rand_rational(rng, l, h);
    }
    if (cp.contains(pt)) out.push_back(std::move(pt));
  }

  if (int(out.size()) < count) {
    // Thin polyhedron: mix vertices reached by random objectives instead.
    std::vector<Valuation> verts;
    std::uniform_int_distribution<int> cdist(-3, 3);
    for (int k = 0; k < 24 && int(verts.size()) < 8; ++k) {
      LinExpr objv;
      for (const auto& v : vars) objv += LinExpr::var(v, Rational(cdist(rng)));
      LPResult r = lp_solve({objv, (k % 2) == 0, cp});
      if (r.status == LPStatus::Optimal) {
        Valuation pt = r.assignment;
        if (cp.contains(pt)) verts.push_back(pt);
      } else if (r.status == LPStatus::Unbounded) {
        if (cp.contains(r.assignment)) verts.push_back(r.assignment);
      }
    }
    if (verts.empty()) {
      LPProblem feas;
      feas.constraints = cp;
      verts.push_back(lp_solve(feas).assignment);
    }
    std::uniform_int_distribution<int> wdist(0, 7);
    while (int(out.size()) < count) {
      Rational total(0);
      Valuation pt;
      std::vector<Rational> w(verts.size());
      for (auto& x : w) { x = Rational(wdist(rng) + 1); total += x; }
      for (size_t i = 0; i < verts.size(); ++i) {
        for (const auto& [v, val] : verts[i]) {
          pt[v] += val * w[i] / total;
        }
      }
      out.push_back(std::move(pt));
    }
  }
  return out;
}

}  // namespace lexrsm
