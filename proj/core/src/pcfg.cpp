#include "lexrsm/pcfg.hpp"

#include <algorithm>
#include <set>

namespace lexrsm {

Distribution Distribution::dirac(Rational v) {
  Distribution d;
  d.kind = Kind::DiracConst;
  d.a = std::move(v);
  return d;
}

Distribution Distribution::uniform(Rational lo, Rational hi) {
  Distribution d;
  d.kind = Kind::Uniform;
  d.a = std::move(lo);
  d.b = std::move(hi);
  return d;
}

Distribution Distribution::normal(Rational mean, Rational stddev) {
  Distribution d;
  d.kind = Kind::Normal;
  d.a = std::move(mean);
  d.b = std::move(stddev);
  return d;
}

Rational Distribution::mean() const {
  switch (kind) {
    case Kind::DiracConst: return a;
    case Kind::Uniform: return (a + b) / 2;
    case Kind::Normal: return a;
  }
  return a;
}

std::string Distribution::str() const {
  switch (kind) {
    case Kind::DiracConst: return "dirac(" + rat_str(a) + ")";
    case Kind::Uniform: return "unif(" + rat_str(a) + ", " + rat_str(b) + ")";
    case Kind::Normal: return "norm(" + rat_str(a) + ", " + rat_str(b) + ")";
  }
  return "";
}

UpdateElem UpdateElem::det(LinExpr e) {
  UpdateElem u;
  u.kind = Kind::DetLinear;
  u.expr = std::move(e);
  return u;
}

UpdateElem UpdateElem::sample(Distribution d, LinExpr shift) {
  UpdateElem u;
  u.kind = Kind::Sample;
  u.dist = std::move(d);
  u.expr = std::move(shift);
  return u;
}

UpdateElem UpdateElem::ndet(Rational lo, Rational hi, LinExpr shift) {
  UpdateElem u;
  u.kind = Kind::Ndet;
  u.lo = std::move(lo);
  u.hi = std::move(hi);
  u.expr = std::move(shift);
  return u;
}

std::string UpdateElem::str() const {
  const bool shifted = !(expr == LinExpr{});
  switch (kind) {
    case Kind::DetLinear: return expr.str();
    case Kind::Sample:
      return (shifted ? expr.str() + " + " : "") + "sample(" + dist.str() + ")";
    case Kind::Ndet:
      return (shifted ? expr.str() + " + " : "") + "ndet(" + rat_str(lo) +
             ", " + rat_str(hi) + ")";
  }
  return "";
}

int PCFG::location_index(const std::string& label) const {
  for (size_t i = 0; i < locations.size(); ++i)
    if (locations[i] == label) return int(i);
  return -1;
}

const Transition* PCFG::transition(const std::string& id) const {
  for (const auto& t : transitions)
    if (t.id == id) return &t;
  return nullptr;
}

std::vector<const Transition*> PCFG::outgoing(int loc) const {
  std::vector<const Transition*> out;
  for (const auto& t : transitions)
    if (t.src == loc) out.push_back(&t);
  return out;
}

std::vector<std::string> PCFG::validate() const {
  std::vector<std::string> bad;
  auto complain = [&](const std::string& msg) { bad.push_back(msg); };

  if (locations.empty()) complain("no locations");
  if (l_in < 0 || l_in >= int(locations.size())) complain("l_in out of range");
  if (l_out < 0 || l_out >= int(locations.size())) complain("l_out out of range");

  std::set<std::string> vset(variables.begin(), variables.end());
  if (vset.size() != variables.size()) complain("duplicate variable name");
  std::set<std::string> lset(locations.begin(), locations.end());
  if (lset.size() != locations.size()) complain("duplicate location label");

  auto known_vars = [&](const LinExpr& e, const std::string& where) {
    for (const auto& [v, c] : e.coeffs)
      if (!vset.count(v)) complain(where + ": unknown variable " + v);
  };

  std::set<std::string> tids;
  int from_out = 0;
  for (const auto& t : transitions) {
    const std::string where = "transition " + t.id;
    if (!tids.insert(t.id).second) complain(where + ": duplicate id");
    if (t.src < 0 || t.src >= int(locations.size()))
      complain(where + ": source out of range");
    if (t.src == l_out) ++from_out;
    for (const auto& c : t.guard.cs) known_vars(c.expr, where + " guard");
    if (t.branches.empty()) complain(where + ": no branches");
    Rational total(0);
    for (const auto& br : t.branches) {
      if (br.prob <= 0) complain(where + ": branch probability not positive");
      total += br.prob;
      if (br.target < 0 || br.target >= int(locations.size()))
        complain(where + ": branch target out of range");
    }
    if (!t.branches.empty() && total != 1)
      complain(where + ": branch probabilities sum to " + rat_str(total));
    if (t.update) {
      const Update& up = *t.update;
      if (!vset.count(up.var)) complain(where + ": unknown update variable " + up.var);
      switch (up.elem.kind) {
        case UpdateElem::Kind::DetLinear:
          known_vars(up.elem.expr, where + " update");
          break;
        case UpdateElem::Kind::Sample:
          known_vars(up.elem.expr, where + " update shift");
          if (up.elem.dist.kind == Distribution::Kind::Uniform &&
              up.elem.dist.a > up.elem.dist.b)
            complain(where + ": uniform with lo > hi");
          if (up.elem.dist.kind == Distribution::Kind::Normal &&
              up.elem.dist.b <= 0)
            complain(where + ": normal with stddev <= 0");
          break;
        case UpdateElem::Kind::Ndet:
          known_vars(up.elem.expr, where + " update shift");
          if (up.elem.lo > up.elem.hi) complain(where + ": ndet with lo > hi");
          break;
      }
    }
  }

  const Transition* out = transition(tau_out);
  if (!out) {
    complain("tau_out " + tau_out + " not found");
  } else {
    if (out->src != l_out) complain("tau_out does not start at l_out");
    if (from_out != 1) complain("l_out must have exactly one outgoing transition");
    if (!out->guard.cs.empty()) complain("tau_out guard must be true");
    if (out->update) complain("tau_out must not update");
    bool self_loop = out->branches.size() == 1 &&
                     out->branches[0].target == l_out &&
                     out->branches[0].prob == 1;
    if (!self_loop) complain("tau_out must self-loop with probability 1");
  }
  return bad;
}

std::map<int, LinExpr> MeasurableMap::dimension(int k) const {
  std::map<int, LinExpr> out;
  for (const auto& [loc, exprs] : eta) {
    if (k < 0 || k >= int(exprs.size()))
      throw std::out_of_range("MeasurableMap::dimension: k out of range");
    out[loc] = exprs[k];
  }
  return out;
}

int LevelMap::at(const std::string& tid) const {
  auto it = lv.find(tid);
  if (it == lv.end())
    throw std::out_of_range("LevelMap: no level for transition " + tid);
  return it->second;
}

std::vector<std::string> validate_level_map(const PCFG& g, const LevelMap& lm,
                                            int dim) {
  std::vector<std::string> bad;
  for (const auto& t : g.transitions) {
    auto it = lm.lv.find(t.id);
    if (it == lm.lv.end()) {
      bad.push_back("no level for transition " + t.id);
      continue;
    }
    int k = it->second;
    if (k < 0 || k > dim)
      bad.push_back("level of " + t.id + " outside 0.." + std::to_string(dim));
    if ((k == 0) != (t.id == g.tau_out))
      bad.push_back("level 0 exactly on tau_out violated at " + t.id);
  }
  for (const auto& [tid, k] : lm.lv)
    if (!g.transition(tid)) bad.push_back("level for unknown transition " + tid);
  return bad;
}

std::vector<LinExpr> pre_expectation(const std::map<int, LinExpr>& eta_k,
                                     const Transition& tau) {
  return pre_expectation_generic(eta_k, tau);
}

std::vector<ParamLinExpr> pre_expectation_param(
    const std::map<int, ParamLinExpr>& eta_k, const Transition& tau) {
  return pre_expectation_generic(eta_k, tau);
}

std::vector<std::optional<LinExpr>> update_cases(const UpdateElem& e) {
  switch (e.kind) {
    case UpdateElem::Kind::DetLinear:
      return {e.expr};
    case UpdateElem::Kind::Sample:
      switch (e.dist.kind) {
        case Distribution::Kind::DiracConst:
          return {e.expr + LinExpr(e.dist.a)};
        case Distribution::Kind::Uniform:
          return {e.expr + LinExpr(e.dist.a), e.expr + LinExpr(e.dist.b)};
        case Distribution::Kind::Normal:
          return {std::nullopt};
      }
      return {std::nullopt};
    case UpdateElem::Kind::Ndet:
      return {e.expr + LinExpr(e.lo), e.expr + LinExpr(e.hi)};
  }
  return {};
}

CoverResult guards_cover(const PCFG& g, int loc, const Polyhedron& inv,
                         const Deadline* deadline) {
  std::vector<const Transition*> out = g.outgoing(loc);
  for (const Transition* t : out)
    if (t->guard.cs.empty()) return {CoverStatus::Covered, {}};

  long combos = 1;
  for (const Transition* t : out) {
    combos *= long(t->guard.cs.size());
    if (combos > 64) return {CoverStatus::Unverified, {}};
  }

  // Enumerate one negated atom per guard; the union of guards misses a point
  // of inv iff some combination is satisfiable.
  std::vector<size_t> pick(out.size(), 0);
  for (;;) {
    Polyhedron q = inv;
    for (size_t i = 0; i < out.size(); ++i) {
      const LinConstraint& atom = out[i]->guard.cs[pick[i]];
      q.cs.push_back({-atom.expr, !atom.strict});
    }
    if (auto w = nonempty_witness(q, deadline)) return {CoverStatus::Gap, *w};
    size_t i = 0;
    while (i < out.size()) {
      if (++pick[i] < out[i]->guard.cs.size()) break;
      pick[i] = 0;
      ++i;
    }
    if (i == out.size()) break;
  }
  return {CoverStatus::Covered, {}};
}

}  // namespace lexrsm
