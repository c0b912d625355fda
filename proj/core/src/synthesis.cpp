#include "lexrsm/synthesis.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <iterator>
#include <numeric>
#include <set>
#include <stdexcept>

namespace lexrsm {

namespace {

Polyhedron closed_domain(const Polyhedron& inv, const Polyhedron& guard) {
  Polyhedron p;
  for (const auto& c : inv.cs) p.cs.push_back(c.closed());
  for (const auto& c : guard.cs) p.cs.push_back(c.closed());
  return p;
}

// Full affine template per location over every program variable; the exit
// location is pinned to the zero expression.
std::map<int, ParamLinExpr> make_template(const PCFG& g) {
  std::map<int, ParamLinExpr> t;
  for (int i = 0; i < int(g.locations.size()); ++i) {
    ParamLinExpr e;
    if (i != g.l_out) {
      for (const auto& v : g.variables)
        e.coeffs[v] = LinExpr::var("tv_" + g.locations[i] + "_" + v);
      e.constant = LinExpr::var("tc_" + g.locations[i]);
    }
    t.emplace(i, std::move(e));
  }
  return t;
}

// Accumulates LP rows; implications go through the Farkas reduction with a
// fresh multiplier prefix per call and are kept symbolic so a feasible
// solution can be replayed into an EncodingRecorder.
struct Emitter {
  std::vector<LinConstraint> rows;
  std::vector<EncodingRecord> pending;  // consequent field unused until record
  std::vector<ParamLinExpr> symbolic;
  int calls = 0;

  void imply(const Polyhedron& p, const ParamLinExpr& cons,
             const std::string& origin) {
    auto enc = farkas_encode(p, cons, "lam" + std::to_string(calls++));
    rows.insert(rows.end(), enc.begin(), enc.end());
    pending.push_back({p, LinExpr{}, origin});
    symbolic.push_back(cons);
  }
  void raw(LinExpr e) { rows.push_back({std::move(e), false}); }
  void record(EncodingRecorder* rec, const Valuation& sol) {
    if (!rec) return;
    for (size_t i = 0; i < pending.size(); ++i) {
      EncodingRecord r = pending[i];
      r.consequent = symbolic[i].instantiate(sol);
      rec->push_back(std::move(r));
    }
  }
};

const Transition& transition_or_throw(const PCFG& g, const std::string& tid) {
  const Transition* t = g.transition(tid);
  if (!t) throw std::invalid_argument("synthesis: unknown transition " + tid);
  return *t;
}

long ms_between(std::chrono::steady_clock::time_point a,
                std::chrono::steady_clock::time_point b) {
  return long(
      std::chrono::duration_cast<std::chrono::milliseconds>(b - a).count());
}

}  // namespace

std::string strategy_name(Strategy::Kind k) {
  switch (k) {
    case Strategy::Kind::STR: return "STR";
    case Strategy::Kind::LWN: return "LWN";
    case Strategy::Kind::SMC: return "SMC";
    case Strategy::Kind::EMC: return "EMC";
  }
  return "?";
}

std::optional<Strategy::Kind> strategy_from_name(const std::string& s) {
  std::string u;
  for (char c : s) u.push_back(char(std::toupper(static_cast<unsigned char>(c))));
  if (u == "STR") return Strategy::Kind::STR;
  if (u == "LWN") return Strategy::Kind::LWN;
  if (u == "SMC") return Strategy::Kind::SMC;
  if (u == "EMC") return Strategy::Kind::EMC;
  return std::nullopt;
}

NonnegOutcome attempt_nonneg_dimension(const PCFG& g, const InvariantMap& inv,
                                       const std::vector<std::string>& unranked,
                                       const Rational& c,
                                       bool nonneg_everywhere,
                                       const Deadline* deadline,
                                       EncodingRecorder* rec) {
  auto tmpl = make_template(g);
  Emitter em;
  for (const auto& tid : unranked) {
    const Transition& tau = transition_or_throw(g, tid);
    LinExpr eps = LinExpr::var("eps_" + tid);
    em.raw(eps - LinExpr(Rational(1)));
    em.raw(-eps);
    Polyhedron p = closed_domain(inv.at(tau.src), tau.guard);
    // Empty domain: no rows, so the objective floats eps to 1 and the
    // transition ranks vacuously.
    if (!nonempty_witness(p, deadline)) continue;
    auto pres = pre_expectation_param(tmpl, tau);
    for (size_t j = 0; j < pres.size(); ++j) {
      ParamLinExpr cons = pres[j] - tmpl.at(tau.src);
      cons.constant += LinExpr::var("eps_" + tid, c);
      em.imply(p, cons, tid + " ranking e" + std::to_string(j));
    }
    if (!nonneg_everywhere) em.imply(p, -tmpl.at(tau.src), tid + " nonneg");
  }
  if (nonneg_everywhere) {
    for (int i = 0; i < int(g.locations.size()); ++i) {
      if (i == g.l_out) continue;
      Polyhedron p = closed_domain(inv.at(i), Polyhedron{});
      if (!nonempty_witness(p, deadline)) continue;
      em.imply(p, -tmpl.at(i), g.locations[i] + " nonneg");
    }
  }

  LPProblem lp;
  lp.maximize = true;
  for (const auto& tid : unranked) lp.objective += LinExpr::var("eps_" + tid);
  lp.constraints = Polyhedron{em.rows};
  LPResult r = lp_solve(lp, deadline);
  if (r.status != LPStatus::Optimal)
    throw std::logic_error("ranking LP lost feasibility");

  NonnegOutcome out;
  for (const auto& tid : unranked) {
    auto it = r.assignment.find("eps_" + tid);
    if (it != r.assignment.end() && it->second == Rational(1))
      out.ranked.push_back(tid);
  }
  if (out.ranked.empty()) return out;

  // Re-solve with the ranked eps pinned to 1; adjacent rows merge into
  // equalities. The optimum must persist, and its template values are the
  // ones kept.
  for (const auto& tid : out.ranked) {
    LinExpr eps = LinExpr::var("eps_" + tid);
    em.raw(eps - LinExpr(Rational(1)));
    em.raw(LinExpr(Rational(1)) - eps);
  }
  lp.constraints = Polyhedron{em.rows};
  LPResult r2 = lp_solve(lp, deadline);
  if (r2.status != LPStatus::Optimal)
    throw std::logic_error("pinned ranking LP lost feasibility");
  for (const auto& [loc, e] : tmpl) out.eta_k[loc] = e.instantiate(r2.assignment);
  em.record(rec, r2.assignment);
  return out;
}

std::optional<std::map<int, LinExpr>> attempt_strict_dimension(
    const PCFG& g, const InvariantMap& inv,
    const std::vector<std::string>& unranked,
    const std::vector<std::string>& target, const Rational& c,
    const Deadline* deadline, EncodingRecorder* rec) {
  auto tmpl = make_template(g);
  Emitter em;
  const std::set<std::string> tgt(target.begin(), target.end());
  for (const auto& tid : unranked) {
    const Transition& tau = transition_or_throw(g, tid);
    Polyhedron p = closed_domain(inv.at(tau.src), tau.guard);
    if (!nonempty_witness(p, deadline)) continue;  // vacuous either way
    if (tgt.count(tid)) {
      auto pres = pre_expectation_param(tmpl, tau);
      for (size_t j = 0; j < pres.size(); ++j) {
        ParamLinExpr cons = pres[j] - tmpl.at(tau.src);
        cons.constant += LinExpr(c);
        em.imply(p, cons, tid + " ranking e" + std::to_string(j));
      }
      em.imply(p, -tmpl.at(tau.src), tid + " nonneg");
      continue;
    }
    // Worst-case non-increase toward every successor expression.
    for (size_t b = 0; b < tau.branches.size(); ++b) {
      const ParamLinExpr& at_tgt = tmpl.at(tau.branches[b].target);
      std::string o = tid + " case b" + std::to_string(b);
      if (!tau.update) {
        em.imply(p, at_tgt - tmpl.at(tau.src), o);
        continue;
      }
      const std::string& var = tau.update->var;
      auto cases = update_cases(tau.update->elem);
      for (size_t ci = 0; ci < cases.size(); ++ci) {
        std::string oc = o + " e" + std::to_string(ci);
        if (cases[ci]) {
          em.imply(p, at_tgt.subst(var, *cases[ci]) - tmpl.at(tau.src), oc);
        } else {
          // Unbounded draw: the target may not depend on the written
          // variable at all.
          LinExpr coeff = at_tgt.coeff(var);
          if (!(coeff == LinExpr{})) {
            em.raw(coeff);
            em.raw(-coeff);
          }
          em.imply(p, at_tgt.subst(var, LinExpr{}) - tmpl.at(tau.src), oc);
        }
      }
    }
  }

  LPProblem lp;  // pure feasibility
  lp.constraints = Polyhedron{em.rows};
  LPResult r = lp_solve(lp, deadline);
  if (r.status != LPStatus::Optimal) return std::nullopt;
  std::map<int, LinExpr> eta_k;
  for (const auto& [loc, e] : tmpl) eta_k[loc] = e.instantiate(r.assignment);
  em.record(rec, r.assignment);
  return eta_k;
}

std::vector<std::vector<std::string>> class_enumerate(
    const Strategy& strategy, const std::vector<std::string>& unranked) {
  std::vector<std::string> u = unranked;
  std::sort(u.begin(), u.end());
  std::vector<std::vector<std::string>> out;
  switch (strategy.kind) {
    case Strategy::Kind::STR:
    case Strategy::Kind::LWN:
      return out;
    case Strategy::Kind::SMC:
      for (const auto& tid : u) out.push_back({tid});
      return out;
    case Strategy::Kind::EMC: {
      const int n = int(u.size());
      if (n > 20)
        throw std::length_error(
            "brute-force class enumeration over more than 20 transitions");
      for (int s = n; s >= 1; --s) {
        std::vector<int> idx(size_t(s), 0);
        std::iota(idx.begin(), idx.end(), 0);
        while (true) {
          std::vector<std::string> t;
          t.reserve(size_t(s));
          for (int i : idx) t.push_back(u[size_t(i)]);
          out.push_back(std::move(t));
          int i = s - 1;
          while (i >= 0 && idx[size_t(i)] == n - s + i) --i;
          if (i < 0) break;
          ++idx[size_t(i)];
          for (int j = i + 1; j < s; ++j) idx[size_t(j)] = idx[size_t(j - 1)] + 1;
        }
      }
      return out;
    }
  }
  return out;
}

SynthesisResult synthesize(const PCFG& g, const InvariantMap& inv,
                           const Strategy& strategy, const Deadline* deadline,
                           EncodingRecorder* rec) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  if (strategy.max_dim < 1)
    throw std::invalid_argument("synthesis: max_dim must be positive");

  std::vector<std::string> u;
  for (const auto& t : g.transitions)
    if (t.id != g.tau_out) u.push_back(t.id);
  std::sort(u.begin(), u.end());

  Certificate cert;
  cert.strategy = strategy;
  std::vector<std::map<int, LinExpr>> dims;

  int k = 0;
  while (!u.empty() && k < strategy.max_dim) {
    const auto dim_start = clock::now();
    ++k;
    EncodingRecorder local;
    EncodingRecorder* lp_rec = rec ? &local : nullptr;
    bool adopted = false;

    NonnegOutcome out = attempt_nonneg_dimension(
        g, inv, u, strategy.c, strategy.kind == Strategy::Kind::STR, deadline,
        lp_rec);
    if (!out.ranked.empty()) {
      dims.push_back(std::move(out.eta_k));
      cert.branch[k] = DimBranch::NonNeg;
      cert.ranked[k] = std::move(out.ranked);
      adopted = true;
    } else {
      for (auto& t : class_enumerate(strategy, u)) {
        local.clear();
        if (auto ek =
                attempt_strict_dimension(g, inv, u, t, strategy.c, deadline,
                                         lp_rec)) {
          dims.push_back(std::move(*ek));
          cert.branch[k] = DimBranch::StrictDecrease;
          cert.ranked[k] = std::move(t);
          adopted = true;
          break;
        }
      }
    }
    if (!adopted)
      return {std::nullopt, Failure{Failure::Reason::NoProgress, std::move(u)}};
    if (rec)
      for (auto& r0 : local)
        rec->push_back({std::move(r0.antecedent), std::move(r0.consequent),
                        "dim " + std::to_string(k) + " " + r0.origin});
    std::vector<std::string> rest;
    std::set_difference(u.begin(), u.end(), cert.ranked[k].begin(),
                        cert.ranked[k].end(), std::back_inserter(rest));
    u = std::move(rest);
    cert.dim_ms.push_back(ms_between(dim_start, clock::now()));
  }
  if (!u.empty())
    return {std::nullopt, Failure{Failure::Reason::MaxDim, std::move(u)}};

  cert.eta.dim = k;
  for (int i = 0; i < int(g.locations.size()); ++i) {
    auto& row = cert.eta.eta[i];
    for (const auto& d : dims) row.push_back(d.at(i));
  }
  cert.lv.lv[g.tau_out] = 0;
  for (const auto& [dim, ids] : cert.ranked)
    for (const auto& tid : ids) cert.lv.lv[tid] = dim;
  cert.total_ms = ms_between(start, clock::now());
  return {std::move(cert), std::nullopt};
}

}  // namespace lexrsm
