#include "lexrsm/checker.hpp"

#include <cctype>
#include <stdexcept>

namespace lexrsm {

std::string flavor_name(Flavor f) {
  switch (f) {
    case Flavor::ST: return "st";
    case Flavor::LW: return "lw";
    case Flavor::SC: return "sc";
    case Flavor::SC_MCLC: return "sc_mclc";
    case Flavor::LLEX: return "llex";
  }
  return "?";
}

std::optional<Flavor> flavor_from_name(const std::string& s) {
  std::string u;
  for (char c : s) u.push_back(char(std::tolower(static_cast<unsigned char>(c))));
  if (u == "st") return Flavor::ST;
  if (u == "lw") return Flavor::LW;
  if (u == "sc") return Flavor::SC;
  if (u == "sc_mclc" || u == "mclc") return Flavor::SC_MCLC;
  if (u == "llex") return Flavor::LLEX;
  return std::nullopt;
}

namespace {

Polyhedron closed_domain(const Polyhedron& inv, const Polyhedron& guard) {
  Polyhedron p;
  p.cs.reserve(inv.cs.size() + guard.cs.size());
  for (const auto& c : inv.cs) p.cs.push_back(c.closed());
  for (const auto& c : guard.cs) p.cs.push_back(c.closed());
  return p;
}

// nullopt when max e over p is <= 0 (or p is empty); otherwise a point of p
// with e > 0, ray-scaled when the maximum is unbounded.
std::optional<Valuation> refute_leq(const Polyhedron& p, const LinExpr& e,
                                    const Deadline* dl) {
  LPProblem prob;
  prob.maximize = true;
  prob.objective = e;
  prob.constraints = p;
  LPResult r = lp_solve(prob, dl);
  if (r.status == LPStatus::Infeasible) return std::nullopt;
  if (r.status == LPStatus::Unbounded) return unbounded_witness(r);
  if (r.value <= 0) return std::nullopt;
  return r.assignment;
}

std::vector<std::map<int, LinExpr>> all_dimensions(const MeasurableMap& eta) {
  std::vector<std::map<int, LinExpr>> dims;
  dims.reserve(size_t(eta.dim));
  for (int k = 0; k < eta.dim; ++k) dims.push_back(eta.dimension(k));
  return dims;
}

int max_level_from(const PCFG& g, const LevelMap& lv, int loc) {
  int mx = 0;
  for (const auto& t : g.transitions)
    if (t.src == loc) mx = std::max(mx, lv.at(t.id));
  return mx;
}

}  // namespace

CheckResult check_certificate(const PCFG& g, const InvariantMap& inv,
                              const MeasurableMap& eta, const LevelMap& lv,
                              Flavor flavor, const Rational& c,
                              const Deadline* dl) {
  auto errs = validate_level_map(g, lv, eta.dim);
  if (!errs.empty()) throw std::invalid_argument(errs[0]);
  CheckResult res;
  const auto dims = all_dimensions(eta);

  for (const auto& tau : g.transitions) {
    if (tau.id == g.tau_out) continue;
    const int L = lv.at(tau.id);
    const Polyhedron P = closed_domain(inv.at(tau.src), tau.guard);
    for (int k = 1; k <= L; ++k) {
      const auto& ek = dims[size_t(k - 1)];
      const LinExpr& here = ek.at(tau.src);
      for (const LinExpr& f : pre_expectation(ek, tau)) {
        LinExpr gap = f - here;
        if (k == L) gap += LinExpr(c);
        if (auto w = refute_leq(P, gap, dl))
          res.violations.push_back({tau.id, k,
                                    k == L ? "ranking" : "unaffecting", *w,
                                    "expected successor value too large"});
      }
      const bool nonneg_here =
          flavor == Flavor::ST ? false : (flavor == Flavor::LW || k == L);
      if (nonneg_here)
        if (auto w = refute_leq(P, -here, dl))
          res.violations.push_back(
              {tau.id, k, "non-negativity", *w, "negative on the guard"});
    }
  }

  if (flavor == Flavor::ST) {
    for (size_t loc = 0; loc < g.locations.size(); ++loc) {
      const Polyhedron P = closed_domain(inv.at(int(loc)), {});
      for (int k = 1; k <= eta.dim; ++k)
        if (auto w = refute_leq(P, -dims[size_t(k - 1)].at(int(loc)), dl))
          res.violations.push_back({"", k, "non-negativity", *w,
                                    "negative at " + g.locations[loc]});
    }
  }

  if (flavor == Flavor::SC_MCLC) {
    auto more = check_mclc(g, inv, eta, lv, dl);
    res.violations.insert(res.violations.end(), more.begin(), more.end());
  }
  if (flavor == Flavor::LLEX) {
    CheckResult st = check_stability_at_negativity(g, inv, eta, lv, dl);
    res.violations.insert(res.violations.end(), st.violations.begin(),
                          st.violations.end());
    res.inconclusive.insert(res.inconclusive.end(), st.inconclusive.begin(),
                            st.inconclusive.end());
  }
  return res;
}

std::vector<Violation> check_mclc(const PCFG& g, const InvariantMap& inv,
                                  const MeasurableMap& eta, const LevelMap& lv,
                                  const Deadline* dl) {
  std::vector<Violation> out;
  const auto dims = all_dimensions(eta);

  for (int k = 1; k <= eta.dim; ++k) {
    const auto& ek = dims[size_t(k - 1)];
    std::vector<Violation> nonneg_branch, worstcase_branch;
    for (const auto& tau : g.transitions) {
      if (tau.id == g.tau_out || lv.at(tau.id) <= k) continue;
      const Polyhedron P = closed_domain(inv.at(tau.src), tau.guard);
      const LinExpr& here = ek.at(tau.src);

      if (auto w = refute_leq(P, -here, dl))
        nonneg_branch.push_back(
            {tau.id, k, "mclc", *w, "(6) negative on the guard"});

      for (const auto& br : tau.branches) {
        const LinExpr& tgt = ek.at(br.target);
        if (!tau.update) {
          if (auto w = refute_leq(P, tgt - here, dl))
            worstcase_branch.push_back(
                {tau.id, k, "mclc", *w, "(7) successor increases"});
          continue;
        }
        const std::string& var = tau.update->var;
        for (const auto& cs : update_cases(tau.update->elem)) {
          if (!cs) {
            if (tgt.coeff(var) != 0) {
              if (auto w = nonempty_witness(P, dl))
                worstcase_branch.push_back(
                    {tau.id, k, "mclc", *w,
                     "(7) unbounded normal update feeds " + var});
              continue;
            }
            if (auto w = refute_leq(P, tgt - here, dl))
              worstcase_branch.push_back(
                  {tau.id, k, "mclc", *w, "(7) successor increases"});
            continue;
          }
          if (auto w = refute_leq(P, tgt.subst(var, *cs) - here, dl))
            worstcase_branch.push_back(
                {tau.id, k, "mclc", *w, "(7) successor increases"});
        }
      }
    }
    if (!nonneg_branch.empty() && !worstcase_branch.empty()) {
      out.insert(out.end(), nonneg_branch.begin(), nonneg_branch.end());
      out.insert(out.end(), worstcase_branch.begin(), worstcase_branch.end());
    }
  }
  return out;
}

CheckResult check_stability_at_negativity(const PCFG& g,
                                          const InvariantMap& inv,
                                          const MeasurableMap& eta,
                                          const LevelMap& lv,
                                          const Deadline* dl) {
  CheckResult res;
  const auto dims = all_dimensions(eta);

  for (const auto& tau : g.transitions) {
    if (tau.id == g.tau_out) continue;
    const int L = lv.at(tau.id);
    for (int k = 1; k < L; ++k) {
      const auto& ek = dims[size_t(k - 1)];
      const LinExpr& here = ek.at(tau.src);
      Polyhedron P = closed_domain(inv.at(tau.src), tau.guard);
      P.cs.push_back({here, false});  // eta_k <= 0 at the source

      for (const auto& br : tau.branches) {
        if (max_level_from(g, lv, br.target) < k) continue;  // level escape
        const LinExpr& tgt = ek.at(br.target);

        auto classify = [&](const LinExpr& post) {
          auto w = refute_leq(P, post, dl);
          if (!w) return;
          // Failure found on the closed region; a genuine violation needs a
          // point with eta_k strictly negative and the successor >= 0.
          LPProblem prob;
          prob.maximize = true;
          prob.objective = -here;
          prob.constraints = P;
          prob.constraints.cs.push_back({-post, false});
          LPResult r = lp_solve(prob, dl);
          if (r.status == LPStatus::Unbounded)
            res.violations.push_back({tau.id, k, "stability",
                                      unbounded_witness(r),
                                      "negative component turns non-negative"});
          else if (r.status == LPStatus::Optimal && r.value > 0)
            res.violations.push_back({tau.id, k, "stability", r.assignment,
                                      "negative component turns non-negative"});
          else
            res.inconclusive.push_back(
                {tau.id, k, "stability", *w,
                 "fails only where the component is exactly zero"});
        };

        if (!tau.update) {
          classify(tgt);
          continue;
        }
        const std::string& var = tau.update->var;
        for (const auto& cs : update_cases(tau.update->elem)) {
          if (!cs) {
            if (tgt.coeff(var) != 0) {
              if (auto w = nonempty_witness(P, dl))
                res.violations.push_back(
                    {tau.id, k, "stability", *w,
                     "unbounded normal update feeds " + var});
              continue;
            }
            classify(tgt);
            continue;
          }
          classify(tgt.subst(var, *cs));
        }
      }
    }
  }
  return res;
}

std::vector<Violation> audit_invariant(const PCFG& g, const InvariantMap& inv,
                                       const Deadline* dl) {
  std::vector<Violation> out;
  for (const auto& tau : g.transitions) {
    Polyhedron P = inv.at(tau.src);
    P.cs.insert(P.cs.end(), tau.guard.cs.begin(), tau.guard.cs.end());

    for (const auto& br : tau.branches) {
      for (const auto& atom : inv.at(br.target).cs) {
        auto report = [&](const Valuation& w) {
          out.push_back({tau.id, 0, "invariant-inductiveness", w,
                         "atom " + atom.expr.str() +
                             (atom.strict ? " < 0" : " <= 0") + " at " +
                             g.locations[size_t(br.target)]});
        };
        auto check_post = [&](const LinExpr& e) {
          Polyhedron bad = P;
          bad.cs.push_back({-e, !atom.strict});
          if (auto w = nonempty_witness(bad, dl)) report(*w);
        };
        if (!tau.update) {
          check_post(atom.expr);
          continue;
        }
        const std::string& var = tau.update->var;
        for (const auto& cs : update_cases(tau.update->elem)) {
          if (!cs) {
            if (atom.expr.coeff(var) != 0) {
              if (auto w = nonempty_witness(P, dl)) report(*w);
              continue;
            }
            check_post(atom.expr);
            continue;
          }
          check_post(atom.expr.subst(var, *cs));
        }
      }
    }
  }
  return out;
}

}  // namespace lexrsm
