#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lexrsm/farkas.hpp"
#include "lexrsm/lp.hpp"

namespace lexrsm {

// Update distributions. Every variant has an exact rational first moment;
// only Normal has unbounded support.
struct Distribution {
  enum class Kind { DiracConst, Uniform, Normal };
  Kind kind = Kind::DiracConst;
  Rational a;  // DiracConst: value; Uniform: lo; Normal: mean
  Rational b;  // Uniform: hi; Normal: stddev

  static Distribution dirac(Rational v);
  static Distribution uniform(Rational lo, Rational hi);
  static Distribution normal(Rational mean, Rational stddev);

  Rational mean() const;
  bool bounded_support() const { return kind != Kind::Normal; }
  std::string str() const;
};

// Right-hand side of an assignment: deterministic linear expression, an
// affine shift plus a draw from a distribution, or an affine shift plus a
// nondeterministic pick from a closed bounded interval (resolved demonically).
// The shift covers the common source form `x := f(x) + unif(a, b)`.
struct UpdateElem {
  enum class Kind { DetLinear, Sample, Ndet };
  Kind kind = Kind::DetLinear;
  LinExpr expr;       // DetLinear: full rhs; Sample/Ndet: the shift (often 0)
  Distribution dist;  // Sample
  Rational lo, hi;    // Ndet

  static UpdateElem det(LinExpr e);
  static UpdateElem sample(Distribution d, LinExpr shift = {});
  static UpdateElem ndet(Rational lo, Rational hi, LinExpr shift = {});
  std::string str() const;
};

struct Update {
  std::string var;
  UpdateElem elem;
};

struct Branch {
  Rational prob;
  int target = -1;

  bool operator==(const Branch& o) const = default;
};

// Generalized transition: guarded, with a probability distribution over
// target locations and at most one update applied on every branch.
struct Transition {
  std::string id;
  int src = -1;
  Polyhedron guard;  // empty cs = true
  std::vector<Branch> branches;
  std::optional<Update> update;
};

struct PCFG {
  std::vector<std::string> variables;
  std::vector<std::string> locations;  // index = location id
  std::vector<Transition> transitions;
  int l_in = -1;
  int l_out = -1;
  std::string tau_out;  // id of the self-loop at l_out

  int location_index(const std::string& label) const;          // -1 if absent
  const Transition* transition(const std::string& id) const;   // null if absent
  std::vector<const Transition*> outgoing(int loc) const;

  // Structural diagnostics; empty means well-formed. Checks location/variable
  // references, positive branch probabilities summing to 1, bounded Ndet
  // intervals, distribution parameter ranges, and that tau_out names the
  // unique transition from l_out: a guard-true self-loop with no update.
  std::vector<std::string> validate() const;
};

// n linear expressions per location.
struct MeasurableMap {
  int dim = 0;
  std::map<int, std::vector<LinExpr>> eta;

  // eta[k] at every location, as pre_expectation input. k is 0-based.
  std::map<int, LinExpr> dimension(int k) const;
};

// Transition id -> level in {0..dim}; 0 exactly on tau_out.
struct LevelMap {
  std::map<std::string, int> lv;

  int at(const std::string& tid) const;  // throws on missing id
};

std::vector<std::string> validate_level_map(const PCFG& g, const LevelMap& lm,
                                            int dim);

class UndefinedTarget : public std::runtime_error {
 public:
  explicit UndefinedTarget(const std::string& what) : std::runtime_error(what) {}
};

// Maximal pre-expectation of a linear map along tau, as a finite set of
// expressions over the source valuation whose pointwise max is the value.
// DetLinear substitutes the update; Sample substitutes the first moment
// (exact by linearity); Ndet yields one expression per endpoint, since the
// demonic choice of an affine function over an interval is attained there.
// Probabilistic branches contribute probability-weighted sums. Output size is
// 2 for Ndet and 1 otherwise, independent of branch count.
//
// Works for concrete expressions and for template expressions whose
// coefficients are affine in synthesis unknowns.
template <class Expr>
std::vector<Expr> pre_expectation_generic(const std::map<int, Expr>& eta_k,
                                          const Transition& tau) {
  auto weighted = [&](const Rational* ndet_choice) {
    Expr acc{};
    for (const auto& br : tau.branches) {
      auto it = eta_k.find(br.target);
      if (it == eta_k.end())
        throw UndefinedTarget("pre_expectation: no expression at location " +
                              std::to_string(br.target));
      Expr e = it->second;
      if (tau.update) {
        const Update& up = *tau.update;
        switch (up.elem.kind) {
          case UpdateElem::Kind::DetLinear:
            e = e.subst(up.var, up.elem.expr);
            break;
          case UpdateElem::Kind::Sample:
            e = e.subst(up.var, up.elem.expr + LinExpr(up.elem.dist.mean()));
            break;
          case UpdateElem::Kind::Ndet:
            e = e.subst(up.var, up.elem.expr + LinExpr(*ndet_choice));
            break;
        }
      }
      e *= br.prob;
      acc += e;
    }
    return acc;
  };
  if (tau.update && tau.update->elem.kind == UpdateElem::Kind::Ndet)
    return {weighted(&tau.update->elem.lo), weighted(&tau.update->elem.hi)};
  return {weighted(nullptr)};
}

std::vector<LinExpr> pre_expectation(const std::map<int, LinExpr>& eta_k,
                                     const Transition& tau);
std::vector<ParamLinExpr> pre_expectation_param(
    const std::map<int, ParamLinExpr>& eta_k, const Transition& tau);

// Extreme concrete right-hand sides of an update, for worst-case (rather
// than expected-value) reasoning: the full expression for DetLinear, shift
// plus each support endpoint for Dirac/Uniform samples and for Ndet, and
// nullopt for Normal, whose support is unbounded; callers must treat the
// updated variable specially in that case.
std::vector<std::optional<LinExpr>> update_cases(const UpdateElem& e);

// Deadlock-freedom audit at one location: do the outgoing guards cover inv?
// Exact when the product of guard atom counts is small (the complement is
// expanded into at most 64 conjunctions, each checked for a strict-aware
// witness); larger products are reported Unverified.
enum class CoverStatus { Covered, Gap, Unverified };
struct CoverResult {
  CoverStatus status = CoverStatus::Unverified;
  Valuation witness;  // Gap only: an inv-point enabled by no guard
};
CoverResult guards_cover(const PCFG& g, int loc, const Polyhedron& inv,
                         const Deadline* deadline = nullptr);

}  // namespace lexrsm
