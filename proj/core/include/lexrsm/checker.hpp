#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lexrsm/invariants.hpp"
#include "lexrsm/lp.hpp"
#include "lexrsm/pcfg.hpp"

namespace lexrsm {

// Non-negativity flavors, weakest to strongest requirement set:
//   ST       every dimension non-negative at every location over I
//   LW       dimensions k <= Lv(tau) non-negative over I /\ G(tau)
//   SC       only the ranking dimension k = Lv(tau) non-negative
//   SC_MCLC  SC plus the per-dimension multiple-choice leftward condition
//   LLEX     SC plus stability at negativity
// SC_MCLC implies LLEX; ST implies LW implies SC.
enum class Flavor { ST, LW, SC, SC_MCLC, LLEX };

std::string flavor_name(Flavor f);
std::optional<Flavor> flavor_from_name(const std::string& s);

struct Violation {
  std::string transition;  // empty for location-scoped clauses (ST rows)
  int dimension = 0;       // 1-indexed; 0 for invariant clauses
  std::string clause;      // ranking | unaffecting | non-negativity | mclc |
                           // stability | invariant-inductiveness
  Valuation witness;       // falsifying point; ray-scaled at 10^6 if unbounded
  std::string detail;
};

struct CheckResult {
  std::vector<Violation> violations;
  // Stability boundary cases: the closed check failed only where the
  // component is exactly zero, so the strict clause may still hold.
  std::vector<Violation> inconclusive;

  bool ok() const { return violations.empty() && inconclusive.empty(); }
};

// Verifies the c-ranking condition (expected value of dimension k after tau
// is at most the current value, minus c when k = Lv(tau)) for k <= Lv(tau)
// over the closed region I /\ G(tau), plus the flavor's non-negativity
// clauses and extras. Entailments are exact rational LPs; a failing clause
// yields a Violation with the maximizer as witness, never an abort.
CheckResult check_certificate(const PCFG& g, const InvariantMap& inv,
                              const MeasurableMap& eta, const LevelMap& lv,
                              Flavor flavor, const Rational& c = Rational(1),
                              const Deadline* deadline = nullptr);

// Per dimension k, either every tau with k < Lv(tau) keeps eta_k >= 0 on
// I /\ G(tau) (condition (6)), or every such tau never increases eta_k on any
// successor (condition (7), checked per branch target and per update
// endpoint; a Normal-updated variable with nonzero target coefficient fails
// the worst case outright). Violations for a dimension are reported only
// when both branches fail, tagged with the branch that produced them.
std::vector<Violation> check_mclc(const PCFG& g, const InvariantMap& inv,
                                  const MeasurableMap& eta, const LevelMap& lv,
                                  const Deadline* deadline = nullptr);

// Stability at negativity: for tau, k < Lv(tau), on the closed region
// I /\ G(tau) /\ eta_k <= 0, every successor expression stays <= 0, unless
// every transition from the successor's location has level < k. A failure
// with an interior point (eta_k strictly negative) is a Violation; a failure
// confined to the eta_k = 0 boundary is Inconclusive, because the paper's
// clause only constrains strictly negative points.
CheckResult check_stability_at_negativity(const PCFG& g,
                                          const InvariantMap& inv,
                                          const MeasurableMap& eta,
                                          const LevelMap& lv,
                                          const Deadline* deadline = nullptr);

// Inductiveness of the invariant map: for every transition and branch, each
// atom of the target invariant holds after the update, assuming the source
// invariant and guard. Exact: strict atoms are kept strict on both sides.
// Sample/Ndet updates are checked at all support endpoints; a Normal update
// requires the target atoms to be independent of the updated variable.
std::vector<Violation> audit_invariant(const PCFG& g, const InvariantMap& inv,
                                       const Deadline* deadline = nullptr);

}  // namespace lexrsm
