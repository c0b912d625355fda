#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lexrsm/invariants.hpp"
#include "lexrsm/pcfg.hpp"

namespace lexrsm {

// Search strategy for one synthesis run. The kinds differ only in how a
// dimension may treat the transitions it leaves unranked:
//   STR  non-negativity at every location, no fallback classes
//   LWN  non-negativity on every unranked guard, no fallback classes
//   SMC  like LWN, falling back to singleton target sets with worst-case
//        non-increase elsewhere
//   EMC  like SMC with every nonempty subset as a candidate target set
struct Strategy {
  enum class Kind { STR, LWN, SMC, EMC };
  Kind kind = Kind::SMC;
  Rational c = Rational(1);  // ranking progress per step
  int max_dim = 12;
};

std::string strategy_name(Strategy::Kind k);
std::optional<Strategy::Kind> strategy_from_name(const std::string& s);

// How a dimension constrains the transitions it leaves unranked: NonNeg keeps
// the map non-negative on each unranked guard, StrictDecrease keeps every
// successor expression pointwise non-increasing instead.
enum class DimBranch { NonNeg, StrictDecrease };

struct Certificate {
  MeasurableMap eta;  // one expression per location and dimension
  LevelMap lv;        // 1-indexed levels; 0 exactly on tau_out
  std::map<int, DimBranch> branch;                 // dimension -> clause
  std::map<int, std::vector<std::string>> ranked;  // dimension -> ids, sorted
  Strategy strategy;
  std::vector<long> dim_ms;  // wall time per accepted dimension
  long total_ms = 0;
};

struct Failure {
  enum class Reason { NoProgress, MaxDim };
  Reason reason = Reason::NoProgress;
  std::vector<std::string> unranked;  // residual set, sorted by id
};

struct SynthesisResult {
  std::optional<Certificate> cert;
  std::optional<Failure> failure;
  bool ok() const { return cert.has_value(); }
};

// One implication that some accepted dimension's LP certified: consequent <= 0
// everywhere on the (closed, nonempty) antecedent. Recorded so that external
// audits can re-check the reduction pointwise on sampled antecedent points.
struct EncodingRecord {
  Polyhedron antecedent;
  LinExpr consequent;
  std::string origin;
};
using EncodingRecorder = std::vector<EncodingRecord>;

// One LP over template coefficients plus a progress variable eps in [0,1] per
// unranked transition: expected successor values obey f <= eta - c*eps on the
// guard, eta stays non-negative on every unranked guard (or, with
// nonneg_everywhere, at every location over its invariant), and Sum eps is
// maximized. Transitions whose optimal eps equals 1 are ranked; empty-domain
// transitions rank vacuously. ranked.empty() signals no progress, in which
// case eta_k is meaningless.
struct NonnegOutcome {
  std::map<int, LinExpr> eta_k;
  std::vector<std::string> ranked;
};
NonnegOutcome attempt_nonneg_dimension(const PCFG& g, const InvariantMap& inv,
                                       const std::vector<std::string>& unranked,
                                       const Rational& c,
                                       bool nonneg_everywhere = false,
                                       const Deadline* deadline = nullptr,
                                       EncodingRecorder* rec = nullptr);

// Feasibility LP that ranks exactly the target set: for targets, f <= eta - c
// plus non-negativity on the guard; for the rest, every successor expression
// (each branch separately, both interval endpoints, bounded sample support
// endpoints; an unbounded normal draw forces the target coefficient of the
// updated variable to 0) is pointwise <= eta at the source. Infeasibility is
// a normal outcome and drives the caller's candidate iteration.
std::optional<std::map<int, LinExpr>> attempt_strict_dimension(
    const PCFG& g, const InvariantMap& inv,
    const std::vector<std::string>& unranked,
    const std::vector<std::string>& target, const Rational& c,
    const Deadline* deadline = nullptr, EncodingRecorder* rec = nullptr);

// Fallback target sets in attempt order: none for STR/LWN, singletons in id
// order for SMC, every nonempty subset for EMC in descending size with ties
// broken lexicographically on the sorted id vectors.
std::vector<std::vector<std::string>> class_enumerate(
    const Strategy& strategy, const std::vector<std::string>& unranked);

// Iterative search: each dimension first tries attempt_nonneg_dimension, then
// the strategy's fallback classes, and must rank at least one new transition;
// otherwise Failure(NoProgress) with the residual set. Exceeding max_dim with
// transitions left reports Failure(MaxDim). Certificates round-trip through
// the checker with the flavor matching the strategy. Requires an invariant
// entry per location (audit_invariant confirms candidates beforehand).
SynthesisResult synthesize(const PCFG& g, const InvariantMap& inv,
                           const Strategy& strategy,
                           const Deadline* deadline = nullptr,
                           EncodingRecorder* rec = nullptr);

}  // namespace lexrsm
