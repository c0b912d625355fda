#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lexrsm/rational.hpp"

namespace lexrsm {

// Finite tree-shaped probability space carrying a lexicographic ranking
// process: each node stores the process value X and the level Lv of the
// step taken there. The filtration is the tree structure itself, so
// conditional expectations are plain weighted sums over children.
struct InstanceNode {
  int t = 0;                 // time index; root 0, children t+1
  Rational prob = Rational(1);  // edge probability from the parent
  std::vector<Rational> x;
  int lv = 0;                // 0 exactly once the process has stopped
  std::vector<InstanceNode> children;

  bool internal() const { return !children.empty(); }
};

struct FiniteInstance {
  InstanceNode root;
  int horizon = 0;  // nodes live at t <= horizon-1; clauses checked at t < horizon-1
  int dim = 0;
  Rational c = Rational(1);  // ranking progress per step
};

// Structural invariants: probabilities sum to 1 per sibling group, X has
// `dim` entries, child times increment, levels stay in range, stopped nodes
// stay stopped with X frozen, nothing lives past the horizon.
std::vector<std::string> validate_instance(const FiniteInstance& inst);

// Conditional expectation of X_{t+1}[k] given the node, k 1-indexed.
// Rejects leaves: the truncated frontier has no successor distribution.
Rational cond_expect(const InstanceNode& node, int k);

enum class InstanceFlavor { UN, LW, SC, GLEX, RankingOnly };

struct ClauseFailure {
  std::string path;  // child indices from the root, "" for the root itself
  int t = 0;
  int k = 0;
  std::string clause;  // "ranking" | "non-negativity" | "expected-leftward"
};

struct FlavorVerdict {
  std::vector<ClauseFailure> failures;
  bool ok() const { return failures.empty(); }
};

// Evaluates, at every internal node with Lv != 0 and t < horizon-1, the
// c-ranking condition for k <= Lv plus the flavor's non-negativity: UN wants
// X[k] >= bottom for every k, LW for k <= Lv (against 0), SC at k = Lv only,
// GLEX adds expected leftward non-negativity (the mass of X_{t+1}[k] on
// children whose level drops below k must be >= 0 for k <= Lv), and
// RankingOnly checks no non-negativity at all. `bottom` is read by UN only.
FlavorVerdict check_flavor(const FiniteInstance& inst, InstanceFlavor flavor,
                           const Rational& bottom = Rational(0));

// Node-wise repair: X~[k] = -eps wherever X[k] < 0 or k > Lv, else X[k].
// The result is uniformly well-founded with bottom -eps by construction;
// only the ranking condition can break, and that is what fixability asks.
FiniteInstance eps_fix(const FiniteInstance& inst, const Rational& eps);

bool is_eps_fixable(const FiniteInstance& inst, const Rational& eps);

// Same check with the ranking clause waived at (node, k) whenever the fixed
// value still sits above bottom and the next step hits bottom at dimension k
// with probability >= gamma. Smaller gamma waives more, so fixability is
// antitone in gamma.
bool is_eps_gamma_fixable(const FiniteInstance& inst, const Rational& eps,
                          const Rational& gamma);

enum class RandomKind { GLEX, SC_TRIVIAL_SPACE, LW };

struct RandomParams {
  int dim = 3;
  int depth = 6;     // horizon; clauses live at t < depth-1
  Rational c = Rational(1);
};

// Deterministic per seed; instances satisfy the named flavor by construction
// (values are sampled, then clamped into the feasible clause region; each
// clamp is appended to `repairs` when given). SC_TRIVIAL_SPACE yields a
// single path, the trivial probability space.
FiniteInstance random_instance(RandomKind kind, std::uint64_t seed,
                               const RandomParams& params = {},
                               std::vector<std::string>* repairs = nullptr);

// The process behind the first motivating counterexample: a loop that exits
// when a coin with exponentially diminishing success probability 2^-v lands
// heads, at which point dimension 2 has plunged to -2^v. Leftward
// non-negative and 1-ranking, yet never eps-fixable: after fixing, the
// expected drop at the coin nodes shrinks to eps * 2^-v < 1.
FiniteInstance instance_diminishing_coin(int horizon);

// The second counterexample: each round either quadruples the stake
// (dimension 2 jumps to 4t+2) or busts to -2t-4 with probability 1/2.
// Not eps-fixable, but (eps, gamma)-fixable for any gamma <= 1/2 because
// the bust branch hits bottom with probability exactly 1/2.
FiniteInstance instance_quadrupling_stakes(int horizon);

// Horizon large enough that the diminishing-coin refutation of
// eps-fixability happens strictly inside the checked region: the first coin
// node with 2^v > eps must have its clauses evaluated.
int horizon_for_eps(const Rational& eps);

// JSON tree {t, prob, x, lv, children} with rationals as [num, den] pairs;
// the wrapper carries {horizon, dim, c, root}.
std::string instance_to_json(const FiniteInstance& inst);

struct LoadedInstance {
  FiniteInstance inst;
  std::vector<std::string> errors;
};
LoadedInstance instance_from_json(const std::string& text);

}  // namespace lexrsm
