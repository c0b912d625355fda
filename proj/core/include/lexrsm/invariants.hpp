#pragma once

#include <map>
#include <string>
#include <vector>

#include "lexrsm/lower.hpp"

namespace lexrsm {

using InvariantMap = std::map<int, Polyhedron>;

// Lines of the form `label: conjunction`; # comments and blank lines are
// skipped. Disjunctive bodies (!= atoms) and duplicate labels are errors.
std::map<std::string, Polyhedron> parse_annotations(const std::string& text);

struct AttachResult {
  InvariantMap inv;  // one entry per location, possibly empty (= true)
  std::vector<std::string> errors;
};

// I(loc) = user annotation  /\  loop annotation  /\  guard atoms common to
// every incoming branch. An atom propagates only if the incoming transition's
// update does not touch it; valuation-preserving self-loops (same source, no
// update) do not block propagation. The entry location stays true: the
// initial valuation is arbitrary, so annotating it is an error. Single pass,
// no fixpoint; the result is a candidate that audit_invariant must confirm.
AttachResult attach_invariants(const PCFG& g,
                               const std::map<std::string, Polyhedron>& by_label,
                               const std::map<int, Polyhedron>& loop_annots);

}  // namespace lexrsm
