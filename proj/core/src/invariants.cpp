#include "lexrsm/invariants.hpp"

#include <algorithm>
#include <sstream>

#include "lexrsm/parser.hpp"

namespace lexrsm {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

void append_unique(Polyhedron& p, const LinConstraint& c) {
  for (const auto& have : p.cs)
    if (have == c) return;
  p.cs.push_back(c);
}

}  // namespace

std::map<std::string, Polyhedron> parse_annotations(const std::string& text) {
  std::map<std::string, Polyhedron> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    size_t colon = line.find(':');
    if (colon == std::string::npos)
      throw ParseError("expected `label: conjunction`", lineno, 1);
    std::string label = trim(line.substr(0, colon));
    if (label.empty()) throw ParseError("empty location label", lineno, 1);
    if (out.count(label))
      throw ParseError("duplicate annotation for " + label, lineno, 1);
    BExpr b;
    try {
      b = parse_bexpr_text(line.substr(colon + 1));
    } catch (const ParseError& e) {
      throw ParseError("bad annotation (" + std::string(e.what()) + ")",
                       lineno, int(colon) + 2);
    }
    auto ps = cond_pos(b);
    if (ps.size() != 1)
      throw ParseError("annotation must be a plain conjunction", lineno,
                       int(colon) + 2);
    out[label] = ps[0];
  }
  return out;
}

AttachResult attach_invariants(const PCFG& g,
                               const std::map<std::string, Polyhedron>& by_label,
                               const std::map<int, Polyhedron>& loop_annots) {
  AttachResult res;
  for (size_t i = 0; i < g.locations.size(); ++i) res.inv[int(i)];

  for (const auto& [label, poly] : by_label) {
    int loc = g.location_index(label);
    if (loc < 0) {
      res.errors.push_back("unknown location label " + label);
      continue;
    }
    if (loc == g.l_in) {
      res.errors.push_back("entry location " + label +
                           " cannot carry an annotation");
      continue;
    }
    for (const auto& c : poly.cs) append_unique(res.inv[loc], c);
  }
  for (const auto& [loc, poly] : loop_annots) {
    if (loc == g.l_in) {
      res.errors.push_back(
          "loop annotation on the entry location cannot be assumed");
      continue;
    }
    for (const auto& c : poly.cs) append_unique(res.inv[loc], c);
  }

  for (int loc = 0; loc < int(g.locations.size()); ++loc) {
    if (loc == g.l_in) continue;
    std::vector<const Transition*> incoming;
    for (const auto& t : g.transitions) {
      if (t.src == loc && !t.update) continue;
      bool hits = std::any_of(t.branches.begin(), t.branches.end(),
                              [&](const Branch& b) { return b.target == loc; });
      if (hits) incoming.push_back(&t);
    }
    if (incoming.empty()) continue;

    std::vector<std::vector<LinConstraint>> eligible;
    for (const Transition* t : incoming) {
      std::vector<LinConstraint> keep;
      for (const auto& c : t->guard.cs) {
        if (t->update && c.expr.coeffs.count(t->update->var)) continue;
        keep.push_back(c);
      }
      eligible.push_back(std::move(keep));
    }
    for (const auto& c : eligible[0]) {
      bool common = true;
      for (size_t i = 1; i < eligible.size() && common; ++i)
        common = std::any_of(
            eligible[i].begin(), eligible[i].end(),
            [&](const LinConstraint& d) { return d == c; });
      if (common) append_unique(res.inv[loc], c);
    }
  }
  return res;
}

}  // namespace lexrsm
