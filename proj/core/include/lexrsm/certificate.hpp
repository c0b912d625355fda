#pragma once

#include <string>
#include <vector>

#include "lexrsm/checker.hpp"
#include "lexrsm/synthesis.hpp"

namespace lexrsm {

// Flavor a strategy's certificates are verified against: STR's everywhere
// non-negativity is ST, LWN's guard-wise one is LW, and the multiple-choice
// strategies discharge SC plus MCLC.
Flavor strategy_flavor(Strategy::Kind k);

// Certificate as a JSON document: dimension, variable order, per-location
// rows of per-dimension coefficient vectors (one numerator/denominator pair
// per variable plus one for the constant), level map, per-dimension branch
// choices and ranked sets, strategy, and timings. Pairs are emitted as JSON
// integers when they fit 64 bits and as decimal strings otherwise. Output is
// pretty-printed with sorted keys, so equal certificates serialize to equal
// bytes.
std::string certificate_to_json(const Certificate& cert, const PCFG& g);

// Schema or reference problems are reported as human-readable strings; the
// certificate is meaningful only when errors is empty. Unknown location
// labels and transition ids are errors, missing timings are not.
struct LoadedCertificate {
  Certificate cert;
  std::vector<std::string> errors;
};
LoadedCertificate certificate_from_json(const std::string& text, const PCFG& g);

}  // namespace lexrsm
