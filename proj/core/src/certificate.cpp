#include "lexrsm/certificate.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace lexrsm {

namespace {

using nlohmann::json;

json encode_int(const Int& v) {
  static const Int lo = std::numeric_limits<long long>::min();
  static const Int hi = std::numeric_limits<long long>::max();
  if (v >= lo && v <= hi) return v.convert_to<long long>();
  return v.str();
}

json encode_rat(const Rational& r) {
  return json::array({encode_int(numerator(r)), encode_int(denominator(r))});
}

const char* branch_word(DimBranch b) {
  return b == DimBranch::NonNeg ? "nonneg" : "strict";
}

// Error-accumulating reader; every getter returns a safe fallback so the
// caller can keep scanning for further problems.
struct Reader {
  std::vector<std::string>& errors;

  void fail(const std::string& what) { errors.push_back(what); }

  Int read_int(const json& j, const std::string& where) {
    if (j.is_number_integer()) return Int(j.get<long long>());
    if (j.is_string()) {
      try {
        return Int(j.get<std::string>());
      } catch (const std::exception&) {
        fail(where + ": not an integer");
        return Int(0);
      }
    }
    fail(where + ": not an integer");
    return Int(0);
  }

  Rational read_rat(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) {
      fail(where + ": expected a [numerator, denominator] pair");
      return Rational(0);
    }
    Int n = read_int(j[0], where);
    Int d = read_int(j[1], where);
    if (d == 0) {
      fail(where + ": zero denominator");
      return Rational(0);
    }
    return Rational(n, d);
  }
};

}  // namespace

std::string certificate_to_json(const Certificate& cert, const PCFG& g) {
  std::vector<std::string> vars = g.variables;
  std::sort(vars.begin(), vars.end());

  json eta = json::object();
  for (const auto& [loc, rows] : cert.eta.eta) {
    if (loc < 0 || loc >= int(g.locations.size()))
      throw std::invalid_argument("certificate row at unknown location index " +
                                  std::to_string(loc));
    json jrows = json::array();
    for (const LinExpr& e : rows) {
      for (const auto& [v, coef] : e.coeffs)
        if (coef != 0 && !std::binary_search(vars.begin(), vars.end(), v))
          throw std::invalid_argument("certificate references unknown variable " +
                                      v);
      json row = json::array();
      for (const auto& v : vars) row.push_back(encode_rat(e.coeff(v)));
      row.push_back(encode_rat(e.constant));
      jrows.push_back(std::move(row));
    }
    eta[g.locations[size_t(loc)]] = std::move(jrows);
  }

  json branch = json::object();
  for (const auto& [dim, b] : cert.branch)
    branch[std::to_string(dim)] = branch_word(b);
  json ranked = json::object();
  for (const auto& [dim, ids] : cert.ranked)
    ranked[std::to_string(dim)] = ids;

  json doc = {
      {"dimension", cert.eta.dim},
      {"variables", vars},
      {"eta", std::move(eta)},
      {"level", cert.lv.lv},
      {"branch", std::move(branch)},
      {"ranked", std::move(ranked)},
      {"strategy",
       {{"kind", strategy_name(cert.strategy.kind)},
        {"c", encode_rat(cert.strategy.c)},
        {"max_dim", cert.strategy.max_dim}}},
      {"timings_ms",
       {{"total", cert.total_ms}, {"per_dimension", cert.dim_ms}}},
  };
  return doc.dump(2) + "\n";
}

LoadedCertificate certificate_from_json(const std::string& text,
                                        const PCFG& g) {
  LoadedCertificate out;
  Reader rd{out.errors};
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    rd.fail("certificate: not a JSON object");
    return out;
  }

  int dim = 0;
  if (doc.contains("dimension") && doc["dimension"].is_number_integer())
    dim = doc["dimension"].get<int>();
  else
    rd.fail("dimension: missing or not an integer");
  if (dim < 0) {
    rd.fail("dimension: negative");
    return out;
  }
  out.cert.eta.dim = dim;

  std::vector<std::string> vars;
  if (doc.contains("variables") && doc["variables"].is_array()) {
    for (const auto& v : doc["variables"]) {
      if (!v.is_string()) {
        rd.fail("variables: entries must be strings");
        return out;
      }
      vars.push_back(v.get<std::string>());
    }
  } else {
    rd.fail("variables: missing");
    return out;
  }

  if (doc.contains("eta") && doc["eta"].is_object()) {
    for (const auto& [label, rows] : doc["eta"].items()) {
      int loc = g.location_index(label);
      if (loc < 0) {
        rd.fail("eta: unknown location " + label);
        continue;
      }
      if (!rows.is_array() || int(rows.size()) != dim) {
        rd.fail("eta: " + label + " needs one row per dimension");
        continue;
      }
      std::vector<LinExpr> exprs;
      for (const auto& row : rows) {
        if (!row.is_array() || row.size() != vars.size() + 1) {
          rd.fail("eta: " + label + ": row needs one pair per variable plus one");
          exprs.emplace_back();
          continue;
        }
        LinExpr e;
        for (size_t i = 0; i < vars.size(); ++i) {
          Rational c = rd.read_rat(row[i], "eta: " + label);
          if (c != 0) e += LinExpr::var(vars[i], c);
        }
        e += LinExpr(rd.read_rat(row[vars.size()], "eta: " + label));
        exprs.push_back(std::move(e));
      }
      out.cert.eta.eta[loc] = std::move(exprs);
    }
    for (size_t i = 0; i < g.locations.size(); ++i)
      if (!out.cert.eta.eta.count(int(i)))
        rd.fail("eta: no row for location " + g.locations[i]);
  } else {
    rd.fail("eta: missing");
  }

  if (doc.contains("level") && doc["level"].is_object()) {
    for (const auto& [tid, lvj] : doc["level"].items()) {
      if (!g.transition(tid)) {
        rd.fail("level: unknown transition " + tid);
        continue;
      }
      if (!lvj.is_number_integer()) {
        rd.fail("level: " + tid + ": not an integer");
        continue;
      }
      out.cert.lv.lv[tid] = lvj.get<int>();
    }
  } else {
    rd.fail("level: missing");
  }

  if (doc.contains("branch")) {
    for (const auto& [dims, word] : doc["branch"].items()) {
      int d = std::atoi(dims.c_str());
      if (word == "nonneg")
        out.cert.branch[d] = DimBranch::NonNeg;
      else if (word == "strict")
        out.cert.branch[d] = DimBranch::StrictDecrease;
      else
        rd.fail("branch: " + dims + ": expected nonneg or strict");
    }
  }
  if (doc.contains("ranked")) {
    for (const auto& [dims, ids] : doc["ranked"].items()) {
      int d = std::atoi(dims.c_str());
      if (!ids.is_array()) {
        rd.fail("ranked: " + dims + ": expected an id array");
        continue;
      }
      for (const auto& id : ids) {
        if (!id.is_string() || !g.transition(id.get<std::string>()))
          rd.fail("ranked: " + dims + ": unknown transition");
        else
          out.cert.ranked[d].push_back(id.get<std::string>());
      }
    }
  }

  if (doc.contains("strategy") && doc["strategy"].is_object()) {
    const json& s = doc["strategy"];
    if (s.contains("kind")) {
      auto k = s["kind"].is_string()
                   ? strategy_from_name(s["kind"].get<std::string>())
                   : std::nullopt;
      if (k)
        out.cert.strategy.kind = *k;
      else
        rd.fail("strategy: unknown kind");
    }
    if (s.contains("c")) out.cert.strategy.c = rd.read_rat(s["c"], "strategy c");
    if (s.contains("max_dim") && s["max_dim"].is_number_integer())
      out.cert.strategy.max_dim = s["max_dim"].get<int>();
  }

  if (doc.contains("timings_ms") && doc["timings_ms"].is_object()) {
    const json& t = doc["timings_ms"];
    if (t.contains("total") && t["total"].is_number_integer())
      out.cert.total_ms = t["total"].get<long>();
    if (t.contains("per_dimension") && t["per_dimension"].is_array())
      for (const auto& v : t["per_dimension"])
        if (v.is_number_integer()) out.cert.dim_ms.push_back(v.get<long>());
  }
  return out;
}

}  // namespace lexrsm
