#include "lexrsm/fixlab.hpp"

#include <limits>
#include <stdexcept>

#include "json.hpp"
#include "lexrsm/rng.hpp"

namespace lexrsm {

namespace {

std::string child_path(const std::string& base, size_t i) {
  return base.empty() ? std::to_string(i) : base + "." + std::to_string(i);
}

void validate_node(const InstanceNode& n, const FiniteInstance& inst,
                   const std::string& path, std::vector<std::string>* out) {
  auto fail = [&](const std::string& msg) {
    out->push_back("node [" + (path.empty() ? "root" : path) + "]: " + msg);
  };
  if (int(n.x.size()) != inst.dim)
    fail("X has " + std::to_string(n.x.size()) + " entries, expected " +
         std::to_string(inst.dim));
  if (n.lv < 0 || n.lv > inst.dim)
    fail("level " + std::to_string(n.lv) + " out of range");
  if (n.t > inst.horizon - 1) fail("time exceeds the horizon");
  if (n.prob <= 0 || n.prob > 1) fail("edge probability outside (0, 1]");
  if (!n.internal()) return;

  Rational mass(0);
  for (size_t i = 0; i < n.children.size(); ++i) {
    const InstanceNode& ch = n.children[i];
    mass += ch.prob;
    if (ch.t != n.t + 1) fail("child " + std::to_string(i) + " skips time");
    if (n.lv == 0) {
      if (ch.lv != 0)
        fail("child " + std::to_string(i) + " resumes a stopped process");
      if (ch.x != n.x)
        fail("child " + std::to_string(i) + " changes X after stopping");
    }
    validate_node(ch, inst, child_path(path, i), out);
  }
  if (mass != 1) fail("children probabilities sum to " + rat_str(mass));
}

// Clause evaluation shares one walker; `waive` makes the gamma relaxation a
// parameter rather than a fourth copy of the recursion.
struct ClauseCheck {
  const FiniteInstance& inst;
  InstanceFlavor flavor;
  Rational bottom;
  const Rational* gamma = nullptr;  // non-null: waive ranking per Eq-style rule
  std::vector<ClauseFailure> failures;

  void fail(const InstanceNode& n, const std::string& path, int k,
            const char* clause) {
    failures.push_back({path, n.t, k, clause});
  }

  bool waived(const InstanceNode& n, int k) const {
    if (!gamma) return false;
    if (n.x[size_t(k - 1)] <= bottom) return false;
    Rational hit(0);
    for (const InstanceNode& ch : n.children)
      if (ch.x[size_t(k - 1)] == bottom) hit += ch.prob;
    return hit >= *gamma;
  }

  void visit(const InstanceNode& n, const std::string& path) {
    for (size_t i = 0; i < n.children.size(); ++i)
      visit(n.children[i], child_path(path, i));
    if (!n.internal() || n.lv == 0 || n.t >= inst.horizon - 1) return;

    for (int k = 1; k <= n.lv; ++k) {
      Rational bound = n.x[size_t(k - 1)];
      if (k == n.lv) bound -= inst.c;
      if (cond_expect(n, k) > bound && !waived(n, k))
        fail(n, path, k, "ranking");
    }
    switch (flavor) {
      case InstanceFlavor::RankingOnly:
        break;
      case InstanceFlavor::UN:
        for (int k = 1; k <= inst.dim; ++k)
          if (n.x[size_t(k - 1)] < bottom) fail(n, path, k, "non-negativity");
        break;
      case InstanceFlavor::SC:
        if (n.x[size_t(n.lv - 1)] < 0) fail(n, path, n.lv, "non-negativity");
        break;
      case InstanceFlavor::LW:
      case InstanceFlavor::GLEX:
        for (int k = 1; k <= n.lv; ++k)
          if (n.x[size_t(k - 1)] < 0) fail(n, path, k, "non-negativity");
        if (flavor == InstanceFlavor::GLEX) {
          for (int k = 1; k <= n.lv; ++k) {
            Rational dropped(0);
            for (const InstanceNode& ch : n.children)
              if (k > ch.lv) dropped += ch.prob * ch.x[size_t(k - 1)];
            if (dropped < 0) fail(n, path, k, "expected-leftward");
          }
        }
        break;
    }
  }
};

InstanceNode fix_node(const InstanceNode& n, const Rational& eps) {
  InstanceNode out = n;
  for (int k = 1; k <= int(out.x.size()); ++k) {
    Rational& v = out.x[size_t(k - 1)];
    if (v < 0 || k > out.lv) v = -eps;
  }
  out.children.clear();
  for (const InstanceNode& ch : n.children)
    out.children.push_back(fix_node(ch, eps));
  return out;
}

// ---- random instance construction ----------------------------------------

Rational rand_frac(std::uint64_t& s) {  // {0, 1/4, ..., 1}
  return Rational(int(rand_below(s, 5)), 4);
}

struct TreeGen {
  std::uint64_t s;
  const RandomParams& params;
  RandomKind kind;
  std::vector<std::string>* repairs;

  void log(const std::string& path, const std::string& what) {
    if (repairs) repairs->push_back("node [" + path + "]: " + what);
  }

  bool child_internal(int level, int t) const {
    return level >= 1 && t + 1 < params.depth - 1;
  }

  // Fills children levels/values so that ranking, leftward non-negativity
  // (for k <= parent level) and, for GLEX, expected leftward non-negativity
  // hold by construction. Dimensions are processed from the parent level
  // downward because a repair may lower a child's level by one.
  void expand(InstanceNode& n) {
    const int L = n.lv;
    const int t = n.t;
    if (L == 0 || t >= params.depth - 1) return;

    const size_t m = kind == RandomKind::SC_TRIVIAL_SPACE
                         ? 1
                         : 1 + rand_below(s, 2);
    std::vector<Rational> probs(m, Rational(1));
    if (m == 2) {
      std::uint64_t w1 = 1 + rand_below(s, 3), w2 = 1 + rand_below(s, 3);
      probs[0] = Rational(long(w1), long(w1 + w2));
      probs[1] = Rational(long(w2), long(w1 + w2));
    }

    std::vector<int> levels(m, L);
    for (size_t i = 0; i < m; ++i) {
      std::uint64_t roll = rand_below(s, 20);
      if (roll < 5 && L >= 1) levels[i] = L - 1;
      else if (roll < 8) levels[i] = int(rand_below(s, std::uint64_t(L)));
      if (kind == RandomKind::SC_TRIVIAL_SPACE && levels[i] < L) {
        // A drop may only land on a dimension that is still non-negative:
        // the child owes SC non-negativity there, yet must stay below the
        // parent's value.
        while (levels[i] >= 1 && n.x[size_t(levels[i] - 1)] < 0) --levels[i];
      }
    }

    n.children.assign(m, InstanceNode{});
    for (size_t i = 0; i < m; ++i) {
      n.children[i].t = t + 1;
      n.children[i].prob = probs[i];
      n.children[i].x.assign(size_t(params.dim), Rational(0));
    }

    for (int k = L; k >= 1; --k) {
      Rational budget = n.x[size_t(k - 1)];
      if (k == L) budget -= params.c;

      // Children staying exactly at level k need c headroom there if they
      // rank further below; lower them one level when the budget cannot
      // carry that, which moves them into the dropped set for this k. Only
      // floors force repairs: once none remain the loop must stop, because
      // in the trivial space a dimension above the landing level may sit at
      // a negative budget and the flat-floor paths below handle that.
      auto kept_floor = [&](size_t i) {
        return levels[i] == k && child_internal(levels[i], t) ? params.c
                                                              : Rational(0);
      };
      Rational floor_mass(0);
      while (true) {
        floor_mass = 0;
        for (size_t i = 0; i < m; ++i)
          if (levels[i] >= k) floor_mass += probs[i] * kept_floor(i);
        if (floor_mass <= budget) break;
        bool lowered = false;
        for (size_t i = 0; i < m && !lowered; ++i)
          if (levels[i] == k && kept_floor(i) > 0) {
            --levels[i];
            log(std::to_string(n.t), "level lowered to fit ranking budget");
            lowered = true;
          }
        if (!lowered) break;
      }

      std::vector<size_t> kept, dropped;
      for (size_t i = 0; i < m; ++i)
        (levels[i] < k ? dropped : kept).push_back(i);

      if (kind == RandomKind::SC_TRIVIAL_SPACE) {
        // Single child. Values track the parent from above so that once a
        // dimension goes negative it stays there, which is what makes the
        // fixing sound for eps >= c.
        for (size_t i : dropped)
          n.children[i].x[size_t(k - 1)] =
              budget - Rational(long(rand_below(s, 7)));
        for (size_t i : kept) {
          Rational v;
          if (levels[i] == k) {
            Rational lo = kept_floor(i);
            v = lo > 0 ? lo + rand_frac(s) * (budget - lo)
                       : budget - Rational(long(rand_below(s, 3)));
          } else {
            v = n.x[size_t(k - 1)] - Rational(long(rand_below(s, 4)));
          }
          n.children[i].x[size_t(k - 1)] = v;
        }
        continue;
      }

      // Dropped mass: GLEX balances it to a non-negative sum, LW leaves it
      // arbitrary but non-positive so the ranking budget never shrinks.
      Rational dropped_mass(0);
      if (kind == RandomKind::GLEX && dropped.size() == 2) {
        Rational a(long(rand_below(s, 7)));
        n.children[dropped[0]].x[size_t(k - 1)] = -a;
        n.children[dropped[1]].x[size_t(k - 1)] =
            probs[dropped[0]] * a / probs[dropped[1]];
      } else {
        for (size_t i : dropped) {
          Rational v = kind == RandomKind::GLEX
                           ? Rational(long(rand_below(s, 3)))
                           : -Rational(long(rand_below(s, 7)));
          n.children[i].x[size_t(k - 1)] = v;
          dropped_mass += probs[i] * v;
        }
        if (dropped_mass > budget - floor_mass) {
          for (size_t i : dropped) n.children[i].x[size_t(k - 1)] = 0;
          dropped_mass = 0;
          log(std::to_string(n.t), "dropped mass cleared to fit ranking");
        }
      }

      Rational room = budget - dropped_mass - floor_mass;
      if (room < 0) room = 0;
      for (size_t i : kept) {
        n.children[i].x[size_t(k - 1)] =
            kept_floor(i) + rand_frac(s) * room;
      }
    }

    for (int k = L + 1; k <= params.dim; ++k)
      for (size_t i = 0; i < m; ++i)
        n.children[i].x[size_t(k - 1)] =
            Rational(long(rand_below(s, 13)) - 6);

    for (size_t i = 0; i < m; ++i) {
      n.children[i].lv = levels[i];
      expand(n.children[i]);
    }
  }
};

// ---- JSON -----------------------------------------------------------------

using nlohmann::json;

json encode_int(const Int& v) {
  static const Int lo = Int(std::numeric_limits<std::int64_t>::min());
  static const Int hi = Int(std::numeric_limits<std::int64_t>::max());
  if (v >= lo && v <= hi) return v.convert_to<std::int64_t>();
  return v.str();
}

json encode_rat(const Rational& r) {
  return json::array({encode_int(numerator(r)), encode_int(denominator(r))});
}

json node_to_json(const InstanceNode& n) {
  json j;
  j["t"] = n.t;
  j["prob"] = encode_rat(n.prob);
  j["lv"] = n.lv;
  json xs = json::array();
  for (const Rational& v : n.x) xs.push_back(encode_rat(v));
  j["x"] = xs;
  json kids = json::array();
  for (const InstanceNode& ch : n.children) kids.push_back(node_to_json(ch));
  j["children"] = kids;
  return j;
}

struct InstanceReader {
  std::vector<std::string> errors;

  void fail(const std::string& where, const std::string& msg) {
    errors.push_back(where + ": " + msg);
  }

  std::optional<Int> read_int(const json& j, const std::string& where) {
    if (j.is_number_integer()) return Int(j.get<std::int64_t>());
    if (j.is_string()) {
      try {
        return Int(j.get<std::string>());
      } catch (const std::exception&) {
      }
    }
    fail(where, "expected an integer");
    return std::nullopt;
  }

  std::optional<Rational> read_rat(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) {
      fail(where, "expected a [numerator, denominator] pair");
      return std::nullopt;
    }
    auto num = read_int(j[0], where), den = read_int(j[1], where);
    if (!num || !den) return std::nullopt;
    if (*den == 0) {
      fail(where, "zero denominator");
      return std::nullopt;
    }
    return Rational(*num, *den);
  }

  InstanceNode read_node(const json& j, const std::string& path) {
    InstanceNode n;
    const std::string where = "node [" + path + "]";
    if (!j.is_object()) {
      fail(where, "expected an object");
      return n;
    }
    if (j.contains("t") && j["t"].is_number_integer())
      n.t = j["t"].get<int>();
    else
      fail(where, "missing integer 't'");
    if (j.contains("lv") && j["lv"].is_number_integer())
      n.lv = j["lv"].get<int>();
    else
      fail(where, "missing integer 'lv'");
    if (j.contains("prob")) {
      if (auto p = read_rat(j["prob"], where + " prob")) n.prob = *p;
    } else {
      fail(where, "missing 'prob'");
    }
    if (j.contains("x") && j["x"].is_array()) {
      for (size_t i = 0; i < j["x"].size(); ++i)
        if (auto v = read_rat(j["x"][i], where + " x[" + std::to_string(i) + "]"))
          n.x.push_back(*v);
    } else {
      fail(where, "missing array 'x'");
    }
    if (j.contains("children")) {
      if (!j["children"].is_array()) {
        fail(where, "'children' must be an array");
      } else {
        size_t i = 0;
        for (const json& ch : j["children"])
          n.children.push_back(read_node(ch, child_path(path, i++)));
      }
    }
    return n;
  }
};

}  // namespace

std::vector<std::string> validate_instance(const FiniteInstance& inst) {
  std::vector<std::string> out;
  if (inst.dim < 1) out.push_back("dimension must be positive");
  if (inst.horizon < 1) out.push_back("horizon must be positive");
  if (inst.c <= 0) out.push_back("ranking constant must be positive");
  if (inst.root.prob != 1) out.push_back("root probability must be 1");
  if (inst.root.t != 0) out.push_back("root time must be 0");
  if (!out.empty()) return out;
  validate_node(inst.root, inst, "", &out);
  return out;
}

Rational cond_expect(const InstanceNode& node, int k) {
  if (!node.internal())
    throw std::invalid_argument(
        "cond_expect: leaf nodes have no successor distribution");
  if (k < 1 || k > int(node.x.size()))
    throw std::invalid_argument("cond_expect: dimension out of range");
  Rational acc(0);
  for (const InstanceNode& ch : node.children)
    acc += ch.prob * ch.x[size_t(k - 1)];
  return acc;
}

FlavorVerdict check_flavor(const FiniteInstance& inst, InstanceFlavor flavor,
                           const Rational& bottom) {
  ClauseCheck cc{inst, flavor, bottom};
  cc.visit(inst.root, "");
  return {std::move(cc.failures)};
}

FiniteInstance eps_fix(const FiniteInstance& inst, const Rational& eps) {
  if (eps <= 0) throw std::invalid_argument("eps_fix: eps must be positive");
  FiniteInstance out = inst;
  out.root = fix_node(inst.root, eps);
  return out;
}

bool is_eps_fixable(const FiniteInstance& inst, const Rational& eps) {
  return check_flavor(eps_fix(inst, eps), InstanceFlavor::UN, -eps).ok();
}

bool is_eps_gamma_fixable(const FiniteInstance& inst, const Rational& eps,
                          const Rational& gamma) {
  if (gamma <= 0 || gamma > 1)
    throw std::invalid_argument("gamma must lie in (0, 1]");
  FiniteInstance fixed = eps_fix(inst, eps);
  ClauseCheck cc{fixed, InstanceFlavor::UN, -eps, &gamma};
  cc.visit(fixed.root, "");
  return cc.failures.empty();
}

FiniteInstance random_instance(RandomKind kind, std::uint64_t seed,
                               const RandomParams& params,
                               std::vector<std::string>* repairs) {
  if (params.dim < 1 || params.depth < 2 || params.c <= 0)
    throw std::invalid_argument("random_instance: bad size parameters");
  FiniteInstance inst;
  inst.dim = params.dim;
  inst.horizon = params.depth;
  inst.c = params.c;
  TreeGen gen{seed, params, kind, repairs};

  inst.root.t = 0;
  inst.root.prob = Rational(1);
  inst.root.lv = params.dim;
  inst.root.x.assign(size_t(params.dim), Rational(0));
  for (int k = 1; k <= params.dim; ++k) {
    // Enough headroom at every dimension to rank for a few steps.
    inst.root.x[size_t(k - 1)] =
        params.c + Rational(long(rand_below(gen.s, 7)));
    if (kind == RandomKind::SC_TRIVIAL_SPACE && k < params.dim)
      inst.root.x[size_t(k - 1)] -= Rational(long(rand_below(gen.s, 10)));
  }
  gen.expand(inst.root);
  return inst;
}

FiniteInstance instance_diminishing_coin(int horizon) {
  if (horizon < 4)
    throw std::invalid_argument("diminishing coin needs horizon >= 4");
  FiniteInstance inst;
  inst.dim = 3;
  inst.horizon = horizon;
  inst.c = Rational(1);

  inst.root = {0, Rational(1), {Rational(2), Rational(0), Rational(2)}, 3, {}};
  InstanceNode head{1, Rational(1),
                    {Rational(2), Rational(0), Rational(1)}, 3, {}};

  // Coin node for round v sits at time 2v-2; heads (probability 2^-v) sends
  // dimension 2 to -2^v and then stops, tails re-enters the loop head.
  struct Builder {
    int horizon;
    InstanceNode coin(int v, int t) const {
      InstanceNode a{t, Rational(1),
                     {Rational(2), Rational(0), Rational(0)}, 2, {}};
      if (t + 1 > horizon - 1) return a;
      Rational p = Rational(1) / pow2(v);
      InstanceNode heads{t + 1, p,
                         {Rational(2), -pow2(v), Rational(0)}, 1, {}};
      if (t + 2 <= horizon - 1)
        heads.children.push_back(
            {t + 2, Rational(1),
             {Rational(0), Rational(0), Rational(0)}, 0, {}});
      InstanceNode tails{t + 1, 1 - p,
                         {Rational(2), Rational(0), Rational(1)}, 3, {}};
      if (t + 2 <= horizon - 1) tails.children.push_back(coin(v + 1, t + 2));
      a.children = {heads, tails};
      return a;
    }
    static Rational pow2(int v) {
      Rational r(1);
      for (int i = 0; i < v; ++i) r *= 2;
      return r;
    }
  };
  head.children.push_back(Builder{horizon}.coin(2, 2));
  inst.root.children.push_back(head);
  return inst;
}

FiniteInstance instance_quadrupling_stakes(int horizon) {
  if (horizon < 4)
    throw std::invalid_argument("quadrupling stakes needs horizon >= 4");
  FiniteInstance inst;
  inst.dim = 2;
  inst.horizon = horizon;
  inst.c = Rational(1);

  // Loop head at stake v: stake quadruples with probability 1/2, otherwise
  // dimension 2 busts to -2v-4 and the process stops.
  struct Builder {
    int horizon;
    InstanceNode head(const Rational& v, int t) const {
      InstanceNode w{t, Rational(1), {Rational(2), v}, 2, {}};
      if (t + 1 > horizon - 1) return w;
      InstanceNode grow{t + 1, Rational(1, 2),
                        {Rational(2), 4 * v + 2}, 2, {}};
      if (t + 2 <= horizon - 1) {
        grow.children.push_back(head(4 * v, t + 2));
        grow.children.back().prob = Rational(1);
      }
      InstanceNode bust{t + 1, Rational(1, 2),
                        {Rational(2), -2 * v - 4}, 1, {}};
      if (t + 2 <= horizon - 1)
        bust.children.push_back(
            {t + 2, Rational(1), {Rational(0), Rational(0)}, 0, {}});
      w.children = {grow, bust};
      return w;
    }
  };
  inst.root = {0, Rational(1), {Rational(2), Rational(2)}, 2, {}};
  inst.root.children.push_back(Builder{horizon}.head(Rational(1), 1));
  return inst;
}

int horizon_for_eps(const Rational& eps) {
  int v = 2;
  Rational pw(4);
  while (pw <= eps) {
    pw *= 2;
    ++v;
  }
  int h = 2 * v + 3;
  return h < 8 ? 8 : h;
}

std::string instance_to_json(const FiniteInstance& inst) {
  json j;
  j["horizon"] = inst.horizon;
  j["dim"] = inst.dim;
  j["c"] = encode_rat(inst.c);
  j["root"] = node_to_json(inst.root);
  return j.dump(2) + "\n";
}

LoadedInstance instance_from_json(const std::string& text) {
  LoadedInstance out;
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    out.errors.push_back("input is not a JSON object");
    return out;
  }
  InstanceReader r;
  if (doc.contains("horizon") && doc["horizon"].is_number_integer())
    out.inst.horizon = doc["horizon"].get<int>();
  else
    r.fail("instance", "missing integer 'horizon'");
  if (doc.contains("dim") && doc["dim"].is_number_integer())
    out.inst.dim = doc["dim"].get<int>();
  else
    r.fail("instance", "missing integer 'dim'");
  if (doc.contains("c")) {
    if (auto c = r.read_rat(doc["c"], "instance c")) out.inst.c = *c;
  } else {
    r.fail("instance", "missing 'c'");
  }
  if (doc.contains("root"))
    out.inst.root = r.read_node(doc["root"], "");
  else
    r.fail("instance", "missing 'root'");
  out.errors = std::move(r.errors);
  if (out.errors.empty()) {
    auto vs = validate_instance(out.inst);
    out.errors.insert(out.errors.end(), vs.begin(), vs.end());
  }
  return out;
}

}  // namespace lexrsm
