#include "doctest.h"
#include "lexrsm/certificate.hpp"
#include "lexrsm/checker.hpp"
#include "lexrsm/farkas.hpp"
#include "lexrsm/lower.hpp"
#include "lexrsm/parser.hpp"
#include "lexrsm/synthesis.hpp"

using namespace lexrsm;

namespace {

LinExpr lx(std::map<std::string, Rational> cs, Rational k = Rational(0)) {
  LinExpr e(std::move(k));
  for (auto& [v, c] : cs) e += LinExpr::var(v, c);
  return e;
}

const char* kTwoLoop =
    "x := 0; "
    "while x < 5 do "
    "if y < 10 then y := y + sample(unif(1, 2)) "
    "else x := x + sample(unif(1, 2)) fi od";

struct Lowered {
  PCFG g;
  InvariantMap inv;
};

Lowered lowered(const std::string& src, const std::string& annots = "") {
  LowerResult r = lower(*parse_program(src));
  AttachResult a =
      attach_invariants(r.g, parse_annotations(annots), r.loop_annotations);
  REQUIRE(a.errors.empty());
  return {std::move(r.g), std::move(a.inv)};
}

Lowered two_loop() {
  return lowered(kTwoLoop,
                 "l1: x < 7\n"
                 "l2: x < 5\n"
                 "l3: y < 10 and x < 5\n"
                 "l4: y >= 10 and x < 5\n"
                 "l5: x >= 5\n");
}

PCFG tiny(int n_locations, const std::vector<std::string>& vars) {
  PCFG g;
  g.variables = vars;
  for (int i = 0; i < n_locations; ++i)
    g.locations.push_back(std::string(1, char('A' + i)));
  g.l_in = 0;
  g.l_out = n_locations - 1;
  g.tau_out = "t_out";
  Transition t;
  t.id = "t_out";
  t.src = g.l_out;
  t.branches = {{Rational(1), g.l_out}};
  g.transitions.push_back(t);
  return g;
}

Transition step(const std::string& id, int src, int tgt) {
  Transition t;
  t.id = id;
  t.src = src;
  t.branches = {{Rational(1), tgt}};
  return t;
}

InvariantMap true_inv(const PCFG& g) {
  InvariantMap m;
  for (size_t i = 0; i < g.locations.size(); ++i) m[int(i)];
  return m;
}

Strategy strat(Strategy::Kind k, int max_dim = 12) {
  Strategy s;
  s.kind = k;
  s.max_dim = max_dim;
  return s;
}

Flavor flavor_of(Strategy::Kind k) {
  switch (k) {
    case Strategy::Kind::STR: return Flavor::ST;
    case Strategy::Kind::LWN: return Flavor::LW;
    default: return Flavor::SC_MCLC;
  }
}

// Every id not ranked by tau_out appears in exactly one ranked class, and the
// level map agrees with the class index.
void check_partition(const PCFG& g, const Certificate& cert) {
  std::vector<std::string> all, seen;
  for (const auto& t : g.transitions)
    if (t.id != g.tau_out) all.push_back(t.id);
  std::sort(all.begin(), all.end());
  for (const auto& [k, ids] : cert.ranked)
    for (const auto& id : ids) {
      seen.push_back(id);
      CHECK(cert.lv.at(id) == k);
    }
  std::sort(seen.begin(), seen.end());
  CHECK(all == seen);
  CHECK(cert.lv.at(g.tau_out) == 0);
}

}  // namespace

TEST_CASE("class_enumerate: candidate order per strategy") {
  std::vector<std::string> u = {"b", "a"};
  CHECK(class_enumerate(strat(Strategy::Kind::STR), u).empty());
  CHECK(class_enumerate(strat(Strategy::Kind::LWN), u).empty());

  auto smc = class_enumerate(strat(Strategy::Kind::SMC), u);
  REQUIRE(smc.size() == 2);
  CHECK(smc[0] == std::vector<std::string>{"a"});
  CHECK(smc[1] == std::vector<std::string>{"b"});

  auto emc = class_enumerate(strat(Strategy::Kind::EMC), u);
  REQUIRE(emc.size() == 3);
  CHECK(emc[0] == std::vector<std::string>({"a", "b"}));
  CHECK(emc[1] == std::vector<std::string>{"a"});
  CHECK(emc[2] == std::vector<std::string>{"b"});

  // Larger classes come first; ties break lexicographically.
  auto e3 = class_enumerate(strat(Strategy::Kind::EMC), {"c", "a", "b"});
  REQUIRE(e3.size() == 7);
  CHECK(e3[0] == std::vector<std::string>({"a", "b", "c"}));
  CHECK(e3[1] == std::vector<std::string>({"a", "b"}));
  CHECK(e3[2] == std::vector<std::string>({"a", "c"}));
  CHECK(e3[3] == std::vector<std::string>({"b", "c"}));
  CHECK(e3[4] == std::vector<std::string>{"a"});
  CHECK(e3[6] == std::vector<std::string>{"c"});
}

TEST_CASE("synthesize: straight-line program needs one dimension") {
  Lowered p = lowered("x := 0");
  for (auto k : {Strategy::Kind::STR, Strategy::Kind::LWN, Strategy::Kind::SMC,
                 Strategy::Kind::EMC}) {
    SynthesisResult r = synthesize(p.g, p.inv, strat(k));
    REQUIRE(r.ok());
    CHECK(r.cert->eta.dim == 1);
    CHECK(r.cert->branch.at(1) == DimBranch::NonNeg);
    check_partition(p.g, *r.cert);
    CHECK(check_certificate(p.g, p.inv, r.cert->eta, r.cert->lv, flavor_of(k))
              .ok());
  }
}

TEST_CASE("attempt_nonneg_dimension: an incrementing self-loop never ranks") {
  PCFG g = tiny(2, {"x"});
  Transition loop = step("t0", 0, 0);
  loop.update = Update{"x", UpdateElem::det(lx({{"x", 1}}, Rational(1)))};
  g.transitions.push_back(loop);
  REQUIRE(g.validate().empty());

  NonnegOutcome out =
      attempt_nonneg_dimension(g, true_inv(g), {"t0"}, Rational(1));
  CHECK(out.ranked.empty());
}

TEST_CASE("synthesize: divergent loop fails with the residual cycle") {
  // The exit guard is unsatisfiable; only the exit transition ranks, after
  // which the increment cycle admits no progress under any strategy.
  Lowered p = lowered("while 1 <= 1 do x := x + 1 od");
  for (auto k : {Strategy::Kind::SMC, Strategy::Kind::EMC}) {
    SynthesisResult r = synthesize(p.g, p.inv, strat(k));
    REQUIRE(!r.ok());
    CHECK(r.failure->reason == Failure::Reason::NoProgress);
    CHECK(r.failure->unranked == std::vector<std::string>({"t0", "t2"}));
  }
}

TEST_CASE("synthesize: two-loop program separates the strategy lattice") {
  Lowered p = two_loop();

  SynthesisResult str = synthesize(p.g, p.inv, strat(Strategy::Kind::STR));
  REQUIRE(!str.ok());
  CHECK(str.failure->reason == Failure::Reason::NoProgress);

  SynthesisResult lwn = synthesize(p.g, p.inv, strat(Strategy::Kind::LWN));
  REQUIRE(!lwn.ok());
  CHECK(lwn.failure->reason == Failure::Reason::NoProgress);
  CHECK(lwn.failure->unranked == std::vector<std::string>({"t1", "t3", "t5"}));

  SynthesisResult smc = synthesize(p.g, p.inv, strat(Strategy::Kind::SMC));
  REQUIRE(smc.ok());
  CHECK(smc.cert->eta.dim <= 4);
  check_partition(p.g, *smc.cert);
  // Dimension 1 ranks the four transitions a guard-non-negative map can; the
  // inner cycle needs a strict class ({t3}) before the rest unlocks.
  CHECK(smc.cert->ranked.at(1) ==
        std::vector<std::string>({"t0", "t2", "t4", "t6"}));
  CHECK(smc.cert->ranked.at(2) == std::vector<std::string>{"t3"});
  CHECK(smc.cert->branch.at(1) == DimBranch::NonNeg);
  CHECK(smc.cert->branch.at(2) == DimBranch::StrictDecrease);
  CHECK(check_certificate(p.g, p.inv, smc.cert->eta, smc.cert->lv,
                          Flavor::SC_MCLC)
            .ok());

  SynthesisResult emc = synthesize(p.g, p.inv, strat(Strategy::Kind::EMC));
  REQUIRE(emc.ok());
  CHECK(emc.cert->eta.dim <= 4);
  CHECK(emc.cert->eta.dim <= smc.cert->eta.dim);
  check_partition(p.g, *emc.cert);
  CHECK(check_certificate(p.g, p.inv, emc.cert->eta, emc.cert->lv,
                          Flavor::SC_MCLC)
            .ok());
}

TEST_CASE("synthesize: dimension budget reports exhaustion, not no-progress") {
  Lowered p = two_loop();
  SynthesisResult r = synthesize(p.g, p.inv, strat(Strategy::Kind::SMC, 1));
  REQUIRE(!r.ok());
  CHECK(r.failure->reason == Failure::Reason::MaxDim);
  CHECK(r.failure->unranked == std::vector<std::string>({"t1", "t3", "t5"}));
}

TEST_CASE("synthesize: derandomized two-loop collapses to one dimension") {
  // With unit steps, an initialized inner counter, and invariants strong
  // enough to bound it, a single non-negative dimension ranks every
  // transition; the probabilistic variant needs three.
  Lowered p = lowered(
      "x := 0; y := 0; "
      "while x < 5 do if y < 10 then y := y + 1 else x := x + 1 fi od",
      "l1: x <= 0 and x >= 0\n"
      "l2: x < 6 and y >= 0 and y <= 11 and 3*y >= 5*x\n"
      "l3: x < 5 and y >= 0 and y <= 11 and 3*y >= 5*x\n"
      "l4: y < 10 and y >= 0 and x < 5 and 3*y >= 5*x\n"
      "l5: y >= 10 and y <= 11 and x < 5 and 3*y >= 5*x\n"
      "l6: x >= 5\n");
  CHECK(audit_invariant(p.g, p.inv).empty());

  SynthesisResult smc = synthesize(p.g, p.inv, strat(Strategy::Kind::SMC));
  REQUIRE(smc.ok());
  CHECK(smc.cert->eta.dim == 1);
  check_partition(p.g, *smc.cert);
  CHECK(check_certificate(p.g, p.inv, smc.cert->eta, smc.cert->lv,
                          Flavor::SC_MCLC)
            .ok());

  // The same map is strongly non-negative: STR also gets one dimension.
  SynthesisResult str = synthesize(p.g, p.inv, strat(Strategy::Kind::STR));
  REQUIRE(str.ok());
  CHECK(str.cert->eta.dim == 1);
  CHECK(check_certificate(p.g, p.inv, str.cert->eta, str.cert->lv, Flavor::ST)
            .ok());
}

TEST_CASE("synthesize: countdown ranks in one guard-non-negative dimension") {
  Lowered p = lowered("x := 10; while x >= 1 do x := x - 1 od", "l1: x >= 0");
  for (auto k : {Strategy::Kind::STR, Strategy::Kind::LWN}) {
    SynthesisResult r = synthesize(p.g, p.inv, strat(k));
    REQUIRE(r.ok());
    CHECK(r.cert->eta.dim == 1);
    CHECK(check_certificate(p.g, p.inv, r.cert->eta, r.cert->lv, flavor_of(k))
              .ok());
  }
}

TEST_CASE("attempt_strict_dimension: normal update pins target coefficients") {
  PCFG g = tiny(3, {"x"});
  Transition draw = step("t0", 0, 1);
  draw.update = Update{"x", UpdateElem::sample(
                                Distribution::normal(Rational(0), Rational(1)))};
  g.transitions.push_back(draw);
  Transition exit_t = step("t1", 1, 2);
  exit_t.guard.cs = {{lx({{"x", 1}}), false}};  // x <= 0
  g.transitions.push_back(exit_t);
  REQUIRE(g.validate().empty());

  // Ranking t1 alone would admit eta(B) = 1 - x on the guard, but t0 feeds B
  // through an unbounded draw, so its x-coefficient must collapse to zero.
  auto m = attempt_strict_dimension(g, true_inv(g), {"t0", "t1"}, {"t1"},
                                    Rational(1));
  REQUIRE(m.has_value());
  CHECK(m->at(1).coeff("x") == 0);
  CHECK(m->at(2) == LinExpr());
}

TEST_CASE("attempt_strict_dimension: unsatisfiable guards rank vacuously") {
  PCFG g = tiny(2, {"x"});
  Transition dead = step("t0", 0, 1);
  dead.guard.cs = {{lx({{"x", 1}}, Rational(1)), false},   // x <= -1
                   {lx({{"x", -1}}, Rational(1)), false}};  // x >= 1
  g.transitions.push_back(dead);
  auto m = attempt_strict_dimension(g, true_inv(g), {"t0"}, {"t0"},
                                    Rational(1));
  CHECK(m.has_value());
}

TEST_CASE("synthesize: recorded encodings are sound at sampled points") {
  Lowered p = lowered("x := 10; while x >= 1 do x := x - 1 od", "l1: x >= 0");
  EncodingRecorder rec;
  SynthesisResult r =
      synthesize(p.g, p.inv, strat(Strategy::Kind::LWN), nullptr, &rec);
  REQUIRE(r.ok());
  REQUIRE(!rec.empty());
  for (const auto& e : rec) {
    CHECK(e.origin.find("dim 1") == 0);
    for (const auto& v : sample_polyhedron(e.antecedent, 25, 7)) {
      CHECK(e.consequent.eval(v) <= 0);
    }
  }
}

TEST_CASE("certificate json: round-trip preserves every field") {
  Lowered p = two_loop();
  SynthesisResult r = synthesize(p.g, p.inv, strat(Strategy::Kind::SMC));
  REQUIRE(r.ok());

  std::string text = certificate_to_json(*r.cert, p.g);
  LoadedCertificate back = certificate_from_json(text, p.g);
  REQUIRE(back.errors.empty());
  CHECK(back.cert.eta.dim == r.cert->eta.dim);
  CHECK(back.cert.eta.eta == r.cert->eta.eta);
  CHECK(back.cert.lv.lv == r.cert->lv.lv);
  CHECK(back.cert.branch == r.cert->branch);
  CHECK(back.cert.ranked == r.cert->ranked);
  CHECK(back.cert.strategy.kind == r.cert->strategy.kind);
  CHECK(back.cert.strategy.c == r.cert->strategy.c);

  // Serialization is stable: dumping the reloaded certificate is a no-op.
  CHECK(certificate_to_json(back.cert, p.g) == text);

  // The checker accepts the reloaded certificate as-is.
  CHECK(check_certificate(p.g, p.inv, back.cert.eta, back.cert.lv,
                          Flavor::SC_MCLC)
            .ok());
}

TEST_CASE("certificate json: malformed inputs collect errors") {
  Lowered p = lowered("x := 0");
  CHECK(!certificate_from_json("{", p.g).errors.empty());
  CHECK(!certificate_from_json("[1, 2]", p.g).errors.empty());

  SynthesisResult r = synthesize(p.g, p.inv, strat(Strategy::Kind::SMC));
  REQUIRE(r.ok());
  std::string text = certificate_to_json(*r.cert, p.g);

  // Unknown location labels and malformed rationals are reported by name.
  std::string bad = text;
  bad.replace(bad.find("\"l0\""), 4, "\"zz\"");
  LoadedCertificate lc = certificate_from_json(bad, p.g);
  REQUIRE(!lc.errors.empty());
  bool mentions = false;
  for (const auto& e : lc.errors)
    if (e.find("zz") != std::string::npos) mentions = true;
  CHECK(mentions);

  LoadedCertificate zero =
      certificate_from_json("{\"dimension\": 1, \"variables\": [\"x\"], "
                            "\"eta\": {\"l0\": [[[1, 0], [0, 1]]], "
                            "\"l1\": [[[0, 1], [0, 1]]]}, "
                            "\"level\": {\"t0\": 1, \"t1\": 0}}",
                            p.g);
  CHECK(!zero.errors.empty());
}
