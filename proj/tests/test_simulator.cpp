#include "lexrsm/simulate.hpp"

#include <map>

#include "doctest.h"
#include "json.hpp"
#include "lexrsm/lower.hpp"
#include "lexrsm/parser.hpp"

using namespace lexrsm;

namespace {

PCFG low(const std::string& src) { return lower(*parse_program(src)).g; }

LinExpr lx(std::map<std::string, Rational> cs, Rational k = Rational(0)) {
  LinExpr e(std::move(k));
  for (auto& [v, c] : cs) e += LinExpr::var(v, c);
  return e;
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

std::map<std::string, double> no_init() { return {}; }

// Round t exits when t consecutive heads land; success probability 2^-t per
// round, so the termination probability is 1 - prod_{t>=2}(1 - 2^-t),
// about 0.42242381. Aborted rounds cost O(1) expected steps.
const char* kCoinCascade =
    "x := 0; t := 1; "
    "while x = 0 do "
    "t := t + 1; k := t; w := 1; "
    "while k >= 1 and w >= 1 do "
    "if prob(0.5) then k := k - 1 else w := 0 fi od; "
    "if w >= 1 then x := 1 fi od";

// Half chance to quadruple the stake, half to stop: the round count is
// geometric with parameter 1/2.
const char* kQuadrupling =
    "x := 0; t := 1; "
    "while x = 0 do if prob(0.5) then t := 4 * t else x := 1 fi od";

const char* kTwoLoop =
    "x := 0; "
    "while x < 5 do "
    "if y < 10 then y := y + sample(unif(1, 2)) "
    "else x := x + sample(unif(1, 2)) fi od";

// A: keep stepping x down by a nondeterministic amount in [1, 2] while
// x >= 1; guards partition at the float boundary.
PCFG ndet_countdown() {
  PCFG g = tiny(2, {"x"});
  Transition body = step("t0", 0, 0);
  body.guard.cs = {{lx({{"x", -1}}, Rational(1)), false}};  // x >= 1
  body.update = Update{"x", UpdateElem::ndet(Rational(-2), Rational(-1),
                                             lx({{"x", 1}}))};
  Transition leave = step("t1", 0, 1);
  leave.guard.cs = {{lx({{"x", 1}}, Rational(-1)), true}};  // x < 1
  g.transitions.push_back(body);
  g.transitions.push_back(leave);
  return g;
}

}  // namespace

TEST_CASE("run_once: false loop guard exits immediately") {
  PCFG g = low("x := 1; while x < 0 do skip od");
  for (auto sched : {Scheduler::uniform_random(3), Scheduler::first_enabled()}) {
    RunResult r = run_once(g, sched, no_init(), 100, 9);
    CHECK(r.outcome == RunOutcome::Terminated);
    CHECK(r.steps <= 3);
  }
}

TEST_CASE("run_once: boundary value enables exactly one side of a split") {
  PCFG g = tiny(2, {"x"});
  Transition stay = step("t0", 0, 0);
  stay.guard.cs = {{lx({{"x", 1}}, Rational(-5)), true}};  // x < 5
  stay.update = Update{"x", UpdateElem::det(lx({{"x", 1}}, Rational(1)))};
  Transition leave = step("t1", 0, 1);
  leave.guard.cs = {{lx({{"x", -1}}, Rational(5)), false}};  // x >= 5
  g.transitions.push_back(stay);
  g.transitions.push_back(leave);

  for (auto sched : {Scheduler::uniform_random(1), Scheduler::first_enabled()}) {
    std::map<std::string, double> at_boundary{{"x", 5.0}};
    RunResult r = run_once(g, sched, at_boundary, 50, 4);
    CHECK(r.outcome == RunOutcome::Terminated);
    CHECK(r.steps == 1);

    std::map<std::string, double> below{{"x", 3.0}};
    r = run_once(g, sched, below, 50, 4);
    CHECK(r.outcome == RunOutcome::Terminated);
    CHECK(r.steps == 3);
  }
}

TEST_CASE("run_once: no enabled guard is a deadlock, not a timeout") {
  PCFG g = tiny(2, {"x"});
  Transition only = step("t0", 0, 1);
  only.guard.cs = {{lx({{"x", -1}}, Rational(10)), false}};  // x >= 10
  g.transitions.push_back(only);

  RunResult r = run_once(g, Scheduler::first_enabled(), no_init(), 50, 0);
  CHECK(r.outcome == RunOutcome::Deadlock);
  CHECK(r.steps == 0);

  RunStats st = estimate_termination(g, Scheduler::first_enabled(), no_init(),
                                     25, 50, 0);
  CHECK(st.n_deadlock == 25);
  CHECK(st.n_terminated == 0);
  CHECK(st.frequency == 0.0);
}

TEST_CASE("run_once: unknown init names are rejected") {
  PCFG g = low("x := 1");
  std::map<std::string, double> bad{{"zz", 1.0}};
  CHECK_THROWS_AS(run_once(g, Scheduler::first_enabled(), bad, 10, 0),
                  std::invalid_argument);
}

TEST_CASE("quadrupling stake: round count is geometric with parameter 1/2") {
  PCFG g = low(kQuadrupling);
  Scheduler u = Scheduler::uniform_random(0);

  std::map<long, long> hist;
  const long runs = 20000;
  for (long i = 0; i < runs; ++i) {
    RunResult r = run_once(g, u, no_init(), 10000,
                           0x9e3779b97f4a7c15ULL * std::uint64_t(i + 1));
    REQUIRE(r.outcome == RunOutcome::Terminated);
    ++hist[r.steps];
  }
  // One-round runs take the minimal path; their mass is 1/2. Two-round runs
  // form the next step-count bucket with mass 1/4.
  auto it = hist.begin();
  double f1 = double(it->second) / double(runs);
  ++it;
  double f2 = it == hist.end() ? 0.0 : double(it->second) / double(runs);
  CHECK(f1 > 0.48);
  CHECK(f1 < 0.52);
  CHECK(f2 > 0.23);
  CHECK(f2 < 0.27);
}

TEST_CASE("estimate_termination: quadrupling stake always terminates") {
  PCFG g = low(kQuadrupling);
  RunStats st = estimate_termination(g, Scheduler::uniform_random(0), no_init(),
                                     30000, 10000, 11);
  CHECK(st.n_terminated == 30000);
  CHECK(st.frequency == 1.0);
  CHECK(st.n_timeout == 0);
  CHECK(st.wilson_lo > 0.99);
  CHECK(st.wilson_hi == 1.0);
}

TEST_CASE("coin cascade: termination frequency matches the product oracle") {
  PCFG g = low(kCoinCascade);
  RunStats st = estimate_termination(g, Scheduler::uniform_random(0), no_init(),
                                     20000, 10000, 42);
  CHECK(st.n_deadlock == 0);
  // True value 0.42242381; at 2e4 runs the sampling noise stays within
  // +-0.011 at three sigma, so this band cannot flake.
  CHECK(st.frequency > 0.39);
  CHECK(st.frequency < 0.45);
  CHECK(st.wilson_lo <= st.frequency);
  CHECK(st.wilson_hi >= st.frequency);
  CHECK(st.mean_steps > 0);
}

TEST_CASE("two-loop program from a deep negative start always terminates") {
  PCFG g = low(kTwoLoop);
  std::map<std::string, double> init{{"y", -100.0}};
  RunStats st = estimate_termination(g, Scheduler::uniform_random(0), init,
                                     10000, 10000, 7);
  CHECK(st.frequency == 1.0);
  CHECK(st.n_timeout == 0);
  CHECK(st.n_deadlock == 0);
}

TEST_CASE("estimate_termination: one master seed, one answer") {
  PCFG g = low(kQuadrupling);
  Scheduler u = Scheduler::uniform_random(0);
  RunStats a = estimate_termination(g, u, no_init(), 10000, 1000, 5);
  RunStats b = estimate_termination(g, u, no_init(), 10000, 1000, 5);
  CHECK(a.n_terminated == b.n_terminated);
  CHECK(a.mean_steps == b.mean_steps);
  CHECK(a.wilson_lo == b.wilson_lo);

  RunStats c = estimate_termination(g, u, no_init(), 10000, 1000, 6);
  CHECK(a.mean_steps != c.mean_steps);
}

TEST_CASE("FirstEnabled is step-for-step deterministic without randomness") {
  PCFG g = low("x := 10; while x >= 1 do x := x - 1 od");
  RunResult r1 = run_once(g, Scheduler::first_enabled(), no_init(), 1000, 1);
  RunResult r2 = run_once(g, Scheduler::first_enabled(), no_init(), 1000, 999);
  CHECK(r1.outcome == RunOutcome::Terminated);
  CHECK(r1.steps == r2.steps);

  RunStats st = estimate_termination(g, Scheduler::first_enabled(), no_init(),
                                     100, 1000, 3);
  CHECK(st.frequency == 1.0);
  CHECK(st.mean_steps == double(r1.steps));
}

TEST_CASE("schedulers drive nondeterministic draws and transition choice") {
  PCFG g = ndet_countdown();
  std::map<std::string, double> init{{"x", 10.0}};

  // Lower endpoint: x drops by 2 per body step.
  RunResult lo = run_once(g, Scheduler::first_enabled(), init, 100, 0);
  CHECK(lo.outcome == RunOutcome::Terminated);
  CHECK(lo.steps == 6);

  // Upper endpoint via the policy's ndet table: drops by 1.
  Scheduler hi;
  hi.kind = SchedulerKind::PolicyTable;
  hi.ndet_hi["t0"] = true;
  RunResult rhi = run_once(g, hi, init, 100, 0);
  CHECK(rhi.outcome == RunOutcome::Terminated);
  CHECK(rhi.steps == 11);

  // Uniform scheduler draws inside the interval: between the endpoints.
  RunResult ru = run_once(g, Scheduler::uniform_random(2), init, 100, 17);
  CHECK(ru.outcome == RunOutcome::Terminated);
  CHECK(ru.steps >= 6);
  CHECK(ru.steps <= 11);

  // A policy that names a disabled transition deadlocks the run.
  Scheduler stuck;
  stuck.kind = SchedulerKind::PolicyTable;
  stuck.policy["A"] = "t1";
  RunResult rd = run_once(g, stuck, init, 100, 0);
  CHECK(rd.outcome == RunOutcome::Deadlock);

  Scheduler bad;
  bad.kind = SchedulerKind::PolicyTable;
  bad.policy["nowhere"] = "t0";
  CHECK_THROWS_AS(run_once(g, bad, init, 100, 0), std::invalid_argument);
}

TEST_CASE("normal draws: positive drift walks terminate") {
  PCFG g = low("x := 0; while x < 1 do x := x + sample(norm(1, 1)) od");
  RunStats st = estimate_termination(g, Scheduler::uniform_random(0), no_init(),
                                     2000, 1000, 13);
  CHECK(st.frequency == 1.0);
}

TEST_CASE("RunStats: report and JSON carry the refutation caveat") {
  PCFG g = low("x := 10; while x >= 1 do x := x - 1 od");
  RunStats st = estimate_termination(g, Scheduler::first_enabled(), no_init(),
                                     100, 1000, 0);
  // Wilson interval at p = 1, n = 100: lower bound 1/(1 + z^2/n) with
  // z = 1.96, which is 0.9630065...
  CHECK(st.wilson_lo > 0.963006 - 1e-5);
  CHECK(st.wilson_lo < 0.963006 + 1e-5);
  CHECK(st.wilson_hi == 1.0);

  std::string text = st.report();
  CHECK(text.find("refutation evidence only") != std::string::npos);
  CHECK(text.find("frequency 1") != std::string::npos);

  nlohmann::json j = nlohmann::json::parse(st.to_json());
  CHECK(j["runs"] == 100);
  CHECK(j["terminated"] == 100);
  CHECK(j["wilson95"].size() == 2);
  CHECK(!j["note"].get<std::string>().empty());
}
