#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "lexrsm/pcfg.hpp"

namespace lexrsm {

enum class SchedulerKind { UniformRandom, FirstEnabled, PolicyTable };

// Resolves the two nondeterministic choices: which enabled transition fires
// and which endpoint a bounded nondeterministic draw takes. FirstEnabled and
// PolicyTable never randomize those choices; probabilistic branches and
// distribution samples stay random under every scheduler.
struct Scheduler {
  SchedulerKind kind = SchedulerKind::UniformRandom;
  std::uint64_t seed = 0;  // extra stream entropy for UniformRandom
  // PolicyTable: location label -> transition id to fire there. A listed
  // transition whose guard is disabled deadlocks the run; unlisted locations
  // fall back to the first enabled transition.
  std::map<std::string, std::string> policy;
  // transition id -> take the upper endpoint of its ndet interval. Unlisted
  // ids take the lower endpoint. UniformRandom ignores this and draws
  // uniformly from the interval instead.
  std::map<std::string, bool> ndet_hi;

  static Scheduler uniform_random(std::uint64_t seed = 0);
  static Scheduler first_enabled();
};

enum class RunOutcome { Terminated, Timeout, Deadlock };

struct RunResult {
  RunOutcome outcome = RunOutcome::Timeout;
  long steps = 0;  // transitions taken before stopping; tau_out never fires
};

// One concrete run under 64-bit floats (simulation only; all certificate
// mathematics stays rational). Guard evaluation at the float boundary is
// approximate by design. Unknown names in `init` throw invalid_argument;
// missing variables start at 0.
RunResult run_once(const PCFG& g, const Scheduler& sched,
                   const std::map<std::string, double>& init, long max_steps,
                   std::uint64_t seed);

struct RunStats {
  long n_runs = 0;
  long n_terminated = 0;
  long n_timeout = 0;
  long n_deadlock = 0;
  long max_steps = 0;
  double mean_steps = 0;  // among terminated runs
  double frequency = 0;   // n_terminated / n_runs
  double wilson_lo = 0;   // Wilson 95% interval on the termination frequency
  double wilson_hi = 1;

  // Both forms carry the caveat that simulation can only refute almost-sure
  // termination, never confirm it: the property quantifies over all
  // schedulers and only one was run.
  std::string report() const;
  std::string to_json() const;
};

// Aggregates n_runs independent runs. Per-run streams are split off the
// master seed by counter, so the stats are deterministic per seed and do not
// depend on execution order.
RunStats estimate_termination(const PCFG& g, const Scheduler& sched,
                              const std::map<std::string, double>& init,
                              long n_runs, long max_steps, std::uint64_t seed);

}  // namespace lexrsm
