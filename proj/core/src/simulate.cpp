#include "lexrsm/simulate.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "lexrsm/rng.hpp"

namespace lexrsm {

namespace {

constexpr const char* kCaveat =
    "refutation evidence only: almost-sure termination quantifies over all "
    "schedulers and initial states, and only the configured scheduler and "
    "start were run";

double next_unit(std::uint64_t& s) {  // [0, 1)
  return double(splitmix64(s) >> 11) * 0x1.0p-53;
}

// Flat float mirror of the pCFG, indexed for the hot loop.
struct CExpr {
  std::vector<double> a;  // aligned to variable order
  double c = 0;

  double eval(const std::vector<double>& v) const {
    double s = c;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * v[i];
    return s;
  }
};

struct CCon {
  CExpr e;
  bool strict = false;  // e < 0 instead of e <= 0
};

struct CUpdate {
  enum class Kind { None, Det, Unif, Norm, Ndet };
  Kind kind = Kind::None;
  int var = -1;
  CExpr base;  // Det: full rhs; draws: the affine shift
  double a = 0, b = 0;
};

struct CTrans {
  std::vector<CCon> guard;
  std::vector<double> cum;  // cumulative branch probabilities
  std::vector<int> target;
  CUpdate up;
  bool ndet_hi = false;  // bound from the scheduler
};

struct Compiled {
  int l_in = 0, l_out = 0;
  std::vector<CTrans> ts;
  std::vector<std::vector<int>> out;  // per location, declaration order
  std::vector<int> forced;            // PolicyTable: location -> transition
  SchedulerKind kind = SchedulerKind::UniformRandom;
  std::uint64_t sched_seed = 0;
};

CExpr compile_expr(const LinExpr& e, const std::vector<std::string>& vars) {
  CExpr out;
  out.a.assign(vars.size(), 0.0);
  out.c = rat_double(e.constant);
  for (size_t i = 0; i < vars.size(); ++i) out.a[i] = rat_double(e.coeff(vars[i]));
  return out;
}

int var_index(const PCFG& g, const std::string& v) {
  for (size_t i = 0; i < g.variables.size(); ++i)
    if (g.variables[i] == v) return int(i);
  throw std::invalid_argument("simulate: unknown variable " + v);
}

Compiled compile(const PCFG& g, const Scheduler& sched) {
  if (g.l_out < 0 || g.l_in < 0)
    throw std::invalid_argument("simulate: pCFG has no entry or exit");
  Compiled c;
  c.l_in = g.l_in;
  c.l_out = g.l_out;
  c.kind = sched.kind;
  c.sched_seed = sched.seed;
  c.out.assign(g.locations.size(), {});
  c.forced.assign(g.locations.size(), -1);

  for (size_t i = 0; i < g.transitions.size(); ++i) {
    const Transition& t = g.transitions[i];
    CTrans ct;
    for (const auto& con : t.guard.cs)
      ct.guard.push_back({compile_expr(con.expr, g.variables), con.strict});
    double acc = 0;
    for (const auto& br : t.branches) {
      acc += rat_double(br.prob);
      ct.cum.push_back(acc);
      ct.target.push_back(br.target);
    }
    ct.cum.back() = 2.0;  // absorb float drift on the last branch
    if (t.update) {
      const UpdateElem& e = t.update->elem;
      ct.up.var = var_index(g, t.update->var);
      switch (e.kind) {
        case UpdateElem::Kind::DetLinear:
          ct.up.kind = CUpdate::Kind::Det;
          ct.up.base = compile_expr(e.expr, g.variables);
          break;
        case UpdateElem::Kind::Sample:
          ct.up.base = compile_expr(e.expr, g.variables);
          switch (e.dist.kind) {
            case Distribution::Kind::DiracConst:
              ct.up.kind = CUpdate::Kind::Det;
              ct.up.base.c += rat_double(e.dist.a);
              break;
            case Distribution::Kind::Uniform:
              ct.up.kind = CUpdate::Kind::Unif;
              ct.up.a = rat_double(e.dist.a);
              ct.up.b = rat_double(e.dist.b);
              break;
            case Distribution::Kind::Normal:
              ct.up.kind = CUpdate::Kind::Norm;
              ct.up.a = rat_double(e.dist.a);
              ct.up.b = rat_double(e.dist.b);
              break;
          }
          break;
        case UpdateElem::Kind::Ndet:
          ct.up.kind = CUpdate::Kind::Ndet;
          ct.up.base = compile_expr(e.expr, g.variables);
          ct.up.a = rat_double(e.lo);
          ct.up.b = rat_double(e.hi);
          break;
      }
      auto hi = sched.ndet_hi.find(t.id);
      ct.ndet_hi = hi != sched.ndet_hi.end() && hi->second;
    }
    if (t.id != g.tau_out) c.out[size_t(t.src)].push_back(int(i));
    c.ts.push_back(std::move(ct));
  }

  if (sched.kind == SchedulerKind::PolicyTable) {
    for (const auto& [label, tid] : sched.policy) {
      int loc = g.location_index(label);
      if (loc < 0)
        throw std::invalid_argument("simulate: policy names unknown location " +
                                    label);
      const Transition* t = g.transition(tid);
      if (!t || t->src != loc)
        throw std::invalid_argument("simulate: policy at " + label +
                                    " names no transition from it");
      for (int ti : c.out[size_t(loc)])
        if (g.transitions[size_t(ti)].id == tid) c.forced[size_t(loc)] = ti;
    }
  }
  return c;
}

bool enabled(const CTrans& t, const std::vector<double>& v) {
  for (const auto& con : t.guard) {
    double s = con.e.eval(v);
    if (con.strict ? !(s < 0) : !(s <= 0)) return false;
  }
  return true;
}

RunResult run_compiled(const Compiled& c, std::vector<double>& v,
                       long max_steps, std::uint64_t seed) {
  std::uint64_t s = seed + c.sched_seed * 0xbf58476d1ce4e5b9ULL;
  int loc = c.l_in;
  long step = 0;
  while (loc != c.l_out) {
    if (step >= max_steps) return {RunOutcome::Timeout, step};

    const auto& outs = c.out[size_t(loc)];
    int chosen = -1;
    if (c.kind == SchedulerKind::PolicyTable && c.forced[size_t(loc)] >= 0) {
      int cand = c.forced[size_t(loc)];
      if (!enabled(c.ts[size_t(cand)], v)) return {RunOutcome::Deadlock, step};
      chosen = cand;
    } else if (c.kind == SchedulerKind::UniformRandom) {
      int n = 0;
      for (int ti : outs)
        if (enabled(c.ts[size_t(ti)], v)) ++n;
      if (n == 0) return {RunOutcome::Deadlock, step};
      std::uint64_t pick = rand_below(s, std::uint64_t(n));
      for (int ti : outs)
        if (enabled(c.ts[size_t(ti)], v) && pick-- == 0) {
          chosen = ti;
          break;
        }
    } else {
      for (int ti : outs)
        if (enabled(c.ts[size_t(ti)], v)) {
          chosen = ti;
          break;
        }
      if (chosen < 0) return {RunOutcome::Deadlock, step};
    }

    const CTrans& t = c.ts[size_t(chosen)];
    if (t.up.kind != CUpdate::Kind::None) {
      double nv = t.up.base.eval(v);
      switch (t.up.kind) {
        case CUpdate::Kind::Det:
          break;
        case CUpdate::Kind::Unif:
          nv += t.up.a + next_unit(s) * (t.up.b - t.up.a);
          break;
        case CUpdate::Kind::Norm: {
          double u1 = 1.0 - next_unit(s);  // (0, 1]
          double u2 = next_unit(s);
          nv += t.up.a +
                t.up.b * std::sqrt(-2.0 * std::log(u1)) *
                    std::cos(6.283185307179586 * u2);
          break;
        }
        case CUpdate::Kind::Ndet:
          if (c.kind == SchedulerKind::UniformRandom)
            nv += t.up.a + next_unit(s) * (t.up.b - t.up.a);
          else
            nv += t.ndet_hi ? t.up.b : t.up.a;
          break;
        case CUpdate::Kind::None:
          break;
      }
      int tgt;
      if (t.cum.size() == 1) {
        tgt = t.target[0];
      } else {
        double u = next_unit(s);
        size_t bi = 0;
        while (u >= t.cum[bi]) ++bi;
        tgt = t.target[bi];
      }
      v[size_t(t.up.var)] = nv;
      loc = tgt;
    } else if (t.cum.size() == 1) {
      loc = t.target[0];
    } else {
      double u = next_unit(s);
      size_t bi = 0;
      while (u >= t.cum[bi]) ++bi;
      loc = t.target[bi];
    }
    ++step;
  }
  return {RunOutcome::Terminated, step};
}

std::vector<double> init_state(const PCFG& g,
                               const std::map<std::string, double>& init) {
  std::vector<double> v(g.variables.size(), 0.0);
  for (const auto& [name, val] : init) v[size_t(var_index(g, name))] = val;
  return v;
}

}  // namespace

Scheduler Scheduler::uniform_random(std::uint64_t seed) {
  Scheduler s;
  s.kind = SchedulerKind::UniformRandom;
  s.seed = seed;
  return s;
}

Scheduler Scheduler::first_enabled() {
  Scheduler s;
  s.kind = SchedulerKind::FirstEnabled;
  return s;
}

RunResult run_once(const PCFG& g, const Scheduler& sched,
                   const std::map<std::string, double>& init, long max_steps,
                   std::uint64_t seed) {
  Compiled c = compile(g, sched);
  std::vector<double> v = init_state(g, init);
  return run_compiled(c, v, max_steps, seed);
}

RunStats estimate_termination(const PCFG& g, const Scheduler& sched,
                              const std::map<std::string, double>& init,
                              long n_runs, long max_steps, std::uint64_t seed) {
  if (n_runs < 1) throw std::invalid_argument("estimate_termination: n_runs");
  Compiled c = compile(g, sched);
  std::vector<double> v0 = init_state(g, init);

  RunStats st;
  st.n_runs = n_runs;
  st.max_steps = max_steps;
  double step_sum = 0;
  std::vector<double> v;
  for (long i = 0; i < n_runs; ++i) {
    v = v0;
    // Counter-based stream split: each run advances the golden-gamma lattice.
    std::uint64_t run_seed =
        seed + 0x9e3779b97f4a7c15ULL * (std::uint64_t(i) + 1);
    RunResult r = run_compiled(c, v, max_steps, run_seed);
    switch (r.outcome) {
      case RunOutcome::Terminated:
        ++st.n_terminated;
        step_sum += double(r.steps);
        break;
      case RunOutcome::Timeout:
        ++st.n_timeout;
        break;
      case RunOutcome::Deadlock:
        ++st.n_deadlock;
        break;
    }
  }
  st.frequency = double(st.n_terminated) / double(st.n_runs);
  if (st.n_terminated > 0) st.mean_steps = step_sum / double(st.n_terminated);

  const double z = 1.96, z2 = z * z, n = double(st.n_runs);
  double p = st.frequency;
  double denom = 1.0 + z2 / n;
  double center = p + z2 / (2.0 * n);
  double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  st.wilson_lo = std::max(0.0, (center - half) / denom);
  st.wilson_hi = std::min(1.0, (center + half) / denom);
  // The interval endpoints are exact at degenerate frequencies; rounding in
  // sqrt must not leak a bound past them.
  if (st.n_terminated == 0) st.wilson_lo = 0.0;
  if (st.n_terminated == st.n_runs) st.wilson_hi = 1.0;
  return st;
}

std::string RunStats::report() const {
  std::ostringstream os;
  os << "runs " << n_runs << ", max steps " << max_steps << "\n"
     << "terminated " << n_terminated << " (frequency " << frequency
     << "), timeouts " << n_timeout << ", deadlocks " << n_deadlock << "\n"
     << "mean steps among terminated " << mean_steps << "\n"
     << "Wilson 95% interval [" << wilson_lo << ", " << wilson_hi << "]\n"
     << "note: " << kCaveat << "\n";
  return os.str();
}

std::string RunStats::to_json() const {
  nlohmann::json j;
  j["runs"] = n_runs;
  j["terminated"] = n_terminated;
  j["timeouts"] = n_timeout;
  j["deadlocks"] = n_deadlock;
  j["max_steps"] = max_steps;
  j["frequency"] = frequency;
  j["mean_steps"] = mean_steps;
  j["wilson95"] = nlohmann::json::array({wilson_lo, wilson_hi});
  j["note"] = kCaveat;
  return j.dump(2) + "\n";
}

}  // namespace lexrsm
