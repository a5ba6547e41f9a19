#include "procrastinate/online.hpp"

#include <algorithm>

#include "procrastinate/errors.hpp"

namespace procrastinate {

std::string_view to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::FIFO: return "fifo";
    case PolicyKind::EDD: return "edd";
    case PolicyKind::SRPT: return "srpt";
    case PolicyKind::LSSF: return "lssf";
    case PolicyKind::Thrashing: return "thrashing";
  }
  return "?";
}

std::optional<PolicyKind> parse_policy(std::string_view name) {
  for (auto k : {PolicyKind::FIFO, PolicyKind::EDD, PolicyKind::SRPT, PolicyKind::LSSF, PolicyKind::Thrashing})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::Release: return "release";
    case EventKind::Start: return "start";
    case EventKind::Preempt: return "preempt";
    case EventKind::Complete: return "complete";
    case EventKind::IdleBegin: return "idle-begin";
    case EventKind::IdleEnd: return "idle-end";
  }
  return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view name) {
  for (auto k : {EventKind::Release, EventKind::Start, EventKind::Preempt, EventKind::Complete, EventKind::IdleBegin,
                 EventKind::IdleEnd})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

void PolicySpec::validate() const {
  if (!alpha.is_finite() || alpha < 1L) throw ParameterError("alpha must be >= 1");
  if (speed_cap_factor && (!speed_cap_factor->is_finite() || speed_cap_factor->sign() <= 0))
    throw ParameterError("speed cap factor must be positive");
}

SimState SimState::initial(const Instance& instance, const PolicySpec& policy) {
  SimState s;
  s.instance = &instance;
  for (const auto& job : instance.jobs()) {
    s.remaining.push_back(job.work);
    s.done.push_back(false);
    if (policy.speed_cap_factor) {
      Real cap = *policy.speed_cap_factor * speed_at(job, job.due);
      if (cap.sign() <= 0 && job.work.sign() > 0)
        throw NeverCompletesError("job " + std::to_string(job.id) + " has a zero speed cap");
      s.caps.emplace_back(std::move(cap));
    } else {
      s.caps.emplace_back(std::nullopt);
    }
  }
  return s;
}

Real stretch_so_far(const Job& job, const Real& t) { return (t - job.release) / job.length(); }

namespace {

enum class Rank { Better, Tie, Worse };

Rank from_verdict(Verdict v, bool smaller_is_better) {
  if (v == Verdict::Equal || v == Verdict::Indeterminate) return Rank::Tie;
  return (v == Verdict::Less) == smaller_is_better ? Rank::Better : Rank::Worse;
}

Rank exact(const Real& a, const Real& b, bool smaller_is_better) {
  if (a == b) return Rank::Tie;
  return (a < b) == smaller_is_better ? Rank::Better : Rank::Worse;
}

}  // namespace

std::optional<std::size_t> next_dispatch(const PolicySpec& policy, const SimState& state, const Real& t,
                                         const PrecisionContext& ctx) {
  const Instance& inst = *state.instance;
  std::optional<std::size_t> best;
  Real best_key;

  auto key_of = [&](std::size_t i) -> Real {
    const Job& job = inst[i];
    switch (policy.kind) {
      case PolicyKind::FIFO: return job.release;
      case PolicyKind::EDD: return job.due;
      case PolicyKind::SRPT: return completion_from(job, t, state.remaining[i], state.caps[i]) - t;
      case PolicyKind::LSSF: return stretch_so_far(job, t);
      case PolicyKind::Thrashing: return job.release;
    }
    return Real();
  };

  // Rank candidate i against the current best.
  auto rank = [&](std::size_t i, const Real& key) -> Rank {
    switch (policy.kind) {
      case PolicyKind::FIFO:
      case PolicyKind::EDD: return exact(key, best_key, true);
      case PolicyKind::Thrashing: return exact(key, best_key, false);
      case PolicyKind::SRPT: return from_verdict(ctx.compare(key, best_key), true);
      case PolicyKind::LSSF: {
        const Rank r = from_verdict(ctx.compare(key, best_key), false);
        if (r != Rank::Tie) return r;
        // the steeper line leads immediately after t
        return exact(inst[i].length(), inst[*best].length(), true);
      }
    }
    return Rank::Tie;
  };

  for (std::size_t i = 0; i < inst.size(); ++i) {
    if (state.done[i] || inst[i].release > t) continue;
    if (policy.kind == PolicyKind::Thrashing && ctx.compare(stretch_so_far(inst[i], t), policy.alpha) == Verdict::Less)
      continue;
    Real key = key_of(i);
    bool take = !best;
    if (!take) {
      const Rank r = rank(i, key);
      if (r == Rank::Better) {
        take = true;
      } else if (r == Rank::Tie) {
        // running job first, then lowest id
        if (state.running == i) take = true;
        else if (state.running != best && inst[i].id < inst[*best].id) take = true;
      }
    }
    if (take) {
      best = i;
      best_key = std::move(key);
    }
  }
  return best;
}

std::optional<Real> lssf_crossing(const Job& i, const Job& j, const Real& now) {
  const Real li = i.length(), lj = j.length();
  if (li == lj) return std::nullopt;
  Real t = (i.release * lj - j.release * li) / (lj - li);
  if (t > now) return t;
  return std::nullopt;
}

Real thrashing_activation(const Job& job, const Real& alpha) {
  if (alpha < 1L) throw ParameterError("alpha must be >= 1");
  return job.release + alpha * job.length();
}

SimTrace simulate(const Instance& instance, const PolicySpec& policy, const PrecisionContext& ctx) {
  policy.validate();
  if (instance.empty()) throw DomainError("simulate: empty instance");
  const std::size_t n = instance.size();
  SimState state = SimState::initial(instance, policy);
  SimTrace trace;
  for (const auto& job : instance.jobs()) trace.jobs.push_back(
        JobOutcome{job.id, job.release, job.due, Real::infinity(ctx.bits), Real::infinity(ctx.bits)});

  Real t = instance.min_release();
  std::size_t next_release = 0;  // jobs are sorted by release
  std::size_t remaining_jobs = n;
  bool idle = false;
  Real run_start, run_work;

  auto emit = [&](EventKind kind, JobId id) { trace.events.push_back(SimEvent{t, kind, id}); };
  auto close_run = [&]() {
    const std::size_t r = *state.running;
    if (t > run_start) trace.segments.push_back(Segment{instance[r].id, run_start, t, run_work});
  };

  while (remaining_jobs > 0) {
    while (next_release < n && instance[next_release].release <= t) emit(EventKind::Release, instance[next_release++].id);

    const auto choice = next_dispatch(policy, state, t, ctx);
    if (choice != state.running || (!choice && !idle)) {
      if (state.running) {
        close_run();
        emit(EventKind::Preempt, instance[*state.running].id);
      } else if (idle && choice) {
        emit(EventKind::IdleEnd, 0);
        idle = false;
      }
      if (choice) {
        emit(EventKind::Start, instance[*choice].id);
        run_start = t;
        run_work = Real(0L, ctx.bits);
      } else if (!idle) {
        emit(EventKind::IdleBegin, 0);
        idle = true;
      }
      state.running = choice;
    }

    // Next decision point other than the running job's completion.
    std::optional<Real> horizon;
    auto consider = [&](const Real& c) {
      if (c > t && (!horizon || c < *horizon)) horizon = c;
    };
    if (next_release < n) consider(instance[next_release].release);
    for (std::size_t i = 0; i < next_release; ++i) {
      if (state.done[i]) continue;
      if (policy.kind == PolicyKind::Thrashing) {
        consider(thrashing_activation(instance[i], policy.alpha));
      } else if (policy.kind == PolicyKind::LSSF && state.running && i != *state.running) {
        if (auto c = lssf_crossing(instance[*state.running], instance[i], t)) consider(*c);
      }
    }

    if (!state.running) {
      if (!horizon) throw NeverCompletesError("simulate: policy idles forever with unfinished jobs");
      t = *horizon;
      continue;
    }

    const std::size_t r = *state.running;
    const Job& job = instance[r];
    Real finish = completion_from(job, t, state.remaining[r], state.caps[r]);
    bool completes = !horizon || finish <= *horizon;
    if (!completes) {
      const Real done_work = work_in(job, t, *horizon, state.caps[r]);
      state.remaining[r] -= done_work;
      run_work += done_work;
      t = *horizon;
      if (ctx.compare(state.remaining[r], Real(0L, ctx.bits), job.work) != Verdict::Greater) {
        completes = true;
        finish = t;
      }
    }
    if (completes) {
      run_work += state.remaining[r];
      state.remaining[r] = Real(0L, ctx.bits);
      t = finish;
      close_run();
      emit(EventKind::Complete, job.id);
      state.done[r] = true;
      state.running.reset();
      trace.jobs[r].completion = t;
      trace.jobs[r].stretch = stretch(job, t);
      --remaining_jobs;
    }
  }

  trace.busy_time = Real(0L, ctx.bits);
  for (const auto& seg : trace.segments) trace.busy_time += seg.duration();
  return trace;
}

Real max_stretch(const SimTrace& trace) {
  if (trace.jobs.empty()) throw DomainError("max_stretch: empty trace");
  const Real* best = nullptr;
  for (const auto& job : trace.jobs) {
    if (!job.stretch.is_finite()) throw DomainError("max_stretch: job " + std::to_string(job.id) + " never completed");
    if (!best || job.stretch > *best) best = &job.stretch;
  }
  return *best;
}

Real busy_time_in_window(const SimTrace& trace, const Real& r, const Real& d, bool contained_only) {
  if (!(r < d)) throw DomainError("busy_time_in_window: empty window");
  Real total(0L, r.bits());
  for (const auto& seg : trace.segments) {
    if (contained_only) {
      auto it = std::find_if(trace.jobs.begin(), trace.jobs.end(), [&](const JobOutcome& j) { return j.id == seg.job; });
      if (it == trace.jobs.end() || it->release < r || it->due > d) continue;
    }
    const Real& lo = max(seg.start, r);
    const Real& hi = min(seg.end, d);
    if (hi > lo) total += hi - lo;
  }
  return total;
}

Schedule to_schedule(const SimTrace& trace) {
  Schedule s;
  s.segments = trace.segments;
  s.direction = ScheduleDirection::Forward;
  return s;
}

}  // namespace procrastinate
