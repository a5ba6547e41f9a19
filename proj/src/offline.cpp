#include "procrastinate/offline.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "procrastinate/core.hpp"
#include "procrastinate/errors.hpp"

namespace procrastinate {

std::string_view to_string(Feasibility f) {
  switch (f) {
    case Feasibility::Feasible: return "feasible";
    case Feasibility::Infeasible: return "infeasible";
    case Feasibility::Indeterminate: return "indeterminate";
  }
  return "?";
}

std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::UnknownJob: return "unknown-job";
    case ViolationKind::EmptySegment: return "empty-segment";
    case ViolationKind::BeforeRelease: return "before-release";
    case ViolationKind::Overlap: return "overlap";
    case ViolationKind::SegmentWork: return "segment-work";
    case ViolationKind::WorkMismatch: return "work-mismatch";
    case ViolationKind::LateCompletion: return "late-completion";
  }
  return "?";
}

namespace {

// Later release wins; equal releases go to the lower id.
bool outranks(const Job& a, const Job& b) {
  if (a.release > b.release) return true;
  if (a.release < b.release) return false;
  return a.id < b.id;
}

Schedule forward_from_backward(std::vector<Segment> backward) {
  std::reverse(backward.begin(), backward.end());
  Schedule out;
  out.direction = ScheduleDirection::BackwardConstructed;
  for (auto& seg : backward) {
    if (!out.segments.empty() && out.segments.back().job == seg.job && out.segments.back().end == seg.start) {
      out.segments.back().end = seg.end;
      out.segments.back().work_done += seg.work_done;
    } else {
      out.segments.push_back(std::move(seg));
    }
  }
  return out;
}

}  // namespace

LrtbResult lrtb(const Instance& instance, const PrecisionContext& ctx) {
  if (instance.empty()) throw DomainError("lrtb: empty instance");
  for (const auto& j : instance.jobs())
    if (!j.lazy_or_empty())
      throw UnsupportedError("lrtb: job " + std::to_string(j.id) + " is not lazy; optimality is only known for lazy jobs");

  const std::size_t n = instance.size();
  std::vector<Real> remaining;
  remaining.reserve(n);
  for (const auto& j : instance.jobs()) remaining.push_back(j.work);
  std::vector<bool> entered(n, false), dropped(n, false);

  std::vector<std::size_t> by_due(n);
  std::iota(by_due.begin(), by_due.end(), 0);
  std::stable_sort(by_due.begin(), by_due.end(),
                   [&](std::size_t a, std::size_t b) { return instance[a].due > instance[b].due; });

  std::vector<Segment> backward;
  bool indeterminate = false;
  Real margin = Real::infinity(ctx.bits);
  std::size_t next_enter = 0;
  Real t = instance.max_due();

  for (;;) {
    while (next_enter < n && instance[by_due[next_enter]].due >= t) entered[by_due[next_enter++]] = true;

    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < n; ++i) {
      if (!entered[i] || dropped[i] || remaining[i].sign() <= 0) continue;
      if (!(instance[i].release < t)) {
        dropped[i] = true;  // swept past its release with work left
        continue;
      }
      if (!best || outranks(instance[i], instance[*best])) best = i;
    }

    const bool more_to_enter = next_enter < n;
    if (!best) {
      if (!more_to_enter) break;
      t = instance[by_due[next_enter]].due;  // idle gap back to the next due date
      continue;
    }

    const Job& job = instance[*best];
    Real& rem = remaining[*best];
    const bool release_bound = !more_to_enter || !(instance[by_due[next_enter]].due > job.release);
    const Real lower = release_bound ? job.release : instance[by_due[next_enter]].due;
    const Real available = work_in(job, lower, t);

    if (rem <= available) {
      if (release_bound) {
        margin = min(margin, available - rem);
        if (ctx.compare(rem, available) == Verdict::Indeterminate) indeterminate = true;
      }
      Real start = latest_start(job, t, rem);
      if (start < lower) start = lower;
      if (start < t) backward.push_back(Segment{job.id, start, t, rem});
      rem = Real(0L, ctx.bits);
      t = start;
      continue;
    }

    if (lower < t) backward.push_back(Segment{job.id, lower, t, available});
    if (release_bound) {
      margin = min(margin, rem - available);
      if (ctx.compare(rem, available) == Verdict::Indeterminate) {
        indeterminate = true;
        rem = Real(0L, ctx.bits);
      } else {
        rem -= available;
        dropped[*best] = true;
      }
    } else {
      rem -= available;
    }
    t = lower;
  }

  LrtbResult result;
  result.schedule = forward_from_backward(std::move(backward));
  auto& v = result.verdict;
  v.margin = margin;
  for (std::size_t i = 0; i < n; ++i)
    if (remaining[i].sign() > 0) v.deficits.push_back(JobDeficit{instance[i].id, remaining[i]});
  if (!v.deficits.empty()) {
    v.status = Feasibility::Infeasible;
  } else if (indeterminate) {
    v.status = Feasibility::Indeterminate;
  } else {
    v.status = Feasibility::Feasible;
    v.witness = result.schedule;
  }
  return result;
}

Real total_busy_time(const Schedule& schedule) {
  unsigned bits = kDefaultBits;
  if (!schedule.segments.empty()) bits = schedule.segments.front().start.bits();
  Real sum(0L, bits);
  for (const auto& s : schedule.segments) sum += s.duration();
  return sum;
}

ValidationReport validate_schedule(const Instance& instance, const Schedule& schedule, bool require_due_dates,
                                   const PrecisionContext& ctx, const std::optional<Real>& speed_cap_factor) {
  ValidationReport report;
  auto add = [&](ViolationKind kind, JobId job, std::size_t seg, std::string msg) {
    report.violations.push_back(Violation{kind, job, seg, std::move(msg)});
  };

  std::map<JobId, Real> done;
  std::map<JobId, Real> sensitivity;  // work error induced by last-bit time error
  std::map<JobId, Real> last_end;
  const auto& segs = schedule.segments;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    const Segment& s = segs[k];
    auto idx = instance.index_of(s.job);
    if (!idx) {
      add(ViolationKind::UnknownJob, s.job, k, "segment refers to unknown job");
      continue;
    }
    const Job& j = instance[*idx];
    if (!(s.start < s.end)) {
      add(ViolationKind::EmptySegment, s.job, k, "segment has non-positive length");
      continue;
    }
    if (ctx.compare(s.start, j.release) == Verdict::Less) {
      add(ViolationKind::BeforeRelease, s.job, k, "segment starts before the job's release " + j.release.to_decimal(12));
      continue;
    }
    if (k > 0 && ctx.compare(segs[k - 1].end, s.start) == Verdict::Greater)
      add(ViolationKind::Overlap, s.job, k, "segment overlaps the previous one (ends " + segs[k - 1].end.to_decimal(12) + ")");

    const Real start = max(s.start, j.release);
    SpeedCap cap;
    if (speed_cap_factor) cap = *speed_cap_factor * speed_at(j, j.due);
    const Real expected = work_in(j, start, s.end, cap);
    const Real sens = speed_at(j, s.end, cap) * max(max(abs(s.end), abs(s.start)), Real(1L, ctx.bits));
    if (ctx.compare(s.work_done, expected, sens) != Verdict::Equal &&
        ctx.compare(s.work_done, expected, sens) != Verdict::Indeterminate)
      add(ViolationKind::SegmentWork, s.job, k,
          "segment work " + s.work_done.to_decimal(12) + " differs from the integral " + expected.to_decimal(12));

    auto [it, fresh] = done.try_emplace(s.job, Real(0L, ctx.bits));
    it->second += s.work_done;
    auto [sit, sfresh] = sensitivity.try_emplace(s.job, Real(0L, ctx.bits));
    sit->second += sens;
    last_end[s.job] = s.end;
  }

  for (const auto& j : instance.jobs()) {
    const Real got = done.count(j.id) ? done.at(j.id) : Real(0L, ctx.bits);
    const Real sens = sensitivity.count(j.id) ? sensitivity.at(j.id) : Real(0L, ctx.bits);
    const Verdict v = ctx.compare(got, j.work, sens);
    if (v == Verdict::Less || v == Verdict::Greater)
      add(ViolationKind::WorkMismatch, j.id, 0,
          "job " + std::to_string(j.id) + " received " + got.to_decimal(12) + " of " + j.work.to_decimal(12) + " work");
    if (require_due_dates && last_end.count(j.id) && ctx.compare(last_end.at(j.id), j.due) == Verdict::Greater)
      add(ViolationKind::LateCompletion, j.id, 0,
          "job " + std::to_string(j.id) + " finishes at " + last_end.at(j.id).to_decimal(12) + " after its due date " +
              j.due.to_decimal(12));
  }
  return report;
}

namespace {

// One right-to-left greedy pass over the slice grid for a fixed priority
// order. Returns the busy time, or nullopt if some job cannot finish.
std::optional<Real> greedy_on_grid(const Instance& inst, const std::vector<Real>& grid,
                                   const std::vector<std::size_t>& order, const PrecisionContext& ctx) {
  const std::size_t n = inst.size();
  std::vector<Real> rem;
  for (const auto& j : inst.jobs()) rem.push_back(j.work);
  Real busy(0L, ctx.bits);

  // breakpoints at which eligibility can change
  std::vector<Real> events;
  for (const auto& j : inst.jobs()) {
    events.push_back(j.release);
    events.push_back(j.due);
  }

  auto grid_index = [&](const Real& x) {
    return static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), x) - grid.begin());
  };

  std::size_t top = grid.size() - 1;  // processing slices left of grid[top]
  while (top > 0) {
    const Real& hi = grid[top];
    const Real& lo = grid[top - 1];
    std::optional<std::size_t> pick;
    for (std::size_t p : order) {
      const Job& j = inst[p];
      if (rem[p].sign() > 0 && j.release <= lo && hi <= j.due) {
        pick = p;
        break;
      }
    }
    if (!pick) {
      --top;
      continue;
    }
    const Job& j = inst[*pick];
    // run continuously down to the next breakpoint at most
    Real floor_time = grid.front();
    for (const auto& e : events)
      if (e < hi && e > floor_time) floor_time = e;
    const std::size_t floor_idx = grid_index(floor_time);
    const Real whole = work_in(j, grid[floor_idx], hi);
    if (rem[*pick] >= whole) {
      rem[*pick] -= whole;
      busy += hi - grid[floor_idx];
      top = floor_idx;
      continue;
    }
    // largest k with work_in(grid[k], hi) >= rem: slices k..top are used
    std::size_t k_lo = floor_idx, k_hi = top;  // work(k_lo) >= rem > work(k_hi)
    while (k_hi - k_lo > 1) {
      const std::size_t mid = (k_lo + k_hi) / 2;
      if (work_in(j, grid[mid], hi) >= rem[*pick]) k_lo = mid; else k_hi = mid;
    }
    // partial slice [grid[k_lo], grid[k_lo + 1]]: bisect for the start
    Real x_lo = grid[k_lo], x_hi = grid[k_lo + 1];
    for (unsigned it = 0; it < ctx.bits + 8; ++it) {
      Real mid = (x_lo + x_hi) / 2;
      if (!(mid > x_lo && mid < x_hi)) break;
      if (work_in(j, mid, hi) >= rem[*pick]) x_lo = mid; else x_hi = mid;
    }
    busy += hi - x_lo;
    rem[*pick] = Real(0L, ctx.bits);
    top = k_lo;  // the rest of the partial slice stays idle
  }
  for (std::size_t i = 0; i < n; ++i)
    if (rem[i].sign() > 0) return std::nullopt;
  return busy;
}

}  // namespace

Real brute_force_optimal(const Instance& instance, unsigned resolution, const PrecisionContext& ctx) {
  if (instance.empty()) throw DomainError("brute_force_optimal: empty instance");
  if (instance.size() > 4) throw ParameterError("brute_force_optimal supports at most 4 jobs");
  if (resolution == 0) throw ParameterError("resolution must be positive");

  const Real lo = instance.min_release();
  const Real hi = instance.max_due();
  std::vector<Real> grid;
  for (unsigned k = 0; k <= resolution; ++k) grid.push_back(lo + (hi - lo) * Real(k, ctx.bits) / Real(resolution, ctx.bits));
  for (const auto& j : instance.jobs()) {
    grid.push_back(j.release);
    grid.push_back(j.due);
  }
  std::sort(grid.begin(), grid.end(), [](const Real& a, const Real& b) { return a < b; });
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<std::size_t> order(instance.size());
  std::iota(order.begin(), order.end(), 0);
  std::optional<Real> best;
  do {
    auto busy = greedy_on_grid(instance, grid, order, ctx);
    if (busy && (!best || *busy < *best)) best = *busy;
  } while (std::next_permutation(order.begin(), order.end()));

  if (!best) throw InfeasibleError("no discretised schedule completes every job at resolution " + std::to_string(resolution));
  return *best;
}

bool has_covering_nonlazy_job(const Instance& instance) {
  std::optional<std::size_t> cover;
  for (std::size_t i = 0; i < instance.size(); ++i) {
    const Job& j = instance[i];
    if (j.lazy_or_empty()) continue;
    if (!j.speed.nonlazy() || cover) return false;
    cover = i;
  }
  if (!cover) return false;
  const Job& c = instance[*cover];
  for (const auto& j : instance.jobs())
    if (j.id != c.id && (j.release < c.release || j.due > c.due)) return false;
  return true;
}

FeasibilityVerdict check_nonlazy_fill(const Instance& instance, const PrecisionContext& ctx) {
  if (!has_covering_nonlazy_job(instance))
    throw UnsupportedError("check_nonlazy_fill needs exactly one nonlazy job whose interval covers all others");

  std::vector<Job> lazy;
  const Job* cover = nullptr;
  for (const auto& j : instance.jobs()) {
    if (j.lazy_or_empty()) lazy.push_back(j);
    else cover = &j;
  }

  FeasibilityVerdict v;
  Schedule lazy_schedule;
  if (!lazy.empty()) {
    auto packed = lrtb(Instance(lazy), ctx);
    if (packed.verdict.status != Feasibility::Feasible) {
      v = packed.verdict;
      v.witness.reset();
      return v;
    }
    lazy_schedule = packed.schedule;
  }

  const Real idle = (cover->due - cover->release) - total_busy_time(lazy_schedule);
  const Real capacity = idle * cover->speed.base;
  v.margin = abs(capacity - cover->work);
  switch (ctx.compare(cover->work, capacity)) {
    case Verdict::Greater:
      v.status = Feasibility::Infeasible;
      v.deficits.push_back(JobDeficit{cover->id, cover->work - capacity});
      return v;
    case Verdict::Indeterminate:
      v.status = Feasibility::Indeterminate;
      return v;
    default:
      v.status = Feasibility::Feasible;
  }

  // witness: lazy segments plus the nonlazy job filling gaps left to right
  Schedule out;
  Real need = cover->work;
  Real cursor = cover->release;
  auto fill = [&](const Real& gap_end) {
    if (need.sign() <= 0 || !(cursor < gap_end)) return;
    const Real can = (gap_end - cursor) * cover->speed.base;
    const Real take = min(can, need);
    const Real end = can <= need ? gap_end : cursor + take / cover->speed.base;
    out.segments.push_back(Segment{cover->id, cursor, end, take});
    need -= take;
  };
  for (const auto& s : lazy_schedule.segments) {
    fill(s.start);
    out.segments.push_back(s);
    cursor = max(cursor, s.end);
  }
  fill(cover->due);
  v.witness = out;
  return v;
}

LrtbResult solve(const Instance& instance, const PrecisionContext& ctx) {
  if (instance.all_lazy()) return lrtb(instance, ctx);
  if (!has_covering_nonlazy_job(instance))
    throw UnsupportedError("needs all lazy jobs, or one nonlazy job covering the lazy ones");
  LrtbResult res;
  res.verdict = check_nonlazy_fill(instance, ctx);
  if (res.verdict.witness) res.schedule = *res.verdict.witness;
  return res;
}

}  // namespace procrastinate
