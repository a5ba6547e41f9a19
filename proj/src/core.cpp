#include "procrastinate/core.hpp"

#include "procrastinate/errors.hpp"

namespace procrastinate {

namespace {

void require_released(const Job& job, const Real& t, const char* what) {
  if (t < job.release)
    throw DomainError(std::string(what) + ": time " + t.to_decimal(12) + " precedes release " +
                      job.release.to_decimal(12) + " of job " + std::to_string(job.id));
}

// Time at which the uncapped ramp reaches `cap`; only meaningful for slope > 0.
Real cap_reached_at(const Job& job, const Real& cap) { return job.release + (cap - job.speed.base) / job.speed.slope; }

}  // namespace

Real speed_at(const Job& job, const Real& t) {
  require_released(job, t, "speed_at");
  return job.speed.base + job.speed.slope * (t - job.release);
}

Real speed_at(const Job& job, const Real& t, const SpeedCap& cap) {
  Real v = speed_at(job, t);
  if (cap && *cap < v) return *cap;
  return v;
}

Real work_in(const Job& job, const Real& a, const Real& b) {
  require_released(job, a, "work_in");
  if (b < a) throw DomainError("work_in: interval end precedes its start");
  // duration times the speed at the midpoint, exact for an affine ramp
  const Real mid_offset = ((a - job.release) + (b - job.release)) / 2;
  return (b - a) * (job.speed.base + job.speed.slope * mid_offset);
}

Real work_in(const Job& job, const Real& a, const Real& b, const SpeedCap& cap) {
  if (!cap) return work_in(job, a, b);
  require_released(job, a, "work_in");
  if (b < a) throw DomainError("work_in: interval end precedes its start");
  if (job.speed.slope.is_zero()) return (b - a) * min(job.speed.base, *cap);
  const Real knee = cap_reached_at(job, *cap);
  if (knee <= a) return (b - a) * *cap;
  if (knee >= b) return work_in(job, a, b);
  return work_in(job, a, knee) + (b - knee) * *cap;
}

Real completion_from(const Job& job, const Real& start, const Real& remaining) {
  require_released(job, start, "completion_from");
  if (remaining.sign() < 0) throw DomainError("completion_from: negative remaining work");
  if (remaining.is_zero()) return start;
  const Real v0 = speed_at(job, start);
  // slope/2 * x^2 + v0 * x - remaining = 0, solved without cancellation
  const Real denom = v0 + sqrt(v0 * v0 + 2 * job.speed.slope * remaining);
  if (denom.is_zero())
    throw NeverCompletesError("job " + std::to_string(job.id) + " has zero speed forever but work remains");
  return start + 2 * remaining / denom;
}

Real completion_from(const Job& job, const Real& start, const Real& remaining, const SpeedCap& cap) {
  if (!cap) return completion_from(job, start, remaining);
  require_released(job, start, "completion_from");
  if (remaining.sign() < 0) throw DomainError("completion_from: negative remaining work");
  if (remaining.is_zero()) return start;
  auto plateau = [&](const Real& from, const Real& rest, const Real& speed) {
    if (speed.sign() <= 0)
      throw NeverCompletesError("job " + std::to_string(job.id) + " has zero capped speed but work remains");
    return from + rest / speed;
  };
  if (job.speed.slope.is_zero()) return plateau(start, remaining, min(job.speed.base, *cap));
  const Real knee = cap_reached_at(job, *cap);
  if (knee <= start) return plateau(start, remaining, *cap);
  const Real ramp_work = work_in(job, start, knee);
  if (remaining <= ramp_work) return completion_from(job, start, remaining);
  return plateau(knee, remaining - ramp_work, *cap);
}

Real latest_start(const Job& job, const Real& end, const Real& work) {
  require_released(job, end, "latest_start");
  if (work.sign() < 0) throw DomainError("latest_start: negative work");
  if (work.is_zero()) return end;
  const Real available = work_in(job, job.release, end);
  if (work > available)
    throw InfeasibleError("job " + std::to_string(job.id) + " cannot fit " + work.to_decimal(12) +
                          " work before " + end.to_decimal(12));
  const Real v1 = speed_at(job, end);
  Real disc = v1 * v1 - 2 * job.speed.slope * work;
  if (disc.sign() < 0) disc = Real(0L, disc.bits());
  const Real a = end - 2 * work / (v1 + sqrt(disc));
  return a < job.release ? job.release : a;
}

Real rightmost_running_time(const Real& length, const Real& work) {
  if (length.sign() <= 0) throw DomainError("rightmost_running_time: non-positive interval length");
  if (work.sign() < 0) throw DomainError("rightmost_running_time: negative work");
  const Real disc = length * length - 2 * work;
  if (disc.sign() < 0)
    throw InfeasibleError("work " + work.to_decimal(12) + " does not fit an interval of length " +
                          length.to_decimal(12));
  if (work.is_zero()) return Real(0L, length.bits());
  // l - sqrt(l^2 - 2w) rewritten as 2w / (l + sqrt(l^2 - 2w))
  return 2 * work / (length + sqrt(disc));
}

Instance normalize_slopes(const Instance& instance) {
  std::vector<Job> out;
  out.reserve(instance.size());
  for (const auto& j : instance.jobs()) {
    if (j.speed.slope.sign() <= 0)
      throw UnsupportedError("normalize_slopes: job " + std::to_string(j.id) + " is nonlazy (slope 0)");
    const Real& m = j.speed.slope;
    out.push_back(Job::affine(j.id, j.release, j.due, j.work / m, j.speed.base / m, Real(1L, m.bits())));
  }
  return Instance(std::move(out), instance.name(), instance.provenance());
}

Real stretch(const Job& job, const Real& completion) {
  if (completion < job.release) throw DomainError("stretch: completion precedes release");
  return (completion - job.release) / (job.due - job.release);
}

bool has_slack(const Job& job) { return job.work < work_in(job, job.release, job.due); }

}  // namespace procrastinate
