#pragma once

#include <optional>

#include "procrastinate/model.hpp"

namespace procrastinate {

/// Upper bound on a job's execution speed, in work-units per time-unit.
/// std::nullopt leaves the ramp uncapped.
using SpeedCap = std::optional<Real>;

/// f_j(t). Throws DomainError for t < release.
Real speed_at(const Job& job, const Real& t);
Real speed_at(const Job& job, const Real& t, const SpeedCap& cap);

/// Work completed by running `job` over [a, b].
/// Throws DomainError when a < release or b < a.
Real work_in(const Job& job, const Real& a, const Real& b);
/// Same integral under min(f_j(t), cap): a ramp followed by a plateau.
Real work_in(const Job& job, const Real& a, const Real& b, const SpeedCap& cap);

/// The unique b >= start at which `remaining` more work has been done when the
/// job runs without pause from `start`. Throws NeverCompletesError if the speed
/// is zero forever while work remains.
Real completion_from(const Job& job, const Real& start, const Real& remaining);
Real completion_from(const Job& job, const Real& start, const Real& remaining, const SpeedCap& cap);

/// The latest a <= end with work_in(job, a, end) == work, i.e. the start of a
/// run pushed against `end`. Throws InfeasibleError when the work does not fit
/// between the release time and `end`.
Real latest_start(const Job& job, const Real& end, const Real& work);

/// Running time of a unit-slope lazy job of interval length `length` whose
/// work is pushed against its due date: the smaller root l - sqrt(l^2 - 2w).
/// Throws InfeasibleError when l^2 < 2w.
Real rightmost_running_time(const Real& length, const Real& work);

/// Rescales every lazy job to unit slope (work w / m, base b / m).
/// Segment boundaries of every schedule are unchanged by this rescaling.
/// Throws UnsupportedError when a job has slope zero.
Instance normalize_slopes(const Instance& instance);

/// Interval stretch (C - r) / (d - r). Throws DomainError when C < r.
Real stretch(const Job& job, const Real& completion);

/// True when w < (d - r)^2 / 2 scaled by the slope, i.e. the job need not
/// occupy its whole interval.
bool has_slack(const Job& job);

}  // namespace procrastinate
