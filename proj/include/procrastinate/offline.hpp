#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "procrastinate/model.hpp"
#include "procrastinate/precision.hpp"

namespace procrastinate {

enum class Feasibility { Feasible, Infeasible, Indeterminate };

std::string_view to_string(Feasibility f);

struct JobDeficit {
  JobId job = 0;
  Real work;
};

/// Three-valued feasibility decision.
///
/// `margin` is the smallest gap met in a fate-deciding comparison (remaining
/// work against what still fits before a release time); it is +inf when no
/// such comparison happened. Indeterminate verdicts always carry a margin
/// below the context tolerance, and re-running at a higher precision may
/// resolve them.
struct FeasibilityVerdict {
  Feasibility status = Feasibility::Indeterminate;
  std::optional<Schedule> witness;
  std::vector<JobDeficit> deficits;
  Real margin;
};

struct LrtbResult {
  Schedule schedule;
  FeasibilityVerdict verdict;
};

/// Latest Release Time Backwards.
///
/// Sweeps time backward from the latest due date. At every instant the job
/// with the latest release time among those whose due date has been reached
/// and whose work remains is run (equal release times: lowest id first).
/// Every job's work ends up as late as the priority rule allows, which
/// minimises total busy time for all-lazy instances; the instance is
/// feasible exactly when the sweep exhausts every job's work before passing
/// its release time.
///
/// Infeasible instances still get the maximal backward schedule plus the
/// per-job deficits. Throws UnsupportedError for jobs with positive work and
/// a non-lazy speed function, DomainError for an empty instance.
LrtbResult lrtb(const Instance& instance, const PrecisionContext& ctx);

Real total_busy_time(const Schedule& schedule);

enum class ViolationKind {
  UnknownJob,
  EmptySegment,
  BeforeRelease,
  Overlap,
  SegmentWork,
  WorkMismatch,
  LateCompletion,
};

std::string_view to_string(ViolationKind k);

struct Violation {
  ViolationKind kind;
  JobId job = 0;
  std::size_t segment = 0;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  const Violation* first() const { return violations.empty() ? nullptr : &violations.front(); }
};

/// Structural check of a schedule against its instance: positive segment
/// lengths, no execution before release, no overlap, per-segment and per-job
/// work conservation to tolerance, and (when `require_due_dates`) every job
/// finishing by its due date. Violations are reported, never thrown.
/// `speed_cap_factor` integrates work under the cap factor * f_j(d_j), as
/// used by capped simulations.
ValidationReport validate_schedule(const Instance& instance, const Schedule& schedule, bool require_due_dates,
                                   const PrecisionContext& ctx,
                                   const std::optional<Real>& speed_cap_factor = std::nullopt);

/// Discretised search used as an independent optimality oracle (n <= 4).
///
/// The time axis is cut into `resolution` equal slices over
/// [min release, max due], refined further at every release and due date.
/// For every static priority order a right-to-left greedy hands whole slices
/// to the highest-priority eligible job; the slice in which a job finishes is
/// used only partially (its right part, found by bisection) and the rest of
/// that slice stays idle. Returns the least busy time over all orders, an
/// upper bound on the optimum that tightens as the grid is refined.
///
/// Throws ParameterError for n > 4 or resolution 0, InfeasibleError when no
/// order completes every job at this resolution.
Real brute_force_optimal(const Instance& instance, unsigned resolution, const PrecisionContext& ctx);

/// Feasibility for instances with exactly one nonlazy job whose interval
/// covers every other (lazy) job. The lazy jobs are packed by LRTB, which
/// minimises their busy time; the nonlazy job then needs
/// work / base <= idle time inside its interval.
/// Throws UnsupportedError when the instance has another shape.
FeasibilityVerdict check_nonlazy_fill(const Instance& instance, const PrecisionContext& ctx);

/// True when `check_nonlazy_fill` accepts the instance shape.
bool has_covering_nonlazy_job(const Instance& instance);

/// LRTB when every job is lazy, check_nonlazy_fill (schedule = its witness,
/// empty when infeasible) for the covering-filler shape. Throws
/// UnsupportedError for any other shape.
LrtbResult solve(const Instance& instance, const PrecisionContext& ctx);

}  // namespace procrastinate
