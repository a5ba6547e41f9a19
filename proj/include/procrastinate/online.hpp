#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "procrastinate/core.hpp"
#include "procrastinate/model.hpp"
#include "procrastinate/precision.hpp"

namespace procrastinate {

enum class PolicyKind { FIFO, EDD, SRPT, LSSF, Thrashing };

std::string_view to_string(PolicyKind k);
/// Accepts the lower-case names used on the command line ("fifo", "lssf", ...).
std::optional<PolicyKind> parse_policy(std::string_view name);

struct PolicySpec {
  PolicyKind kind = PolicyKind::FIFO;
  /// Thrashing activation threshold on stretch-so-far.
  Real alpha = Real(2L, kDefaultBits);
  /// Caps job j's speed at factor * f_j(d_j).
  std::optional<Real> speed_cap_factor;

  /// Throws ParameterError unless alpha >= 1 and the cap factor is positive.
  void validate() const;
};

enum class EventKind { Release, Start, Preempt, Complete, IdleBegin, IdleEnd };

std::string_view to_string(EventKind k);
std::optional<EventKind> parse_event_kind(std::string_view name);

struct SimEvent {
  Real time;
  EventKind kind = EventKind::Release;
  JobId job = 0;  // 0 for idle events
};

struct JobOutcome {
  JobId id = 0;
  Real release;
  Real due;
  Real completion;
  Real stretch;
};

/// Result of a simulation run. Events are in nondecreasing time order; at a
/// shared timestamp completions come first, then releases, then the
/// preempt/start (or idle) transition.
struct SimTrace {
  std::vector<SimEvent> events;
  std::vector<JobOutcome> jobs;  // instance order
  std::vector<Segment> segments;
  Real busy_time;
};

/// Mutable simulator state, exposed so dispatch decisions can be probed at
/// arbitrary times.
struct SimState {
  const Instance* instance = nullptr;
  std::vector<Real> remaining;
  std::vector<bool> done;
  std::vector<SpeedCap> caps;
  std::optional<std::size_t> running;

  static SimState initial(const Instance& instance, const PolicySpec& policy);
};

Real stretch_so_far(const Job& job, const Real& t);

/// Index of the job the policy runs at time t, or nullopt for idle.
/// Candidates are unfinished jobs with release <= t. Ties (exact for FIFO,
/// EDD and Thrashing, within tolerance for SRPT and LSSF) go to the running
/// job, then the lowest id. LSSF ties are first broken toward the larger
/// stretch growth rate 1/(d - r), the job that leads just after t.
std::optional<std::size_t> next_dispatch(const PolicySpec& policy, const SimState& state, const Real& t,
                                         const PrecisionContext& ctx);

/// Time at which j's stretch-so-far catches up with i's, if strictly after
/// `now`; nullopt when the lines are parallel or the crossing is not ahead.
std::optional<Real> lssf_crossing(const Job& i, const Job& j, const Real& now);

Real thrashing_activation(const Job& job, const Real& alpha);

/// Runs the policy until every job completes. Throws ParameterError for an
/// invalid policy, DomainError for an empty instance, NeverCompletesError
/// when the policy would idle forever.
SimTrace simulate(const Instance& instance, const PolicySpec& policy, const PrecisionContext& ctx);

/// Throws DomainError when some job has no finite completion.
Real max_stretch(const SimTrace& trace);

/// Running time inside [r, d]; with `contained_only` only jobs whose whole
/// interval lies in [r, d] count.
Real busy_time_in_window(const SimTrace& trace, const Real& r, const Real& d, bool contained_only);

Schedule to_schedule(const SimTrace& trace);

}  // namespace procrastinate
