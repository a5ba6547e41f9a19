#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "procrastinate/real.hpp"

namespace procrastinate {

using JobId = std::uint32_t;

/// Affine speed ramp anchored at the owning job's release time:
/// speed(t) = base + slope * (t - origin) for t >= origin.
struct SpeedFunction {
  Real base;
  Real slope;
  Real origin;

  bool lazy() const { return base.is_zero() && slope.sign() > 0; }
  bool nonlazy() const { return slope.is_zero() && base.sign() > 0; }
};

struct Job {
  JobId id = 0;
  Real release;
  Real due;
  Real work;
  SpeedFunction speed;

  /// f(t) = slope * (t - release).
  static Job lazy(JobId id, const Real& release, const Real& due, const Real& work, const Real& slope);
  static Job lazy(JobId id, const Real& release, const Real& due, const Real& work);
  /// Constant speed `base` over the whole interval.
  static Job nonlazy(JobId id, const Real& release, const Real& due, const Real& work, const Real& base);
  static Job affine(JobId id, const Real& release, const Real& due, const Real& work, const Real& base,
                    const Real& slope);

  Real length() const { return due - release; }
  bool lazy_or_empty() const { return speed.lazy() || work.is_zero(); }

  /// Throws DomainError when an invariant of the job model is broken.
  void validate() const;
};

/// Jobs kept sorted by (release, id). Ids are unique but need not be dense.
class Instance {
public:
  Instance() = default;
  explicit Instance(std::vector<Job> jobs, std::string name = {}, std::string provenance = {});

  const std::vector<Job>& jobs() const { return jobs_; }
  const Job& operator[](std::size_t i) const { return jobs_[i]; }
  std::size_t size() const { return jobs_.size(); }
  bool empty() const { return jobs_.empty(); }

  /// Position of the job with this id, if any.
  std::optional<std::size_t> index_of(JobId id) const;
  const Job& by_id(JobId id) const;

  Real min_release() const;
  Real max_due() const;
  bool all_lazy() const;

  const std::string& name() const { return name_; }
  const std::string& provenance() const { return provenance_; }
  void set_name(std::string name) { name_ = std::move(name); }
  void set_provenance(std::string provenance) { provenance_ = std::move(provenance); }

  friend bool operator==(const Instance& a, const Instance& b);

private:
  std::vector<Job> jobs_;
  std::string name_;
  std::string provenance_;
};

bool operator==(const Job& a, const Job& b);

struct Segment {
  JobId job = 0;
  Real start;
  Real end;
  Real work_done;

  Real duration() const { return end - start; }
};

enum class ScheduleDirection { Forward, BackwardConstructed };

/// Execution segments in increasing start time.
struct Schedule {
  std::vector<Segment> segments;
  ScheduleDirection direction = ScheduleDirection::Forward;
};

}  // namespace procrastinate
