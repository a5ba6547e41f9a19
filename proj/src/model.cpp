#include "procrastinate/model.hpp"

#include <algorithm>
#include <set>

#include "procrastinate/errors.hpp"

namespace procrastinate {

Job Job::affine(JobId id, const Real& release, const Real& due, const Real& work, const Real& base,
                const Real& slope) {
  Job j;
  j.id = id;
  j.release = release;
  j.due = due;
  j.work = work;
  j.speed = SpeedFunction{base, slope, release};
  j.validate();
  return j;
}

Job Job::lazy(JobId id, const Real& release, const Real& due, const Real& work, const Real& slope) {
  return affine(id, release, due, work, Real(0L, release.bits()), slope);
}

Job Job::lazy(JobId id, const Real& release, const Real& due, const Real& work) {
  return lazy(id, release, due, work, Real(1L, release.bits()));
}

Job Job::nonlazy(JobId id, const Real& release, const Real& due, const Real& work, const Real& base) {
  return affine(id, release, due, work, base, Real(0L, release.bits()));
}

void Job::validate() const {
  const std::string who = "job " + std::to_string(id) + ": ";
  if (!release.is_finite() || !due.is_finite() || !work.is_finite())
    throw DomainError(who + "release, due and work must be finite");
  if (!(release < due)) throw DomainError(who + "release must be strictly before due date");
  if (work.sign() < 0) throw DomainError(who + "work must be non-negative");
  if (speed.base.sign() < 0 || speed.slope.sign() < 0) throw DomainError(who + "speed base and slope must be >= 0");
  if (speed.base.is_zero() && speed.slope.is_zero() && !work.is_zero())
    throw DomainError(who + "speed is identically zero but work is positive");
  if (!(speed.origin == release)) throw DomainError(who + "speed origin must equal the release time");
}

bool operator==(const Job& a, const Job& b) {
  return a.id == b.id && a.release == b.release && a.due == b.due && a.work == b.work &&
         a.speed.base == b.speed.base && a.speed.slope == b.speed.slope && a.speed.origin == b.speed.origin;
}

Instance::Instance(std::vector<Job> jobs, std::string name, std::string provenance)
    : jobs_(std::move(jobs)), name_(std::move(name)), provenance_(std::move(provenance)) {
  std::set<JobId> seen;
  for (const auto& j : jobs_) {
    j.validate();
    if (!seen.insert(j.id).second) throw DomainError("duplicate job id " + std::to_string(j.id));
  }
  std::stable_sort(jobs_.begin(), jobs_.end(), [](const Job& a, const Job& b) {
    if (a.release < b.release) return true;
    if (b.release < a.release) return false;
    return a.id < b.id;
  });
}

std::optional<std::size_t> Instance::index_of(JobId id) const {
  for (std::size_t i = 0; i < jobs_.size(); ++i)
    if (jobs_[i].id == id) return i;
  return std::nullopt;
}

const Job& Instance::by_id(JobId id) const {
  auto i = index_of(id);
  if (!i) throw DomainError("unknown job id " + std::to_string(id));
  return jobs_[*i];
}

Real Instance::min_release() const {
  if (jobs_.empty()) throw DomainError("empty instance");
  return jobs_.front().release;
}

Real Instance::max_due() const {
  if (jobs_.empty()) throw DomainError("empty instance");
  Real m = jobs_.front().due;
  for (const auto& j : jobs_) m = max(m, j.due);
  return m;
}

bool Instance::all_lazy() const {
  return std::all_of(jobs_.begin(), jobs_.end(), [](const Job& j) { return j.speed.lazy(); });
}

bool operator==(const Instance& a, const Instance& b) {
  return a.name_ == b.name_ && a.provenance_ == b.provenance_ && a.jobs_ == b.jobs_;
}

}  // namespace procrastinate
