#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "procrastinate/model.hpp"
#include "procrastinate/offline.hpp"
#include "procrastinate/online.hpp"
#include "procrastinate/precision.hpp"

namespace procrastinate {

/// Version written to and required from every JSON file.
inline constexpr int kSchemaVersion = 1;

/// Instance file:
///   {"schema_version": 1, "name": str, "provenance": object|str|null,
///    "jobs": [{"id": int, "release": dec, "due": dec, "work": dec,
///              "slope": dec, "base": dec}, ...]}
/// where dec is a decimal string. "slope" defaults to "1" and "base" to "0".
std::string instance_to_json(const Instance& instance);
/// Throws ParseError (with line and column for syntax errors).
Instance instance_from_json(std::string_view text, const PrecisionContext& ctx);

/// Schedule file: verdict, deficits, segments and busy time.
std::string schedule_to_json(const Instance& instance, const Schedule& schedule, const FeasibilityVerdict& verdict,
                             const PrecisionContext& ctx);

struct TraceSummary {
  std::vector<JobOutcome> jobs;
  Real max_stretch;
  Real busy_time;
  std::vector<JobId> missed;  // completed after their due date
};

struct TraceFile {
  std::string instance_name;
  PolicySpec policy;
  unsigned precision_bits = kDefaultBits;
  std::vector<JobOutcome> job_table;  // id, release, due
  std::vector<SimEvent> events;
  TraceSummary summary;
};

/// Recomputes completions, stretches, max stretch, busy time and missed due
/// dates from event rows and the job table alone. Throws ParseError when a
/// job lacks a Complete event or the run structure is broken.
TraceSummary summarize_events(const std::vector<JobOutcome>& job_table, const std::vector<SimEvent>& events,
                              unsigned bits);

/// Trace file:
///   {"schema_version": 1,
///    "run": {"instance", "policy", "alpha", "cap", "precision_bits"},
///    "jobs": [{"id", "release", "due"}], "events": [{"time", "kind", "job"}],
///    "summary": {"jobs": [{"id", "completion", "stretch"}], "max_stretch",
///                "busy_time", "missed_due_dates": [id]}}
/// The summary is computed from the serialized event times, so loading
/// reproduces it exactly.
std::string trace_to_json(const Instance& instance, const SimTrace& trace, const PolicySpec& policy,
                          const PrecisionContext& ctx);
/// Parses and checks that the stored summary matches summarize_events.
/// Throws ParseError on any mismatch.
TraceFile trace_from_json(std::string_view text, const PrecisionContext& ctx);

/// Writes stretch.csv (job,release,due,completion,stretch) and gantt.csv
/// (job,start,end) into `dir`, creating it if needed.
void write_plot_csv(const std::filesystem::path& dir, const SimTrace& trace);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view text);

}  // namespace procrastinate
