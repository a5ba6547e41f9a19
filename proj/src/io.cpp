#include "procrastinate/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "procrastinate/core.hpp"
#include "procrastinate/errors.hpp"

namespace procrastinate {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

namespace {

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

// Position of the first occurrence of a quoted value, for diagnostics on
// well-formed JSON with bad content.
[[noreturn]] void fail_at(std::string_view text, const std::string& needle, const std::string& message) {
  const auto pos = needle.empty() ? std::string_view::npos : text.find("\"" + needle + "\"");
  if (pos == std::string_view::npos) throw ParseError(message);
  auto [line, col] = line_col(text, pos);
  throw ParseError(message, line, col);
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError(std::string("malformed JSON: ") + e.what(), line, col);
  }
}

void check_version(std::string_view text, const json& doc) {
  if (!doc.is_object()) throw ParseError("top level must be a JSON object", 1, 1);
  if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer())
    fail_at(text, "schema_version", "missing integer schema_version");
  if (doc["schema_version"].get<int>() != kSchemaVersion)
    fail_at(text, "schema_version", "unsupported schema_version " + doc["schema_version"].dump());
}

const json& field(std::string_view text, const json& obj, const char* name) {
  if (!obj.is_object() || !obj.contains(name)) fail_at(text, "", std::string("missing field '") + name + "'");
  return obj[name];
}

Real decimal_field(std::string_view text, const json& obj, const char* name, unsigned bits,
                   const char* fallback = nullptr) {
  if (!obj.contains(name)) {
    if (fallback) return Real::parse(fallback, bits);
    fail_at(text, "", std::string("missing field '") + name + "'");
  }
  const json& v = obj[name];
  if (!v.is_string()) fail_at(text, name, std::string("field '") + name + "' must be a decimal string");
  const auto s = v.get<std::string>();
  try {
    return Real::parse(s, bits);
  } catch (const std::invalid_argument&) {
    fail_at(text, s, std::string("field '") + name + "' is not a decimal: " + s);
  }
}

JobId id_field(std::string_view text, const json& obj) {
  const json& v = field(text, obj, "id");
  if (!v.is_number_unsigned()) fail_at(text, "id", "job id must be a non-negative integer");
  return v.get<JobId>();
}

std::string dec(const Real& x) { return x.to_decimal(); }

}  // namespace

std::string instance_to_json(const Instance& instance) {
  ordered doc;
  doc["schema_version"] = kSchemaVersion;
  doc["name"] = instance.name();
  if (instance.provenance().empty()) {
    doc["provenance"] = nullptr;
  } else {
    try {
      doc["provenance"] = ordered::parse(instance.provenance());
    } catch (const json::parse_error&) {
      doc["provenance"] = instance.provenance();
    }
  }
  ordered jobs = ordered::array();
  for (const auto& j : instance.jobs()) {
    jobs.push_back({{"id", j.id},
                    {"release", dec(j.release)},
                    {"due", dec(j.due)},
                    {"work", dec(j.work)},
                    {"slope", dec(j.speed.slope)},
                    {"base", dec(j.speed.base)}});
  }
  doc["jobs"] = jobs;
  return doc.dump(2) + "\n";
}

Instance instance_from_json(std::string_view text, const PrecisionContext& ctx) {
  const json doc = parse_json(text);
  check_version(text, doc);
  const json& jobs = field(text, doc, "jobs");
  if (!jobs.is_array()) fail_at(text, "jobs", "'jobs' must be an array");
  std::vector<Job> out;
  for (const auto& jj : jobs) {
    const JobId id = id_field(text, jj);
    const Real r = decimal_field(text, jj, "release", ctx.bits);
    const Real d = decimal_field(text, jj, "due", ctx.bits);
    const Real w = decimal_field(text, jj, "work", ctx.bits);
    const Real slope = decimal_field(text, jj, "slope", ctx.bits, "1");
    const Real base = decimal_field(text, jj, "base", ctx.bits, "0");
    try {
      out.push_back(Job::affine(id, r, d, w, base, slope));
    } catch (const DomainError& e) {
      fail_at(text, "", e.what());
    }
  }
  std::string name = doc.contains("name") && doc["name"].is_string() ? doc["name"].get<std::string>() : "";
  std::string provenance;
  if (doc.contains("provenance") && doc["provenance"].is_string()) {
    provenance = doc["provenance"].get<std::string>();
  } else if (doc.contains("provenance") && !doc["provenance"].is_null()) {
    // reparse keeping the file's key order
    provenance = ordered::parse(text)["provenance"].dump();
  }
  try {
    return Instance(std::move(out), std::move(name), std::move(provenance));
  } catch (const DomainError& e) {
    fail_at(text, "", e.what());
  }
}

std::string schedule_to_json(const Instance& instance, const Schedule& schedule, const FeasibilityVerdict& verdict,
                             const PrecisionContext& ctx) {
  ordered doc;
  doc["schema_version"] = kSchemaVersion;
  doc["instance"] = instance.name();
  doc["precision_bits"] = ctx.bits;
  ordered v;
  v["status"] = std::string(to_string(verdict.status));
  v["margin"] = verdict.margin.is_inf() ? std::string("inf") : dec(verdict.margin);
  ordered deficits = ordered::array();
  for (const auto& d : verdict.deficits) deficits.push_back({{"job", d.job}, {"work", dec(d.work)}});
  v["deficits"] = deficits;
  doc["verdict"] = v;
  doc["direction"] = schedule.direction == ScheduleDirection::Forward ? "forward" : "backward-constructed";
  ordered segs = ordered::array();
  for (const auto& s : schedule.segments)
    segs.push_back({{"job", s.job}, {"start", dec(s.start)}, {"end", dec(s.end)}, {"work", dec(s.work_done)}});
  doc["segments"] = segs;
  doc["busy_time"] = dec(total_busy_time(schedule));
  return doc.dump(2) + "\n";
}

TraceSummary summarize_events(const std::vector<JobOutcome>& job_table, const std::vector<SimEvent>& events,
                              unsigned bits) {
  TraceSummary s;
  s.busy_time = Real(0L, bits);
  std::optional<std::size_t> open_start;  // index into events of the running Start
  std::vector<std::optional<Real>> completion(job_table.size());
  auto index = [&](JobId id) -> std::size_t {
    for (std::size_t i = 0; i < job_table.size(); ++i)
      if (job_table[i].id == id) return i;
    throw ParseError("event refers to unknown job " + std::to_string(id));
  };
  for (std::size_t k = 0; k < events.size(); ++k) {
    const auto& e = events[k];
    if (k > 0 && e.time < events[k - 1].time) throw ParseError("events are not in time order");
    switch (e.kind) {
      case EventKind::Start:
        if (open_start) throw ParseError("start while another job is running");
        index(e.job);
        open_start = k;
        break;
      case EventKind::Preempt:
      case EventKind::Complete:
        if (!open_start || events[*open_start].job != e.job) throw ParseError("stop event without a matching start");
        s.busy_time += e.time - events[*open_start].time;
        open_start.reset();
        if (e.kind == EventKind::Complete) {
          auto& c = completion[index(e.job)];
          if (c) throw ParseError("job " + std::to_string(e.job) + " completes twice");
          c = e.time;
        }
        break;
      default: break;
    }
  }
  for (std::size_t i = 0; i < job_table.size(); ++i) {
    const auto& row = job_table[i];
    if (!completion[i]) throw ParseError("job " + std::to_string(row.id) + " never completes");
    const Real st = (*completion[i] - row.release) / (row.due - row.release);
    s.jobs.push_back(JobOutcome{row.id, row.release, row.due, *completion[i], st});
    if (i == 0 || st > s.max_stretch) s.max_stretch = st;
    if (*completion[i] > row.due) s.missed.push_back(row.id);
  }
  return s;
}

std::string trace_to_json(const Instance& instance, const SimTrace& trace, const PolicySpec& policy,
                          const PrecisionContext& ctx) {
  ordered doc;
  doc["schema_version"] = kSchemaVersion;
  doc["run"] = {{"instance", instance.name()},
                {"policy", std::string(to_string(policy.kind))},
                {"alpha", dec(policy.alpha)},
                {"cap", policy.speed_cap_factor ? ordered(dec(*policy.speed_cap_factor)) : ordered(nullptr)},
                {"precision_bits", ctx.bits}};

  // the summary is derived from exactly what a reader will parse
  std::vector<JobOutcome> table;
  ordered jobs = ordered::array();
  for (const auto& j : instance.jobs()) {
    jobs.push_back({{"id", j.id}, {"release", dec(j.release)}, {"due", dec(j.due)}});
    table.push_back(JobOutcome{j.id, ctx.parse(dec(j.release)), ctx.parse(dec(j.due)), Real(), Real()});
  }
  doc["jobs"] = jobs;
  std::vector<SimEvent> parsed;
  ordered events = ordered::array();
  for (const auto& e : trace.events) {
    const std::string t = dec(e.time);
    events.push_back({{"time", t}, {"kind", std::string(to_string(e.kind))}, {"job", e.job}});
    parsed.push_back(SimEvent{ctx.parse(t), e.kind, e.job});
  }
  doc["events"] = events;

  const TraceSummary s = summarize_events(table, parsed, ctx.bits);
  ordered rows = ordered::array();
  for (const auto& o : s.jobs) rows.push_back({{"id", o.id}, {"completion", dec(o.completion)}, {"stretch", dec(o.stretch)}});
  doc["summary"] = {{"jobs", rows},
                    {"max_stretch", dec(s.max_stretch)},
                    {"busy_time", dec(s.busy_time)},
                    {"missed_due_dates", s.missed}};
  return doc.dump(2) + "\n";
}

TraceFile trace_from_json(std::string_view text, const PrecisionContext& ctx) {
  const json doc = parse_json(text);
  check_version(text, doc);
  TraceFile out;
  const json& run = field(text, doc, "run");
  out.instance_name = run.value("instance", "");
  const auto policy_name = field(text, run, "policy");
  if (!policy_name.is_string() || !parse_policy(policy_name.get<std::string>()))
    fail_at(text, "policy", "unknown policy");
  out.policy.kind = *parse_policy(policy_name.get<std::string>());
  out.policy.alpha = decimal_field(text, run, "alpha", ctx.bits, "2");
  if (run.contains("cap") && !run["cap"].is_null()) out.policy.speed_cap_factor = decimal_field(text, run, "cap", ctx.bits);
  out.precision_bits = run.value("precision_bits", ctx.bits);

  for (const auto& jj : field(text, doc, "jobs"))
    out.job_table.push_back(JobOutcome{id_field(text, jj), decimal_field(text, jj, "release", ctx.bits),
                                       decimal_field(text, jj, "due", ctx.bits), Real(), Real()});
  for (const auto& ev : field(text, doc, "events")) {
    const auto kind_name = field(text, ev, "kind");
    const auto kind = kind_name.is_string() ? parse_event_kind(kind_name.get<std::string>()) : std::nullopt;
    if (!kind) fail_at(text, kind_name.is_string() ? kind_name.get<std::string>() : "", "unknown event kind");
    const json& job = field(text, ev, "job");
    if (!job.is_number_unsigned()) fail_at(text, "job", "event job must be a non-negative integer");
    out.events.push_back(SimEvent{decimal_field(text, ev, "time", ctx.bits), *kind, job.get<JobId>()});
  }
  out.summary = summarize_events(out.job_table, out.events, ctx.bits);

  // stored summary must match the recomputation exactly
  const json& stored = field(text, doc, "summary");
  auto mismatch = [&](const std::string& what) { fail_at(text, "summary", "summary mismatch: " + what); };
  if (field(text, stored, "max_stretch") != dec(out.summary.max_stretch)) mismatch("max_stretch");
  if (field(text, stored, "busy_time") != dec(out.summary.busy_time)) mismatch("busy_time");
  const json& rows = field(text, stored, "jobs");
  if (!rows.is_array() || rows.size() != out.summary.jobs.size()) mismatch("job count");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& o = out.summary.jobs[i];
    if (rows[i].value("id", JobId{0}) != o.id || rows[i].value("completion", "") != dec(o.completion) ||
        rows[i].value("stretch", "") != dec(o.stretch))
      mismatch("job " + std::to_string(o.id));
  }
  if (field(text, stored, "missed_due_dates") != json(out.summary.missed)) mismatch("missed_due_dates");
  return out;
}

void write_plot_csv(const std::filesystem::path& dir, const SimTrace& trace) {
  std::filesystem::create_directories(dir);
  std::ostringstream stretch_csv, gantt_csv;
  stretch_csv << "job,release,due,completion,stretch\n";
  for (const auto& o : trace.jobs)
    stretch_csv << o.id << ',' << dec(o.release) << ',' << dec(o.due) << ',' << dec(o.completion) << ','
                << dec(o.stretch) << '\n';
  gantt_csv << "job,start,end\n";
  for (const auto& s : trace.segments) gantt_csv << s.job << ',' << dec(s.start) << ',' << dec(s.end) << '\n';
  write_file(dir / "stretch.csv", stretch_csv.str());
  write_file(dir / "gantt.csv", gantt_csv.str());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace procrastinate
