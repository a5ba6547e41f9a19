#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <tuple>

#include "procrastinate/core.hpp"
#include "procrastinate/errors.hpp"
#include "procrastinate/generators.hpp"
#include "procrastinate/io.hpp"
#include "procrastinate/offline.hpp"
#include "procrastinate/online.hpp"

namespace procrastinate::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Numeric {
  unsigned bits = kDefaultBits;
  std::string rel_tol;

  PrecisionContext context() const {
    if (bits < 24) throw UsageError("--precision must be at least 24 bits");
    if (rel_tol.empty()) return PrecisionContext::with_bits(bits);
    try {
      return PrecisionContext::with_bits(bits, Real::parse(rel_tol, bits));
    } catch (const std::invalid_argument&) {
      throw UsageError("--rel-tol is not a number: " + rel_tol);
    }
  }
};

void add_numeric(CLI::App* cmd, Numeric& n) {
  cmd->add_option("--precision", n.bits, "working precision in bits")->capture_default_str();
  cmd->add_option("--rel-tol", n.rel_tol, "relative tolerance (default 2^-(bits-16))");
}

Real parse_real(const std::string& text, const char* flag, unsigned bits) {
  try {
    return Real::parse(text, bits);
  } catch (const std::invalid_argument&) {
    throw UsageError(std::string(flag) + " is not a number: " + text);
  }
}

/// "1..5,9" -> 1 2 3 4 5 9; the empty string is the empty list.
std::vector<std::uint64_t> parse_list(const std::string& text, const char* flag) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  try {
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      const auto dots = item.find("..");
      if (dots == std::string::npos) {
        out.push_back(std::stoull(item));
      } else {
        const auto lo = std::stoull(item.substr(0, dots)), hi = std::stoull(item.substr(dots + 2));
        if (hi < lo) throw UsageError(std::string(flag) + ": empty range " + item);
        for (auto v = lo; v <= hi; ++v) out.push_back(v);
      }
    }
  } catch (const std::logic_error&) {
    throw UsageError(std::string(flag) + ": expected integers or ranges a..b, got '" + text + "'");
  }
  return out;
}

PolicySpec make_policy(const std::string& name, const std::string& alpha, const std::string& cap, unsigned bits) {
  const auto kind = parse_policy(name);
  if (!kind) throw UsageError("unknown policy '" + name + "' (fifo, edd, srpt, lssf, thrashing)");
  PolicySpec p;
  p.kind = *kind;
  p.alpha = parse_real(alpha, "--alpha", bits);
  if (!cap.empty()) p.speed_cap_factor = parse_real(cap, "--cap", bits);
  try {
    p.validate();
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
  return p;
}

Instance load_instance(const std::string& path, const PrecisionContext& ctx) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
  try {
    return instance_from_json(text, ctx);
  } catch (const ParseError& e) {
    std::ostringstream msg;
    msg << path << ':' << e.line() << ':' << e.column() << ": " << e.what();
    throw UsageError(msg.str());
  }
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") out << text;
  else write_file(path, text);
}

int exit_for(Feasibility f) {
  switch (f) {
    case Feasibility::Feasible: return kOk;
    case Feasibility::Infeasible: return kInfeasible;
    case Feasibility::Indeterminate: return kIndeterminate;
  }
  return kUsage;
}

void report_verdict(const FeasibilityVerdict& v, unsigned bits, std::ostream& out) {
  out << "status: " << to_string(v.status) << '\n';
  out << "margin: " << (v.margin.is_inf() ? std::string("inf") : v.margin.to_decimal(12)) << '\n';
  for (const auto& d : v.deficits) out << "deficit: job " << d.job << " short by " << d.work.to_decimal(12) << '\n';
  if (v.status == Feasibility::Indeterminate)
    out << "note: undecided at " << bits << " bits; retry with --precision " << 2 * bits << '\n';
}

// ---- solve ----------------------------------------------------------------

struct SolveArgs {
  std::string path, out;
  Numeric num;
};

int cmd_solve(const SolveArgs& a, std::ostream& out) {
  const auto ctx = a.num.context();
  const Instance inst = load_instance(a.path, ctx);
  LrtbResult res;
  try {
    res = solve(inst, ctx);
  } catch (const UnsupportedError& e) {
    throw UsageError(std::string("unsupported instance: ") + e.what());
  }
  const Schedule& schedule = res.schedule;
  const FeasibilityVerdict& verdict = res.verdict;
  report_verdict(verdict, ctx.bits, out);
  out << "busy_time: " << total_busy_time(schedule).to_decimal(12) << '\n';
  if (!a.out.empty()) write_file(a.out, schedule_to_json(inst, schedule, verdict, ctx));
  return exit_for(verdict.status);
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string path, policy, alpha = "2", cap, trace_out, plot_out;
  Numeric num;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const auto ctx = a.num.context();
  const PolicySpec policy = make_policy(a.policy, a.alpha, a.cap, ctx.bits);
  const Instance inst = load_instance(a.path, ctx);
  const SimTrace trace = simulate(inst, policy, ctx);
  const std::string text = trace_to_json(inst, trace, policy, ctx);
  const TraceFile check = trace_from_json(text, ctx);
  out << "policy: " << to_string(policy.kind) << '\n';
  out << "max_stretch: " << check.summary.max_stretch.to_decimal() << '\n';
  out << "busy_time: " << check.summary.busy_time.to_decimal() << '\n';
  out << "missed_due_dates: " << check.summary.missed.size() << '\n';
  if (!a.trace_out.empty()) write_file(a.trace_out, text);
  if (!a.plot_out.empty()) write_plot_csv(a.plot_out, trace);
  return kOk;
}

// ---- gen / reduce / check -------------------------------------------------

struct GenArgs {
  std::string kind, out, trace_out, xs, seeds, target, delta, policy = "fifo", alpha = "2", cap;
  std::optional<unsigned> n;
  std::optional<std::uint64_t> threshold, seed;
  unsigned rounds = 1;
  Numeric num;
};

SsrQuery make_query(const std::string& xs, const std::optional<std::uint64_t>& threshold) {
  if (xs.empty() || !threshold) throw UsageError("--xs and --threshold are required");
  SsrQuery q{parse_list(xs, "--xs"), *threshold};
  try {
    q.validate();
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
  return q;
}

unsigned need_n(const std::optional<unsigned>& n) {
  if (!n) throw UsageError("--n is required");
  return *n;
}

int cmd_gen(const GenArgs& a, std::ostream& out) {
  const auto ctx = a.num.context();
  try {
    if (a.kind == "lssf") {
      std::optional<Real> delta;
      if (!a.delta.empty()) delta = parse_real(a.delta, "--delta", ctx.bits);
      emit(a.out, instance_to_json(gen_lssf(need_n(a.n), ctx, delta)), out);
    } else if (a.kind == "srpt") {
      emit(a.out, instance_to_json(gen_srpt(need_n(a.n), ctx)), out);
    } else if (a.kind == "fifo" || a.kind == "edd") {
      if (a.target.empty()) throw UsageError("--target is required");
      const Real target = parse_real(a.target, "--target", ctx.bits);
      emit(a.out, instance_to_json(a.kind == "fifo" ? gen_fifo(target, ctx) : gen_edd(target, ctx)), out);
    } else if (a.kind == "reduction") {
      emit(a.out, instance_to_json(reduce_ssr(make_query(a.xs, a.threshold), ctx)), out);
    } else if (a.kind == "random") {
      const unsigned n = need_n(a.n);
      if (!a.seeds.empty() || !a.seed) {
        if (a.out.empty()) throw UsageError("random --seeds needs --out <directory>");
        const auto seeds = parse_list(a.seeds, "--seeds");
        nlohmann::ordered_json manifest = {{"schema_version", kSchemaVersion}, {"generator", "random"}, {"n", n}};
        auto files = nlohmann::ordered_json::array();
        for (auto s : seeds) {
          const std::string file = "random-" + std::to_string(n) + "-" + std::to_string(s) + ".json";
          write_file(fs::path(a.out) / file, instance_to_json(gen_random_feasible(n, s, ctx)));
          files.push_back({{"seed", s}, {"file", file}});
        }
        manifest["instances"] = files;
        fs::create_directories(a.out);
        write_file(fs::path(a.out) / "manifest.json", manifest.dump(2) + "\n");
      } else {
        emit(a.out, instance_to_json(gen_random_feasible(n, *a.seed, ctx)), out);
      }
    } else if (a.kind == "adversary") {
      const PolicySpec policy = make_policy(a.policy, a.alpha, a.cap, ctx.bits);
      const auto res = adaptive_adversary(policy, ctx, a.rounds);
      emit(a.out, instance_to_json(res.instance), out);
      if (!a.trace_out.empty()) write_file(a.trace_out, trace_to_json(res.instance, res.trace, policy, ctx));
      std::ostream& info = (a.out.empty() || a.out == "-") ? std::cerr : out;
      info << "missed: " << (res.missed ? "true" : "false") << '\n';
      info << "late_jobs:";
      for (auto id : res.late_jobs) info << ' ' << id;
      info << '\n';
    } else {
      throw UsageError("unknown generator '" + a.kind + "' (lssf, srpt, fifo, edd, reduction, random, adversary)");
    }
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
  return kOk;
}

int cmd_check(const GenArgs& a, std::ostream& out) {
  const auto ctx = a.num.context();
  const SsrQuery q = make_query(a.xs, a.threshold);
  const auto v = check_reduction(q, ctx);
  report_verdict(v, ctx.bits, out);
  return exit_for(v.status);
}

// ---- bench ----------------------------------------------------------------

struct BenchArgs {
  std::string suite, seeds = "1..100", sizes, out;
  unsigned jobs = 20;
  Numeric num;
};

struct Row {
  std::string suite, instance, policy;
  unsigned n = 0;
  std::uint64_t seed = 0;
  std::string max_stretch, busy_time, reference, ok;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  const auto ctx = a.num.context();
  if (a.jobs == 0) throw UsageError("--jobs must be positive");
  const Real tol = ctx.parse("1e-9");
  std::vector<Row> rows;
  auto run = [&](const std::string& suite, const Instance& inst, const PolicySpec& p, unsigned n, std::uint64_t seed,
                 const std::optional<Real>& reference, bool upper_bound) {
    const SimTrace tr = simulate(inst, p, ctx);
    const Real s = max_stretch(tr);
    Row r{suite, inst.name(), std::string(to_string(p.kind)) + (p.speed_cap_factor ? "-cap" : ""), n, seed,
          s.to_decimal(), tr.busy_time.to_decimal(), "", ""};
    if (reference) {
      r.reference = reference->to_decimal(20);
      const bool ok = upper_bound ? s <= *reference + tol : abs(s - *reference) <= *reference * ctx.parse("1e-6");
      r.ok = ok ? "true" : "false";
    }
    rows.push_back(std::move(r));
  };
  auto policy = [&](PolicyKind k, bool cap) {
    PolicySpec p;
    p.kind = k;
    if (cap) p.speed_cap_factor = ctx.make(2);
    return p;
  };

  if (a.suite == "thrashing" || a.suite == "policies") {
    for (auto seed : parse_list(a.seeds, "--seeds")) {
      const unsigned n = 1 + static_cast<unsigned>(seed % a.jobs);
      const Instance inst = gen_random_feasible(n, seed, ctx);
      if (a.suite == "thrashing") {
        for (bool cap : {false, true}) run(a.suite, inst, policy(PolicyKind::Thrashing, cap), n, seed, ctx.make(4), true);
      } else {
        for (auto k : {PolicyKind::FIFO, PolicyKind::EDD, PolicyKind::SRPT, PolicyKind::LSSF, PolicyKind::Thrashing})
          run(a.suite, inst, policy(k, false), n, seed, std::nullopt, false);
      }
    }
  } else if (a.suite == "lssf" || a.suite == "srpt") {
    const bool lssf = a.suite == "lssf";
    for (auto n64 : parse_list(a.sizes.empty() ? (lssf ? "3..50" : "2..64") : a.sizes, "--sizes")) {
      const auto n = static_cast<unsigned>(n64);
      if (lssf) run(a.suite, gen_lssf(n, ctx), policy(PolicyKind::LSSF, false), n, 0, sqrt(ctx.make(n - 1)), false);
      else run(a.suite, gen_srpt(n, ctx), policy(PolicyKind::SRPT, false), n, 0, sqrt(ctx.make(n + 1)) / 2, false);
    }
  } else {
    throw UsageError("unknown suite '" + a.suite + "' (thrashing, policies, lssf, srpt)");
  }

  std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
    return std::tie(x.suite, x.policy, x.n, x.seed, x.instance) < std::tie(y.suite, y.policy, y.n, y.seed, y.instance);
  });
  std::ostringstream csv;
  csv << "suite,instance,policy,n,seed,max_stretch,busy_time,reference,within_bound\n";
  for (const auto& r : rows)
    csv << r.suite << ',' << r.instance << ',' << r.policy << ',' << r.n << ',' << r.seed << ',' << r.max_stretch << ','
        << r.busy_time << ',' << r.reference << ',' << r.ok << '\n';
  emit(a.out, csv.str(), out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scheduling for procrastinators: offline LRTB, online policies and instance generators",
               "procrastinate"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "LRTB schedule and feasibility verdict (exit 0/1/2)");
  s->add_option("instance", solve.path, "instance JSON")->required();
  s->add_option("--out", solve.out, "schedule JSON output");
  add_numeric(s, solve.num);

  SimulateArgs sim;
  auto* m = app.add_subcommand("simulate", "run an online policy and write its trace");
  m->add_option("instance", sim.path, "instance JSON")->required();
  m->add_option("--policy", sim.policy, "fifo, edd, srpt, lssf or thrashing")->required();
  m->add_option("--alpha", sim.alpha, "thrashing activation stretch")->capture_default_str();
  m->add_option("--cap", sim.cap, "cap speed at this factor times f_j(d_j)");
  m->add_option("--trace-out", sim.trace_out, "trace JSON output");
  m->add_option("--plot-out", sim.plot_out, "directory for stretch.csv and gantt.csv");
  add_numeric(m, sim.num);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "generate an instance");
  g->add_option("kind", gen.kind, "lssf, srpt, fifo, edd, reduction, random or adversary")->required();
  g->add_option("--n", gen.n, "number of jobs");
  g->add_option("--target", gen.target, "stretch to reach (fifo, edd)");
  g->add_option("--xs", gen.xs, "comma-separated integers (reduction)");
  g->add_option("--threshold", gen.threshold, "integer threshold (reduction)");
  g->add_option("--seed", gen.seed, "random seed");
  g->add_option("--seeds", gen.seeds, "seed list or range a..b; writes a suite directory");
  g->add_option("--policy", gen.policy, "policy for the adversary")->capture_default_str();
  g->add_option("--alpha", gen.alpha, "thrashing activation stretch")->capture_default_str();
  g->add_option("--cap", gen.cap, "speed cap factor for the adversary's policy");
  g->add_option("--rounds", gen.rounds, "adversary rounds")->capture_default_str();
  g->add_option("--delta", gen.delta, "relative rounding for lssf (default 1e-12)");
  g->add_option("--out", gen.out, "output path (stdout when omitted)");
  g->add_option("--trace-out", gen.trace_out, "adversary trace output");
  add_numeric(g, gen.num);

  GenArgs red;
  auto* r = app.add_subcommand("reduce", "build the scheduling instance for a sum-of-square-roots query");
  r->add_option("--xs", red.xs, "comma-separated positive integers")->required();
  r->add_option("--threshold", red.threshold, "positive integer")->required();
  r->add_option("--out", red.out, "output path (stdout when omitted)");
  add_numeric(r, red.num);

  GenArgs chk;
  auto* c = app.add_subcommand("check", "decide a sum-of-square-roots query (exit 0/1/2)");
  c->add_option("--xs", chk.xs, "comma-separated positive integers")->required();
  c->add_option("--threshold", chk.threshold, "positive integer")->required();
  add_numeric(c, chk.num);

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "policy x generator grid as CSV");
  b->add_option("--suite", bench.suite, "thrashing, policies, lssf or srpt")->required();
  b->add_option("--seeds", bench.seeds, "seed list or range a..b (random suites)")->capture_default_str();
  b->add_option("--sizes", bench.sizes, "n list or range (lssf: 3..50, srpt: 2..64)");
  b->add_option("--jobs", bench.jobs, "random instances use 1 + seed % jobs jobs")->capture_default_str();
  b->add_option("--out", bench.out, "CSV output (stdout when omitted)");
  add_numeric(b, bench.num);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*s) return cmd_solve(solve, out);
    if (*m) return cmd_simulate(sim, out);
    if (*g) return cmd_gen(gen, out);
    if (*r) {
      red.kind = "reduction";
      return cmd_gen(red, out);
    }
    if (*c) return cmd_check(chk, out);
    if (*b) return cmd_bench(bench, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace procrastinate::cli
