#include "doctest.h"

#include <json.hpp>

#include <filesystem>
#include <random>
#include <sstream>

#include <unistd.h>

#include "cli.hpp"
#include "oracles.hpp"
#include "procrastinate/errors.hpp"
#include "procrastinate/generators.hpp"
#include "procrastinate/io.hpp"

using namespace procrastinate;
namespace fs = std::filesystem;

namespace {

const unsigned B = kDefaultBits;
const PrecisionContext ctx = PrecisionContext::with_bits(B);
template <std::integral I>
Real R(I v) { return Real(v, B); }
Real R(const char* s) { return Real::parse(s, B); }

PolicySpec policy(PolicyKind k) {
  PolicySpec p;
  p.kind = k;
  return p;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("procrastinate-test-" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct Run {
  int code;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string path_of(const fs::path& p) { return p.string(); }

}  // namespace

TEST_CASE("instance files round-trip byte for byte") {
  std::vector<Instance> cases = {
      gen_lssf(6, ctx), gen_srpt(8, ctx), reduce_ssr(SsrQuery{{2, 3, 5}, 4}, ctx),
      Instance({Job::affine(3, R("0.5"), R("2.25"), R("1.125"), R("0.25"), R(3))}, "affine"),
  };
  for (std::uint64_t seed = 1; seed <= 20; ++seed) cases.push_back(gen_random_feasible(1 + seed % 7, seed, ctx));
  for (const auto& inst : cases) {
    const std::string text = instance_to_json(inst);
    const Instance back = instance_from_json(text, ctx);
    CHECK(back == inst);
    CHECK(instance_to_json(back) == text);
  }
}

TEST_CASE("instance parse errors carry line and column") {
  SUBCASE("syntax") {
    try {
      instance_from_json("{\n  \"schema_version\": 1,\n  \"jobs\": [ ,\n}", ctx);
      FAIL("no throw");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
      CHECK(e.column() >= 11);
    }
  }
  SUBCASE("bad decimal points at the value") {
    const std::string text =
        "{\n\"schema_version\": 1,\n\"name\": \"x\",\n\"jobs\": [\n"
        "  {\"id\": 1, \"release\": \"0\", \"due\": \"two\", \"work\": \"1\"}\n]}\n";
    try {
      instance_from_json(text, ctx);
      FAIL("no throw");
    } catch (const ParseError& e) {
      CHECK(e.line() == 5);
      CHECK(e.column() == 36);  // opening quote of "two"
    }
  }
  SUBCASE("wrong schema version") {
    CHECK_THROWS_AS(instance_from_json("{\"schema_version\": 2, \"jobs\": []}", ctx), ParseError);
  }
  SUBCASE("defaults for slope and base") {
    const Instance inst = instance_from_json(
        "{\"schema_version\": 1, \"jobs\": [{\"id\": 4, \"release\": \"1\", \"due\": \"3\", \"work\": \"2\"}]}", ctx);
    CHECK(inst.jobs()[0] == Job::lazy(4, R(1), R(3), R(2)));
  }
}

TEST_CASE("trace files are self-consistent") {
  oracle::Rng rng(77);
  std::vector<std::pair<Instance, PolicySpec>> runs = {{gen_lssf(10, ctx), policy(PolicyKind::LSSF)},
                                                       {gen_srpt(16, ctx), policy(PolicyKind::SRPT)}};
  for (int i = 0; i < 30; ++i) {
    PolicySpec p = policy(static_cast<PolicyKind>(i % 5));
    if (i % 7 == 0 && p.kind == PolicyKind::Thrashing) p.speed_cap_factor = R(2);
    runs.emplace_back(oracle::random_feasible(rng, 1 + i % 8, 0.6), p);
  }
  for (const auto& [inst, p] : runs) {
    const SimTrace tr = simulate(inst, p, ctx);
    const std::string text = trace_to_json(inst, tr, p, ctx);
    const TraceFile f = trace_from_json(text, ctx);
    CHECK(f.policy.kind == p.kind);
    CHECK(f.precision_bits == B);
    CHECK(f.events.size() == tr.events.size());
    CHECK(abs(f.summary.max_stretch - max_stretch(tr)) <= R("1e-30"));
    CHECK(abs(f.summary.busy_time - tr.busy_time) <= R("1e-30"));
    const TraceSummary again = summarize_events(f.job_table, f.events, B);
    CHECK(again.max_stretch == f.summary.max_stretch);
    CHECK(again.busy_time == f.summary.busy_time);
  }
}

TEST_CASE("tampered trace summaries are rejected") {
  const Instance inst = gen_lssf(5, ctx);
  const PolicySpec p = policy(PolicyKind::LSSF);
  auto doc = nlohmann::ordered_json::parse(trace_to_json(inst, simulate(inst, p, ctx), p, ctx));
  SUBCASE("max stretch") { doc["summary"]["max_stretch"] = "2.5"; }
  SUBCASE("busy time") { doc["summary"]["busy_time"] = "0"; }
  SUBCASE("missed list") { doc["summary"]["missed_due_dates"] = nlohmann::ordered_json::array(); }
  SUBCASE("event time") { doc["events"][doc["events"].size() - 1]["time"] = "100"; }
  CHECK_THROWS_AS(trace_from_json(doc.dump(2), ctx), ParseError);
}

TEST_CASE("plot csv columns") {
  const auto dir = scratch("plot");
  const Instance inst = gen_srpt(4, ctx);
  write_plot_csv(dir, simulate(inst, policy(PolicyKind::SRPT), ctx));
  const std::string stretch = read_file(dir / "stretch.csv");
  const std::string gantt = read_file(dir / "gantt.csv");
  CHECK(stretch.rfind("job,release,due,completion,stretch\n", 0) == 0);
  CHECK(gantt.rfind("job,start,end\n", 0) == 0);
  CHECK(std::count(stretch.begin(), stretch.end(), '\n') == 5);
}

TEST_CASE("solve exit codes") {
  const auto dir = scratch("solve");
  SUBCASE("single no-slack job is feasible with one segment") {
    write_file(dir / "one.json", instance_to_json(Instance({Job::lazy(1, R(0), R(2), R(2))})));
    const auto r = invoke({"solve", path_of(dir / "one.json"), "--out", path_of(dir / "s.json")});
    CHECK(r.code == cli::kOk);
    const auto doc = nlohmann::json::parse(read_file(dir / "s.json"));
    CHECK(doc["segments"].size() == 1);
    CHECK(doc["verdict"]["status"] == "feasible");
  }
  SUBCASE("reduction below threshold is infeasible") {
    // sqrt 2 + sqrt 3 = 3.146... < 4
    const SsrQuery q{{2, 3}, 4};
    REQUIRE(check_reduction(q, ctx).status == Feasibility::Infeasible);
    CHECK(invoke({"gen", "reduction", "--xs", "2,3", "--threshold", "4", "--out", path_of(dir / "r.json")}).code == 0);
    CHECK(invoke({"solve", path_of(dir / "r.json")}).code == cli::kInfeasible);
  }
  SUBCASE("near tie at low precision is indeterminate") {
    write_file(dir / "tie.json", instance_to_json(Instance({Job::lazy(1, R(0), R(2), R("2.001"))})));
    const auto low = invoke({"solve", path_of(dir / "tie.json"), "--precision", "24"});
    CHECK(low.code == cli::kIndeterminate);
    CHECK(low.out.find("--precision 48") != std::string::npos);
    CHECK(invoke({"solve", path_of(dir / "tie.json")}).code == cli::kInfeasible);
  }
  SUBCASE("parse errors report path, line and column") {
    write_file(dir / "bad.json", "{\n  \"schema_version\": 1,\n  \"jobs\": [}\n");
    const auto r = invoke({"solve", path_of(dir / "bad.json")});
    CHECK(r.code == cli::kUsage);
    CHECK(r.err.find(path_of(dir / "bad.json") + ":3:") != std::string::npos);
  }
  SUBCASE("missing file") { CHECK(invoke({"solve", path_of(dir / "nope.json")}).code == cli::kUsage); }
  SUBCASE("nonlazy jobs without a covering filler are unsupported") {
    write_file(dir / "nl.json", instance_to_json(Instance({Job::nonlazy(1, R(0), R(1), R(1), R(1)),
                                                           Job::lazy(2, R(2), R(3), R(1))})));
    CHECK(invoke({"solve", path_of(dir / "nl.json")}).code == cli::kUsage);
  }
}

TEST_CASE("simulate") {
  const auto dir = scratch("simulate");
  write_file(dir / "lssf.json", instance_to_json(gen_lssf(10, ctx)));
  SUBCASE("lssf on the lssf family reaches stretch 3") {
    const auto r = invoke({"simulate", path_of(dir / "lssf.json"), "--policy", "lssf", "--trace-out",
                        path_of(dir / "t.json"), "--plot-out", path_of(dir / "plot")});
    CHECK(r.code == 0);
    const TraceFile f = trace_from_json(read_file(dir / "t.json"), ctx);
    CHECK(abs(f.summary.max_stretch - R(3)) <= R("3e-6"));
    CHECK(fs::exists(dir / "plot" / "gantt.csv"));
  }
  SUBCASE("thrashing with and without cap stays within 4") {
    write_file(dir / "rnd.json", instance_to_json(gen_random_feasible(12, 5, ctx)));
    for (std::vector<std::string> extra : {std::vector<std::string>{}, std::vector<std::string>{"--cap", "2"}}) {
      std::vector<std::string> args = {"simulate", path_of(dir / "rnd.json"), "--policy", "thrashing", "--trace-out",
                                       path_of(dir / "t.json")};
      args.insert(args.end(), extra.begin(), extra.end());
      REQUIRE(invoke(args).code == 0);
      CHECK(trace_from_json(read_file(dir / "t.json"), ctx).summary.max_stretch <= R(4));
    }
  }
  SUBCASE("unknown policy") { CHECK(invoke({"simulate", path_of(dir / "lssf.json"), "--policy", "lifo"}).code == 64); }
  SUBCASE("bad alpha") {
    CHECK(invoke({"simulate", path_of(dir / "lssf.json"), "--policy", "thrashing", "--alpha", "0.5"}).code == 64);
  }
  SUBCASE("unknown flag") { CHECK(invoke({"simulate", path_of(dir / "lssf.json"), "--speed", "1"}).code == 64); }
}

TEST_CASE("gen") {
  const auto dir = scratch("gen");
  SUBCASE("lssf n=3 has stretch sqrt 2") {
    const auto r = invoke({"gen", "lssf", "--n", "3"});
    REQUIRE(r.code == 0);
    const Instance inst = instance_from_json(r.out, ctx);
    CHECK(abs(max_stretch(simulate(inst, policy(PolicyKind::LSSF), ctx)) - sqrt(R(2))) <= R("1e-9"));
  }
  SUBCASE("reduction 2,3 over 3 is feasible") {
    const auto r = invoke({"gen", "reduction", "--xs", "2,3", "--threshold", "3", "--out", path_of(dir / "r.json")});
    REQUIRE(r.code == 0);
    const Instance inst = instance_from_json(read_file(dir / "r.json"), ctx);
    CHECK(check_nonlazy_fill(inst, ctx).status == Feasibility::Feasible);
    CHECK(invoke({"solve", path_of(dir / "r.json")}).code == cli::kOk);
    CHECK(invoke({"check", "--xs", "2,3", "--threshold", "3"}).code == cli::kOk);
    CHECK(invoke({"reduce", "--xs", "2,3", "--threshold", "3"}).out == instance_to_json(inst));
  }
  SUBCASE("adversary against edd misses") {
    const auto r = invoke({"gen", "adversary", "--policy", "edd", "--out", path_of(dir / "a.json"), "--trace-out",
                        path_of(dir / "at.json")});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("missed: true") != std::string::npos);
    const Instance inst = instance_from_json(read_file(dir / "a.json"), ctx);
    CHECK(lrtb(inst, ctx).verdict.status == Feasibility::Feasible);
    CHECK_FALSE(trace_from_json(read_file(dir / "at.json"), ctx).summary.missed.empty());
  }
  SUBCASE("random suite directory with manifest") {
    REQUIRE(invoke({"gen", "random", "--n", "4", "--seeds", "3..5", "--out", path_of(dir / "suite")}).code == 0);
    const auto manifest = nlohmann::json::parse(read_file(dir / "suite" / "manifest.json"));
    REQUIRE(manifest["instances"].size() == 3);
    for (const auto& e : manifest["instances"]) {
      const Instance inst = instance_from_json(read_file(dir / "suite" / e["file"].get<std::string>()), ctx);
      CHECK(inst == gen_random_feasible(4, e["seed"].get<std::uint64_t>(), ctx));
    }
  }
  SUBCASE("fifo target") {
    const auto r = invoke({"gen", "fifo", "--target", "10"});
    REQUIRE(r.code == 0);
    const Instance inst = instance_from_json(r.out, ctx);
    CHECK(max_stretch(simulate(inst, policy(PolicyKind::FIFO), ctx)) >= R(10));
  }
  SUBCASE("invalid parameters") {
    CHECK(invoke({"gen", "lssf", "--n", "1"}).code == 64);
    CHECK(invoke({"gen", "lssf"}).code == 64);
    CHECK(invoke({"gen", "fifo", "--target", "0.5"}).code == 64);
    CHECK(invoke({"gen", "reduction", "--xs", "2,x", "--threshold", "3"}).code == 64);
    CHECK(invoke({"gen", "reduction", "--xs", "0", "--threshold", "3"}).code == 64);
    CHECK(invoke({"gen", "adversary", "--policy", "nope"}).code == 64);
    CHECK(invoke({"gen", "triangle"}).code == 64);
    CHECK(invoke({"solve", "x.json", "--precision", "8"}).code == 64);
  }
}

TEST_CASE("check exit codes") {
  CHECK(invoke({"check", "--xs", "1,4,9", "--threshold", "6"}).code == cli::kOk);
  CHECK(invoke({"check", "--xs", "1,4,9", "--threshold", "7"}).code == cli::kInfeasible);
  const auto low = invoke({"check", "--xs", "1000001,1000001", "--threshold", "2001", "--precision", "24"});
  CHECK(low.code == cli::kIndeterminate);
  CHECK(low.out.find("--precision 48") != std::string::npos);
}

TEST_CASE("bench") {
  SUBCASE("empty seed list is a header only") {
    const auto r = invoke({"bench", "--suite", "thrashing", "--seeds", ""});
    CHECK(r.code == 0);
    CHECK(r.out == "suite,instance,policy,n,seed,max_stretch,busy_time,reference,within_bound\n");
  }
  SUBCASE("thrashing rows are within bound and deterministic") {
    const auto a = invoke({"bench", "--suite", "thrashing", "--seeds", "1..15"});
    const auto b = invoke({"bench", "--suite", "thrashing", "--seeds", "15,1..14"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 31);
    CHECK(a.out.find(",false\n") == std::string::npos);
  }
  SUBCASE("lssf rows match sqrt(n-1)") {
    const auto r = invoke({"bench", "--suite", "lssf", "--sizes", "3..12"});
    CHECK(r.code == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 11);
    CHECK(r.out.find(",false\n") == std::string::npos);
  }
  SUBCASE("policies grid") {
    const auto r = invoke({"bench", "--suite", "policies", "--seeds", "1..3"});
    CHECK(r.code == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 16);
  }
  SUBCASE("help") { CHECK(invoke({"--help"}).code == 0); }
}
