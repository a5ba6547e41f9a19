// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "procrastinate/core.hpp"
#include "procrastinate/errors.hpp"
#include "procrastinate/generators.hpp"
#include "procrastinate/offline.hpp"
#include "procrastinate/online.hpp"

using namespace procrastinate;

namespace {

const unsigned B = kDefaultBits;
const PrecisionContext ctx = PrecisionContext::with_bits(B);
template <std::integral I>
Real R(I v) { return Real(v, B); }
Real R(const char* s) { return Real::parse(s, B); }

struct Outcome {
  bool pass = true;
  std::string detail;
};

/// Records the first failure and counts checks.
class Tally {
public:
  void check(bool ok, const std::string& what) {
    ++checks_;
    if (!ok && first_failure_.empty()) first_failure_ = what;
    if (!ok) ++failures_;
  }
  Outcome outcome(const std::string& summary) const {
    std::ostringstream s;
    s << summary << "; " << checks_ << " checks";
    if (failures_) s << ", " << failures_ << " failed, first: " << first_failure_;
    return {failures_ == 0, s.str()};
  }

private:
  long checks_ = 0, failures_ = 0;
  std::string first_failure_;
};

PolicySpec policy(PolicyKind k) {
  PolicySpec p;
  p.kind = k;
  return p;
}

Real rel_err(const Real& got, const Real& want) { return abs(got - want) / abs(want); }

std::string dec(const Real& x, int digits = 6) { return x.to_decimal(digits); }

// ---------------------------------------------------------------------------

Outcome lssf_lower_bound() {
  Tally t;
  Real worst = R(0);
  for (unsigned n : {3u, 5u, 10u, 25u, 50u}) {
    const Real s = max_stretch(simulate(gen_lssf(n, ctx), policy(PolicyKind::LSSF), ctx));
    const Real err = rel_err(s, sqrt(R(n - 1)));
    worst = max(worst, err);
    t.check(err <= R("1e-6"), "n=" + std::to_string(n) + " stretch " + dec(s, 12));
  }
  return t.outcome("max relative error " + dec(worst, 3));
}

Outcome srpt_lower_bound() {
  Tally t;
  const Real tol = R("1e-9");
  for (unsigned n : {4u, 16u, 64u, 256u}) {
    const Instance inst = gen_srpt(n, ctx);
    const SimTrace tr = simulate(inst, policy(PolicyKind::SRPT), ctx);
    // Identical small jobs finish in id order: job k + 1 at sqrt(k).
    for (const auto& o : tr.jobs) {
      if (o.id == 1) {
        t.check(abs(o.stretch - sqrt(R(n + 1)) / 2) <= tol, "n=" + std::to_string(n) + " job 1 stretch");
      } else {
        t.check(abs(o.completion - sqrt(R(o.id - 1))) <= tol,
                "n=" + std::to_string(n) + " job " + std::to_string(o.id) + " completion " + dec(o.completion));
      }
    }
  }
  return t.outcome("n in {4,16,64,256}");
}

// Criteria 3 and 4 share one corpus; the window check is recorded while
// criterion 3 runs.
Tally window_tally;
Real window_min_slack;

Outcome thrashing_bound() {
  Tally t;
  const Real eps = R("1e-9");
  Real worst[2] = {R(0), R(0)};
  window_min_slack = Real::infinity(B);
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    const unsigned n = 1 + static_cast<unsigned>(seed % 20);
    const Instance inst = gen_random_feasible(n, seed, ctx);
    for (int capped = 0; capped < 2; ++capped) {
      PolicySpec p = policy(PolicyKind::Thrashing);
      if (capped) p.speed_cap_factor = R(2);
      const SimTrace tr = simulate(inst, p, ctx);
      const Real s = max_stretch(tr);
      worst[capped] = max(worst[capped], s);
      t.check(s <= R(4) + eps, "seed " + std::to_string(seed) + (capped ? " capped" : "") + " stretch " + dec(s));
      if (!capped) {
        const Real lo = inst.min_release(), hi = inst.max_due();
        const Real slack = (hi - lo) / 2 - busy_time_in_window(tr, lo, hi, true);
        window_min_slack = min(window_min_slack, slack);
        window_tally.check(slack >= -eps, "seed " + std::to_string(seed) + " window busy time");
      }
    }
  }
  return t.outcome("1000 instances, max stretch " + dec(worst[0]) + " uncapped, " + dec(worst[1]) + " capped");
}

Outcome window_bound() {
  return window_tally.outcome("min of (d-r)/2 - busy time " + dec(window_min_slack) + ", measured during [3]");
}

Outcome lrtb_optimality() {
  Tally t;
  int used = 0;
  std::uint64_t seed = 0;
  Real largest_gap = R(0);
  int coarse = 0;
  while (used < 200) {
    ++seed;
    const Instance inst = gen_random_feasible(1 + static_cast<unsigned>(seed % 3), seed, ctx);
    bool distinct = true;
    for (std::size_t i = 1; i < inst.size(); ++i) distinct = distinct && !(inst[i].release == inst[i - 1].release);
    if (!distinct) continue;
    ++used;
    const Real opt = total_busy_time(lrtb(inst, ctx).schedule);
    // A grid too coarse to fit the work has no schedule; its optimum is +inf.
    Real prev_gap = Real::infinity(B);
    for (unsigned k = 6; k <= 10; ++k) {
      const std::string where = "seed " + std::to_string(seed) + " at 2^" + std::to_string(k);
      Real gap = Real::infinity(B);
      try {
        gap = brute_force_optimal(inst, 1u << k, ctx) - opt;
      } catch (const InfeasibleError&) {
        ++coarse;
      }
      if (gap.is_inf()) {
        t.check(prev_gap.is_inf(), where + ": grid lost feasibility");
        t.check(k < 10, where + ": no grid schedule at the finest resolution");
        continue;
      }
      largest_gap = max(largest_gap, gap);
      t.check(gap >= -ctx.tolerance(gap + opt, opt), where + ": brute force below LRTB");
      t.check(prev_gap.is_inf() || gap <= prev_gap + ctx.tolerance(gap, prev_gap), where + ": gap grew");
      prev_gap = gap;
    }
  }
  return t.outcome(std::to_string(used) + " instances from " + std::to_string(seed) + " seeds, largest gap " +
                   dec(largest_gap, 3) + ", " + std::to_string(coarse) + " coarse grids without a schedule");
}

Outcome equal_release_exchange() {
  Tally t;
  oracle::Rng rng(606);
  int built = 0, permutations = 0;
  Real worst = R(0);
  while (built < 100) {
    // Two or three release groups of two or three jobs each.
    const int groups = 2 + static_cast<int>(rng.below(2));
    std::vector<Job> jobs;
    std::vector<std::vector<std::size_t>> members(groups);
    for (int g = 0; g < groups; ++g) {
      const Real r(std::round(rng.uniform(0, 4) * 100) / 100, B);
      const int size = 2 + static_cast<int>(rng.below(2));
      for (int k = 0; k < size; ++k) {
        const Real len(std::round(rng.uniform(0.5, 4) * 100) / 100, B);
        const Real w = len * len / 2 * Real(rng.uniform(0.02, 0.3), B);
        members[g].push_back(jobs.size());
        jobs.push_back(Job::lazy(static_cast<JobId>(jobs.size() + 1), r, r + len, w));
      }
    }
    if (lrtb(Instance(jobs), ctx).verdict.status != Feasibility::Feasible) continue;
    ++built;
    const Real base = total_busy_time(lrtb(Instance(jobs), ctx).schedule);
    // Every permutation of ids within each group.
    std::vector<std::vector<JobId>> ids(groups);
    for (int g = 0; g < groups; ++g)
      for (auto m : members[g]) ids[g].push_back(jobs[m].id);
    std::function<void(int)> walk = [&](int g) {
      if (g == groups) {
        std::vector<Job> permuted = jobs;
        for (int h = 0; h < groups; ++h)
          for (std::size_t k = 0; k < members[h].size(); ++k) permuted[members[h][k]].id = ids[h][k];
        const auto res = lrtb(Instance(permuted), ctx);
        ++permutations;
        const Real diff = abs(total_busy_time(res.schedule) - base);
        worst = max(worst, diff);
        t.check(res.verdict.status == Feasibility::Feasible && diff <= R("1e-12"),
                "instance " + std::to_string(built) + " busy time moved by " + dec(diff, 3));
        return;
      }
      std::sort(ids[g].begin(), ids[g].end());
      do walk(g + 1);
      while (std::next_permutation(ids[g].begin(), ids[g].end()));
    };
    walk(0);
  }
  return t.outcome("100 instances, " + std::to_string(permutations) + " permutations, max change " + dec(worst, 3));
}

Outcome ssr_reduction() {
  Tally t;
  oracle::Rng rng(2718);
  std::map<std::string, int> verdicts;
  auto expected = [](int sign) { return sign >= 0 ? Feasibility::Feasible : Feasibility::Infeasible; };
  for (int q = 0; q < 100; ++q) {
    SsrQuery query;
    const auto n = 1 + rng.below(10);
    for (std::uint64_t i = 0; i < n; ++i) query.xs.push_back(1 + rng.below(1000));
    double sum = 0;
    for (auto x : query.xs) sum += std::sqrt(static_cast<double>(x));
    // Thresholds straddle the sum so both answers occur.
    const auto base = static_cast<std::int64_t>(std::floor(sum));
    query.threshold = static_cast<std::uint64_t>(std::max<std::int64_t>(1, base + static_cast<std::int64_t>(rng.below(3)) - 1 + (q % 2)));
    const Feasibility want = expected(oracle::ssr_sign(query.xs, query.threshold, 4 * B));
    const Feasibility got = check_reduction(query, ctx).status;
    const Feasibility fill = check_nonlazy_fill(reduce_ssr(query, ctx), ctx).status;
    ++verdicts[std::string(to_string(got))];
    t.check(got == want, "query " + std::to_string(q) + " verdict " + std::string(to_string(got)));
    t.check(fill == want, "query " + std::to_string(q) + " reduced instance " + std::string(to_string(fill)));
  }
  const SsrQuery square{{1, 4, 9}, 6};
  t.check(check_reduction(square, ctx).status == Feasibility::Feasible, "[1,4,9] over 6");
  t.check(check_reduction(SsrQuery{{1, 4, 9}, 7}, ctx).status == Feasibility::Infeasible, "[1,4,9] over 7");
  std::ostringstream s;
  s << "100 queries:";
  for (const auto& [k, v] : verdicts) s << ' ' << k << '=' << v;
  return t.outcome(s.str());
}

Outcome adversary() {
  Tally t;
  std::string cases;
  for (auto k : {PolicyKind::FIFO, PolicyKind::EDD, PolicyKind::SRPT, PolicyKind::LSSF, PolicyKind::Thrashing}) {
    const auto res = adaptive_adversary(policy(k), ctx);
    const std::string name(to_string(k));
    t.check(res.missed && !res.late_jobs.empty(), name + " met every due date");
    t.check(lrtb(res.instance, ctx).verdict.status == Feasibility::Feasible, name + " instance not LRTB-feasible");
    // The trace itself must show the miss.
    bool late = false;
    for (const auto& o : res.trace.jobs) late = late || o.completion > o.due;
    t.check(late, name + " trace shows no late job");
    cases += (cases.empty() ? "" : ", ") + name + ":" +
             (res.cases.front() == AdversaryCase::WaitedOnJob2 ? "waited" : "ran");
  }
  return t.outcome(cases);
}

Outcome fifo_edd_unbounded() {
  Tally t;
  std::string detail;
  for (const char* k : {"10", "100", "1000"}) {
    const Real target = R(k);
    for (auto kind : {PolicyKind::FIFO, PolicyKind::EDD}) {
      const Instance inst = kind == PolicyKind::FIFO ? gen_fifo(target, ctx) : gen_edd(target, ctx);
      const Real s = max_stretch(simulate(inst, policy(kind), ctx));
      const std::string name = std::string(to_string(kind)) + " K=" + k;
      t.check(lrtb(inst, ctx).verdict.status == Feasibility::Feasible, name + " not LRTB-feasible");
      t.check(s >= target, name + " stretch " + dec(s));
      if (std::string(k) == "1000") detail += (detail.empty() ? "" : ", ") + name + " stretch " + dec(s, 2);
    }
  }
  return t.outcome(detail);
}

Outcome numeric_core() {
  Tally t;
  oracle::Rng rng(1e5);
  constexpr double tol = 1e-9;
  for (int i = 0; i < 100000; ++i) {
    const Real r(rng.uniform(-5, 5), B);
    const Real slope = (i % 5 == 0) ? R(0) : Real(rng.uniform(0.05, 4), B);
    const Real base = (i % 3 == 0 || slope.is_zero()) ? Real(rng.uniform(0.1, 3), B) : R(0);
    const Job j = Job::affine(1, r, r + 10, R(1), base, slope);
    const Real a = r + Real(rng.uniform(0, 4), B);
    const Real b = a + Real(rng.uniform(0, 3), B);
    const Real c = b + Real(rng.uniform(0.001, 3), B);
    SpeedCap cap;
    if (i % 4 == 1) cap = speed_at(j, r + Real(rng.uniform(0.1, 6), B));
    const std::string tag = "case " + std::to_string(i);

    const Real ab = work_in(j, a, b, cap), bc = work_in(j, b, c, cap), ac = work_in(j, a, c, cap);
    t.check(oracle::close_rel(ac, ab + bc, tol), tag + " additivity");
    t.check(ac > ab, tag + " monotone in the end point");
    if (!cap) t.check(oracle::close_rel(ac, oracle::simpson_work(j, a, c), tol), tag + " quadrature");
    t.check(oracle::close_rel(completion_from(j, a, ac, cap), c, tol), tag + " inversion");
    t.check(oracle::close_rel(work_in(j, a, completion_from(j, a, ab, cap), cap), ab, tol), tag + " inverse round-trip");
    if (j.speed.lazy() && !cap) {
      const Real d(rng.uniform(0.01, 2), B);
      t.check(work_in(j, b, b + d) >= work_in(j, a, a + d), tag + " later windows do more work");
    }
  }
  return t.outcome("100000 randomized cases");
}

struct Criterion {
  int number;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "LSSF lower bound sqrt(n-1)", 1, lssf_lower_bound},
      {2, "SRPT lower bound sqrt(n+1)/2", 1, srpt_lower_bound},
      {3, "Thrashing max stretch <= 4, uncapped and capped", 30, thrashing_bound},
      {4, "alpha-DLY full-horizon window bound", 30, window_bound},
      {5, "LRTB optimality against brute force", 60, lrtb_optimality},
      {6, "equal-release exchange", 5, equal_release_exchange},
      {7, "sum-of-square-roots reduction", 10, ssr_reduction},
      {8, "adaptive adversary", 1, adversary},
      {9, "FIFO/EDD unbounded stretch", 5, fifo_edd_unbounded},
      {10, "work_in/completion_from properties", 10, numeric_core},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_seconds) {
      o.pass = false;
      o.detail += "; over the " + std::to_string(static_cast<int>(c.budget_seconds)) + " s budget";
    }
    std::printf("%s [%d] %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.number, c.name, o.detail.c_str(), secs);
    if (!o.pass) ++failed;
  }
  std::printf("%d of 10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
