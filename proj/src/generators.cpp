#include "procrastinate/generators.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

#include "procrastinate/core.hpp"
#include "procrastinate/errors.hpp"

namespace procrastinate {

using nlohmann::json;

Real round_decimal(const Real& x, long exponent, bool up) {
  const unsigned bits = x.bits();
  // scale at extra precision so the integer part is exact
  const Real wide = x.with_bits(bits + 64);
  const Real scaled = exponent < 0 ? wide * Real::pow10(-exponent, bits + 64) : wide / Real::pow10(exponent, bits + 64);
  const Real q = up ? ceil(scaled) : floor(scaled);
  return Real::parse(q.to_decimal() + "e" + std::to_string(exponent), bits);
}

Real rationalize(const Real& x, const Real& delta, bool up) {
  if (x.is_zero()) return x;
  const Real target = abs(x) * delta;
  const long exponent = static_cast<long>(std::floor(log10(target).to_double()));
  return round_decimal(x, exponent, up);
}

namespace {

PolicySpec make_policy(PolicyKind k) {
  PolicySpec p;
  p.kind = k;
  return p;
}

const JobOutcome& outcome_of(const SimTrace& trace, JobId id) {
  for (const auto& j : trace.jobs)
    if (j.id == id) return j;
  throw DomainError("job " + std::to_string(id) + " missing from trace");
}

json decimals(const std::vector<Real>& xs) {
  json out = json::array();
  for (const auto& x : xs) out.push_back(x.to_decimal());
  return out;
}

}  // namespace

Instance gen_lssf(unsigned n, const PrecisionContext& ctx, const std::optional<Real>& delta_opt) {
  if (n < 3) throw ParameterError("gen_lssf needs n >= 3");
  const Real delta = delta_opt ? *delta_opt : ctx.parse("1e-12");
  if (!(delta.sign() > 0)) throw ParameterError("gen_lssf: delta must be positive");
  const PolicySpec lssf = make_policy(PolicyKind::LSSF);

  std::vector<Job> jobs{Job::lazy(1, ctx.make(0), ctx.make(4), ctx.make(1)),
                        Job::lazy(2, ctx.make(1), ctx.make(2), ctx.parse("0.5"))};
  for (unsigned j = 3; j <= n; ++j) {
    const SimTrace trace = simulate(Instance(jobs), lssf, ctx);
    const JobOutcome& prev = outcome_of(trace, j - 1);
    const Real r = jobs.back().due;
    const Real length = j == 3 ? prev.completion - r : (prev.completion - r) / prev.stretch;
    const Real d = round_decimal(r + length, static_cast<long>(std::floor(log10(length * delta).to_double())), true);
    const Real w = rationalize((d - r) * (d - r) / 2, delta, false);
    jobs.push_back(Job::lazy(j, r, d, w));
  }

  Instance inst(jobs, "lssf-" + std::to_string(n));
  const SimTrace final_trace = simulate(inst, lssf, ctx);
  std::vector<Real> completions, stretches;
  for (const auto& o : final_trace.jobs) {
    completions.push_back(o.completion);
    stretches.push_back(o.stretch);
  }
  json prov = {{"generator", "lssf"},      {"n", n},
               {"delta", delta.to_decimal()}, {"expected_max_stretch", sqrt(ctx.make(n - 1)).to_decimal()},
               {"lssf_completions", decimals(completions)}, {"lssf_stretches", decimals(stretches)}};
  inst.set_provenance(prov.dump());
  return inst;
}

Instance gen_srpt(unsigned n, const PrecisionContext& ctx) {
  if (n < 2) throw ParameterError("gen_srpt needs n >= 2");
  const Real late_due = round_decimal(sqrt(ctx.make(n)) + 2, -6, true);
  std::vector<Job> jobs{Job::lazy(1, ctx.make(0), ctx.make(2), ctx.make(1))};
  for (unsigned i = 2; i <= n; ++i) jobs.push_back(Job::lazy(i, ctx.make(0), late_due, ctx.parse("0.5")));
  Instance inst(jobs, "srpt-" + std::to_string(n));
  json prov = {{"generator", "srpt"}, {"n", n}, {"expected_job1_completion", sqrt(ctx.make(n + 1)).to_decimal()}};
  inst.set_provenance(prov.dump());
  return inst;
}

namespace {

template <typename Build>
Instance search_stretch(const Real& target, PolicyKind kind, const char* name, Build build, const PrecisionContext& ctx) {
  if (!(target > 1L)) throw ParameterError(std::string("gen_") + name + ": target must exceed 1");
  Real best(0L, ctx.bits);
  for (long k = 1; k <= 100; ++k) {
    const Real eps = Real::pow2(-k, ctx.bits);
    Instance inst = build(eps);
    const Real got = max_stretch(simulate(inst, make_policy(kind), ctx));
    if (got > best) best = got;
    if (got >= target && lrtb(inst, ctx).verdict.status == Feasibility::Feasible) {
      inst.set_name(std::string(name) + "-" + target.to_decimal(12));
      json prov = {{"generator", name},
                   {"target", target.to_decimal()},
                   {"eps", eps.to_decimal()},
                   {"max_stretch", got.to_decimal()}};
      inst.set_provenance(prov.dump());
      return inst;
    }
  }
  throw InfeasibleError(std::string("gen_") + name + ": target not reached; best stretch " + best.to_decimal(12));
}

}  // namespace

Instance gen_fifo(const Real& target, const PrecisionContext& ctx) {
  return search_stretch(target, PolicyKind::FIFO, "fifo", [&](const Real& eps) {
    return Instance({Job::lazy(1, ctx.make(0), ctx.make(2), ctx.make(1)),
                     Job::lazy(2, ctx.make(1), 1 + eps, eps * eps / 4)});
  }, ctx);
}

Instance gen_edd(const Real& target, const PrecisionContext& ctx) {
  return search_stretch(target, PolicyKind::EDD, "edd", [&](const Real& eps) {
    return Instance({Job::lazy(1, ctx.make(0), ctx.make(2), ctx.parse("1.6")),
                     Job::lazy(2, ctx.make(1), ctx.parse("1.5"), ctx.parse("0.1")),
                     Job::lazy(3, ctx.make(2), 2 + eps, eps * eps / 4)});
  }, ctx);
}

void SsrQuery::validate() const {
  if (xs.empty()) throw ParameterError("SSR query needs at least one x");
  for (auto x : xs)
    if (x == 0 || x > (std::uint64_t{1} << 62)) throw ParameterError("SSR values must lie in [1, 2^62]");
  if (threshold == 0 || threshold > (std::uint64_t{1} << 62)) throw ParameterError("SSR threshold must lie in [1, 2^62]");
}

Instance reduce_ssr(const SsrQuery& q, const PrecisionContext& ctx) {
  q.validate();
  std::vector<Job> jobs;
  Real t = ctx.make(0);
  JobId id = 1;
  for (auto x : q.xs) {
    const Real xr(static_cast<long>(x), ctx.bits);
    const Real length = xr + 2;
    const Real work = (xr * xr + 3 * xr + 4) / 2;
    jobs.push_back(Job::lazy(id++, t, t + length, work));
    t += length;
  }
  jobs.push_back(Job::nonlazy(id, ctx.make(0), t, Real(static_cast<long>(q.threshold), ctx.bits), ctx.make(1)));
  json xs = json::array();
  for (auto x : q.xs) xs.push_back(x);
  Instance inst(jobs, "ssr");
  inst.set_provenance(json{{"generator", "reduction"}, {"xs", xs}, {"threshold", q.threshold}}.dump());
  return inst;
}

namespace {

std::uint64_t isqrt(std::uint64_t x) {
  auto s = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(x)));
  while (s * s > x) --s;
  while ((s + 1) * (s + 1) <= x) ++s;
  return s;
}

}  // namespace

FeasibilityVerdict check_reduction(const SsrQuery& q, const PrecisionContext& ctx) {
  q.validate();
  long exact = 0;  // sum of integer roots
  Real irrational(0L, ctx.bits);
  bool any_irrational = false;
  for (auto x : q.xs) {
    const auto s = isqrt(x);
    if (s * s == x) {
      exact += static_cast<long>(s);
    } else {
      irrational += sqrt(Real(static_cast<long>(x), ctx.bits));
      any_irrational = true;
    }
  }
  const Real gap(static_cast<long>(q.threshold) - exact, ctx.bits);
  const JobId nonlazy_id = static_cast<JobId>(q.xs.size() + 1);

  FeasibilityVerdict v;
  v.margin = abs(irrational - gap);
  Verdict cmp;
  if (!any_irrational) {
    cmp = irrational == gap ? Verdict::Equal : (irrational > gap ? Verdict::Greater : Verdict::Less);
  } else {
    // a sum with an irrational root never equals an integer, so Equal here is
    // a rounding artefact and just as undecided as Indeterminate
    cmp = ctx.compare(irrational, gap, Real(static_cast<long>(q.threshold), ctx.bits));
    if (cmp == Verdict::Equal) cmp = Verdict::Indeterminate;
  }
  switch (cmp) {
    case Verdict::Less:
      v.status = Feasibility::Infeasible;
      v.deficits.push_back(JobDeficit{nonlazy_id, gap - irrational});
      break;
    case Verdict::Indeterminate: v.status = Feasibility::Indeterminate; break;
    default: {
      v.status = Feasibility::Feasible;
      auto fill = check_nonlazy_fill(reduce_ssr(q, ctx), ctx);
      if (fill.status == Feasibility::Feasible) v.witness = std::move(fill.witness);
    }
  }
  return v;
}

AdversaryOutcome adaptive_adversary(const PolicySpec& policy, const PrecisionContext& ctx, unsigned rounds) {
  policy.validate();
  if (rounds == 0) throw ParameterError("adaptive_adversary needs at least one round");
  const Real delta = ctx.parse("1e-6");
  std::vector<Job> jobs;
  std::vector<AdversaryCase> cases;
  json rounds_log = json::array();
  Real offset = ctx.make(0);
  JobId next_id = 1;

  for (unsigned round = 0; round < rounds; ++round) {
    const Job a = Job::lazy(next_id, offset, offset + 8, ctx.make(10));
    const Job b = Job::lazy(next_id + 1, offset + 2, offset + 4, ctx.make(1));
    const JobId follow_id = next_id + 2;
    next_id += 3;
    jobs.push_back(a);
    jobs.push_back(b);

    const SimTrace probe = simulate(Instance(jobs), policy, ctx);
    std::optional<JobId> at_release;
    for (const auto& s : probe.segments)
      if (s.start <= b.release && b.release < s.end) at_release = s.job;
    std::optional<Real> next_event;
    for (const auto& e : probe.events)
      if (e.time > b.release && (!next_event || e.time < *next_event)) next_event = e.time;

    json log = {{"round", round}, {"observed", at_release ? json(*at_release) : json("idle")}};
    if (at_release == b.id) {
      // b runs early: give a just the time LRTB leaves it, minus b's slot
      cases.push_back(AdversaryCase::RanJob2);
      const Real r4 = b.due + ctx.parse("0.5");
      const Real b_start = latest_start(b, b.due, b.work);
      const Real have = work_in(a, a.release, b_start) + work_in(a, b.due, r4);
      const Real d4_exact = latest_start(a, a.due, a.work - have);
      const Real d4 = rationalize(d4_exact, delta, false);
      const Real w4 = rationalize((d4 - r4) * (d4 - r4) / 2, delta, false);
      jobs.push_back(Job::lazy(follow_id, r4, d4, w4));
      log["case"] = "ran-job-2";
      log["follow_up"] = {{"release", r4.to_decimal()}, {"due", d4.to_decimal()}, {"work", w4.to_decimal()}};
    } else {
      // b waits: a no-slack job inside b's interval leaves b no room to spare
      cases.push_back(AdversaryCase::WaitedOnJob2);
      Real step = (b.due - b.release) / 8;
      if (next_event && (*next_event - b.release) / 2 < step) step = (*next_event - b.release) / 2;
      Real r3 = round_decimal(b.release + step, static_cast<long>(std::floor(log10(step * delta).to_double())), false);
      if (!(r3 > b.release)) r3 = b.release + step;
      const Real d3_exact = latest_start(b, b.due, b.work - work_in(b, b.release, r3));
      const Real d3 = rationalize(d3_exact, delta, false);
      const Real w3 = rationalize((d3 - r3) * (d3 - r3) / 2, delta, false);
      jobs.push_back(Job::lazy(follow_id, r3, d3, w3));
      log["case"] = "waited-on-job-2";
      log["follow_up"] = {{"release", r3.to_decimal()}, {"due", d3.to_decimal()}, {"work", w3.to_decimal()}};
    }
    rounds_log.push_back(log);

    // next round starts after everything so far has finished
    const SimTrace so_far = simulate(Instance(jobs), policy, ctx);
    Real horizon = Instance(jobs).max_due();
    for (const auto& o : so_far.jobs) horizon = max(horizon, o.completion);
    offset = ceil(horizon) + 1;
  }

  AdversaryOutcome out{Instance(jobs, "adversary-" + std::string(to_string(policy.kind))), {}, false, {}, cases};
  out.trace = simulate(out.instance, policy, ctx);
  for (const auto& o : out.trace.jobs)
    if (ctx.compare(o.completion, o.due) == Verdict::Greater) out.late_jobs.push_back(o.id);
  out.missed = !out.late_jobs.empty();
  json prov = {{"generator", "adversary"}, {"policy", to_string(policy.kind)}, {"rounds", rounds_log}};
  out.instance.set_provenance(prov.dump());
  return out;
}

Instance gen_random_feasible(unsigned n, std::uint64_t seed, const PrecisionContext& ctx) {
  if (n == 0) throw ParameterError("gen_random_feasible needs n >= 1");
  std::mt19937_64 eng(seed);
  auto uniform = [&]() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; };

  for (int attempt = 0; attempt < 400; ++attempt) {
    const double scale = std::pow(0.85, attempt / 10);
    std::vector<Job> jobs;
    for (unsigned i = 0; i < n; ++i) {
      const Real r = round_decimal(Real(uniform() * n, ctx.bits), -3, false);
      const double len = 0.25 * std::pow(16.0, uniform());
      Real d = round_decimal(r + Real(len, ctx.bits), -3, true);
      const Real m = round_decimal(Real(0.5 + 1.5 * uniform(), ctx.bits), -2, false);
      const Real l = d - r;
      Real w = round_decimal(Real((0.05 + 0.9 * uniform()) * scale, ctx.bits) * m * l * l / 2, -6, false);
      if (w.sign() <= 0) w = ctx.parse("0.000001");
      jobs.push_back(Job::lazy(i + 1, r, d, w, m));
    }
    Instance inst(std::move(jobs), "random-" + std::to_string(n) + "-" + std::to_string(seed));
    const auto res = lrtb(inst, ctx);
    if (res.verdict.status == Feasibility::Feasible && res.verdict.margin.sign() > 0) {
      inst.set_provenance(json{{"generator", "random"}, {"n", n}, {"seed", seed}, {"attempt", attempt}}.dump());
      return inst;
    }
  }
  throw InfeasibleError("gen_random_feasible: rejection budget exhausted");
}

}  // namespace procrastinate
