#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "procrastinate/core.hpp"
#include "procrastinate/errors.hpp"
#include "procrastinate/generators.hpp"
#include "procrastinate/io.hpp"
#include "procrastinate/offline.hpp"
#include "procrastinate/online.hpp"

namespace py = pybind11;
using namespace procrastinate;

// Everything crosses the boundary as decimal strings or schema JSON text, so
// no precision is lost to Python floats.

namespace {

PrecisionContext context(unsigned bits) { return PrecisionContext::with_bits(bits); }

Real num(const std::string& s, unsigned bits) { return Real::parse(s, bits); }

SpeedCap cap_of(const std::optional<std::string>& cap, unsigned bits) {
  if (!cap) return std::nullopt;
  return num(*cap, bits);
}

Job single_job(const std::string& job_json, unsigned bits) {
  const Instance inst =
      instance_from_json("{\"schema_version\": 1, \"jobs\": [" + job_json + "]}", context(bits));
  return inst[0];
}

PolicySpec make_policy(const std::string& name, const std::string& alpha, const std::optional<std::string>& cap,
                       unsigned bits) {
  const auto kind = parse_policy(name);
  if (!kind) throw ParameterError("unknown policy '" + name + "'");
  PolicySpec p;
  p.kind = *kind;
  p.alpha = num(alpha, bits);
  p.speed_cap_factor = cap_of(cap, bits);
  p.validate();
  return p;
}

std::string verdict_margin(const FeasibilityVerdict& v) {
  return v.margin.is_inf() ? std::string("inf") : v.margin.to_decimal();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Arbitrary-precision scheduling core: offline LRTB, online policies and generators";
  m.attr("DEFAULT_BITS") = kDefaultBits;

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);
  py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_RuntimeError);
  py::register_exception<NeverCompletesError>(m, "NeverCompletesError", PyExc_RuntimeError);

  m.def(
      "work_in",
      [](const std::string& job, const std::string& a, const std::string& b, const std::optional<std::string>& cap,
         unsigned bits) {
        return work_in(single_job(job, bits), num(a, bits), num(b, bits), cap_of(cap, bits)).to_decimal();
      },
      py::arg("job"), py::arg("a"), py::arg("b"), py::arg("cap") = py::none(), py::arg("bits") = kDefaultBits);
  m.def(
      "completion_from",
      [](const std::string& job, const std::string& start, const std::string& remaining,
         const std::optional<std::string>& cap, unsigned bits) {
        return completion_from(single_job(job, bits), num(start, bits), num(remaining, bits), cap_of(cap, bits))
            .to_decimal();
      },
      py::arg("job"), py::arg("start"), py::arg("remaining"), py::arg("cap") = py::none(),
      py::arg("bits") = kDefaultBits);

  m.def(
      "solve",
      [](const std::string& instance, unsigned bits) {
        const auto ctx = context(bits);
        const Instance inst = instance_from_json(instance, ctx);
        const auto res = solve(inst, ctx);
        return schedule_to_json(inst, res.schedule, res.verdict, ctx);
      },
      py::arg("instance"), py::arg("bits") = kDefaultBits);
  m.def(
      "simulate",
      [](const std::string& instance, const std::string& policy, const std::string& alpha,
         const std::optional<std::string>& cap, unsigned bits) {
        const auto ctx = context(bits);
        const Instance inst = instance_from_json(instance, ctx);
        const PolicySpec p = make_policy(policy, alpha, cap, bits);
        return trace_to_json(inst, simulate(inst, p, ctx), p, ctx);
      },
      py::arg("instance"), py::arg("policy"), py::arg("alpha") = "2", py::arg("cap") = py::none(),
      py::arg("bits") = kDefaultBits);
  m.def(
      "check_trace", [](const std::string& trace, unsigned bits) { trace_from_json(trace, context(bits)); },
      py::arg("trace"), py::arg("bits") = kDefaultBits);

  m.def(
      "gen_lssf",
      [](unsigned n, const std::optional<std::string>& delta, unsigned bits) {
        std::optional<Real> d;
        if (delta) d = num(*delta, bits);
        return instance_to_json(gen_lssf(n, context(bits), d));
      },
      py::arg("n"), py::arg("delta") = py::none(), py::arg("bits") = kDefaultBits);
  m.def(
      "gen_srpt", [](unsigned n, unsigned bits) { return instance_to_json(gen_srpt(n, context(bits))); },
      py::arg("n"), py::arg("bits") = kDefaultBits);
  m.def(
      "gen_fifo",
      [](const std::string& target, unsigned bits) {
        return instance_to_json(gen_fifo(num(target, bits), context(bits)));
      },
      py::arg("target"), py::arg("bits") = kDefaultBits);
  m.def(
      "gen_edd",
      [](const std::string& target, unsigned bits) {
        return instance_to_json(gen_edd(num(target, bits), context(bits)));
      },
      py::arg("target"), py::arg("bits") = kDefaultBits);
  m.def(
      "gen_random_feasible",
      [](unsigned n, std::uint64_t seed, unsigned bits) {
        return instance_to_json(gen_random_feasible(n, seed, context(bits)));
      },
      py::arg("n"), py::arg("seed"), py::arg("bits") = kDefaultBits);
  m.def(
      "reduce_ssr",
      [](const std::vector<std::uint64_t>& xs, std::uint64_t threshold, unsigned bits) {
        return instance_to_json(reduce_ssr(SsrQuery{xs, threshold}, context(bits)));
      },
      py::arg("xs"), py::arg("threshold"), py::arg("bits") = kDefaultBits);
  m.def(
      "check_reduction",
      [](const std::vector<std::uint64_t>& xs, std::uint64_t threshold, unsigned bits) {
        const auto v = check_reduction(SsrQuery{xs, threshold}, context(bits));
        return py::make_tuple(std::string(to_string(v.status)), verdict_margin(v));
      },
      py::arg("xs"), py::arg("threshold"), py::arg("bits") = kDefaultBits);
  m.def(
      "adaptive_adversary",
      [](const std::string& policy, unsigned rounds, unsigned bits) {
        const auto ctx = context(bits);
        const PolicySpec p = make_policy(policy, "2", std::nullopt, bits);
        const auto res = adaptive_adversary(p, ctx, rounds);
        return py::make_tuple(instance_to_json(res.instance), trace_to_json(res.instance, res.trace, p, ctx),
                              res.missed);
      },
      py::arg("policy"), py::arg("rounds") = 1, py::arg("bits") = kDefaultBits);
}
