#include "procrastinate/precision.hpp"

#include "procrastinate/errors.hpp"

namespace procrastinate {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Less: return "less";
    case Verdict::Equal: return "equal";
    case Verdict::Greater: return "greater";
    case Verdict::Indeterminate: return "indeterminate";
  }
  return "?";
}

Verdict flip(Verdict v) {
  switch (v) {
    case Verdict::Less: return Verdict::Greater;
    case Verdict::Greater: return Verdict::Less;
    default: return v;
  }
}

PrecisionContext PrecisionContext::with_bits(unsigned bits) {
  if (bits < 24) throw ParameterError("precision must be at least 24 bits");
  return with_bits(bits, Real::pow2(-static_cast<long>(bits - 16), bits));
}

PrecisionContext PrecisionContext::with_bits(unsigned bits, const Real& rel_tol) {
  if (bits < 24) throw ParameterError("precision must be at least 24 bits");
  if (rel_tol.sign() < 0 || !rel_tol.is_finite()) throw ParameterError("tolerance must be finite and >= 0");
  PrecisionContext ctx;
  ctx.bits = bits;
  ctx.rel_tol = rel_tol.with_bits(bits);
  ctx.abs_tol = ctx.rel_tol;
  return ctx;
}

Real PrecisionContext::tolerance(const Real& a, const Real& b) const {
  return max(abs_tol, rel_tol * max(abs(a), abs(b)));
}

Real PrecisionContext::tolerance(const Real& a, const Real& b, const Real& scale) const {
  return max(abs_tol, rel_tol * max(max(abs(a), abs(b)), abs(scale)));
}

namespace {

Verdict decide(const Real& a, const Real& b, const Real& tol) {
  if (a == b) return Verdict::Equal;
  const Real gap = a - b;
  if (abs(gap) <= tol) return Verdict::Indeterminate;
  return gap.sign() < 0 ? Verdict::Less : Verdict::Greater;
}

}  // namespace

Verdict PrecisionContext::compare(const Real& a, const Real& b) const { return decide(a, b, tolerance(a, b)); }

Verdict PrecisionContext::compare(const Real& a, const Real& b, const Real& scale) const {
  return decide(a, b, tolerance(a, b, scale));
}

}  // namespace procrastinate
