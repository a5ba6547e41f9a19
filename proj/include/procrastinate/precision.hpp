#pragma once

#include <string>
#include <string_view>

#include "procrastinate/real.hpp"

namespace procrastinate {

/// Outcome of a tolerance-aware comparison. Indeterminate means the operands
/// differ at working precision but by less than the tolerance, so the sign
/// cannot be trusted.
enum class Verdict { Less, Equal, Greater, Indeterminate };

std::string_view to_string(Verdict v);
Verdict flip(Verdict v);

/// Numeric policy shared by every algorithm: working precision plus the
/// relative/absolute tolerance that separates decisive from undecidable
/// comparisons.
struct PrecisionContext {
  unsigned bits = kDefaultBits;
  Real rel_tol = Real::pow2(-static_cast<long>(kDefaultBits - 16), kDefaultBits);
  Real abs_tol = Real::pow2(-static_cast<long>(kDefaultBits - 16), kDefaultBits);

  /// Working precision with the default tolerances rel = abs = 2^-(bits-16).
  /// Requires bits >= 24.
  static PrecisionContext with_bits(unsigned bits);
  static PrecisionContext with_bits(unsigned bits, const Real& rel_tol);

  /// Tolerance band for |a - b|: max(abs_tol, rel_tol * max(|a|, |b|, scale)).
  Real tolerance(const Real& a, const Real& b) const;
  Real tolerance(const Real& a, const Real& b, const Real& scale) const;

  Verdict compare(const Real& a, const Real& b) const;
  /// As compare(), with an extra magnitude that widens the relative band
  /// (used when a and b are results of a computation whose error scales
  /// with a larger quantity than themselves).
  Verdict compare(const Real& a, const Real& b, const Real& scale) const;

  Real make(long v) const { return Real(v, bits); }
  Real parse(std::string_view text) const { return Real::parse(text, bits); }
};

}  // namespace procrastinate
