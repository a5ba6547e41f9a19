#pragma once

#include <mpfr.h>

#include <compare>
#include <concepts>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace procrastinate {

inline constexpr unsigned kDefaultBits = 128;

/// Binary floating-point value with a per-value precision (in bits).
///
/// Thin RAII owner of an `mpfr_t`. Binary operations produce a result at the
/// larger of the operand precisions; operations against builtin arithmetic
/// values keep the precision of the Real operand. Compound assignment raises
/// the left-hand precision when the right-hand side is more precise. No
/// process-wide precision state is consulted, so values can be used from
/// several threads independently.
class Real {
public:
  Real() : Real(0L, kDefaultBits) {}
  Real(long value, unsigned bits);
  Real(double value, unsigned bits);
  template <std::integral I>
  Real(I value, unsigned bits) : Real(static_cast<long>(value), bits) {}

  /// Correctly rounded parse of a decimal (or scientific) literal.
  /// Throws std::invalid_argument when the text is not a number.
  static Real parse(std::string_view text, unsigned bits);
  static Real infinity(unsigned bits);
  /// 2^exponent, exact.
  static Real pow2(long exponent, unsigned bits);
  static Real pow10(long exponent, unsigned bits);

  Real(const Real& other);
  Real(Real&& other) noexcept;
  Real& operator=(const Real& other);
  Real& operator=(Real&& other) noexcept;
  ~Real();

  unsigned bits() const { return static_cast<unsigned>(mpfr_get_prec(v_)); }
  /// Same value rounded to a new precision.
  Real with_bits(unsigned bits) const;

  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_inf() const { return mpfr_inf_p(v_) != 0; }
  bool is_nan() const { return mpfr_nan_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  /// Plain positional decimal with at most `significant` digits, trailing
  /// zeros removed ("0.5", "-12", "0.000125"). Zero digits selects the
  /// round-trip digit count for the value's precision.
  std::string to_decimal(unsigned significant = 0) const;

  Real operator-() const;
  Real& operator+=(const Real& rhs);
  Real& operator-=(const Real& rhs);
  Real& operator*=(const Real& rhs);
  Real& operator/=(const Real& rhs);

  friend Real operator+(const Real& a, const Real& b);
  friend Real operator-(const Real& a, const Real& b);
  friend Real operator*(const Real& a, const Real& b);
  friend Real operator/(const Real& a, const Real& b);

  friend Real operator+(const Real& a, long b);
  friend Real operator-(const Real& a, long b);
  friend Real operator-(long a, const Real& b);
  friend Real operator*(const Real& a, long b);
  friend Real operator/(const Real& a, long b);
  friend Real operator/(long a, const Real& b);
  friend Real operator+(long a, const Real& b) { return b + a; }
  friend Real operator*(long a, const Real& b) { return b * a; }

  friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend std::partial_ordering operator<=>(const Real& a, const Real& b);
  friend bool operator==(const Real& a, long b) { return !a.is_nan() && mpfr_cmp_si(a.v_, b) == 0; }
  friend std::partial_ordering operator<=>(const Real& a, long b);

  friend Real sqrt(const Real& x);
  friend Real abs(const Real& x);
  friend Real floor(const Real& x);
  friend Real ceil(const Real& x);
  friend Real log10(const Real& x);
  friend Real exp(const Real& x);

  mpfr_srcptr raw() const { return v_; }
  mpfr_ptr raw() { return v_; }

private:
  struct Uninit {};
  Real(Uninit, unsigned bits);

  mpfr_t v_;
};

Real sqrt(const Real& x);
Real abs(const Real& x);
Real floor(const Real& x);
Real ceil(const Real& x);
Real log10(const Real& x);
Real exp(const Real& x);

const Real& min(const Real& a, const Real& b);
const Real& max(const Real& a, const Real& b);

/// Number of significant decimal digits that survive decimal -> binary ->
/// decimal at the given precision (floor((bits - 1) * log10 2)).
unsigned round_trip_digits(unsigned bits);

std::ostream& operator<<(std::ostream& os, const Real& x);

}  // namespace procrastinate
