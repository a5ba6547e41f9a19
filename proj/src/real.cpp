#include "procrastinate/real.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace procrastinate {

namespace {

unsigned wider(const Real& a, const Real& b) { return std::max(a.bits(), b.bits()); }

}  // namespace

Real::Real(Uninit, unsigned bits) { mpfr_init2(v_, static_cast<mpfr_prec_t>(bits)); }

Real::Real(long value, unsigned bits) : Real(Uninit{}, bits) { mpfr_set_si(v_, value, MPFR_RNDN); }

Real::Real(double value, unsigned bits) : Real(Uninit{}, bits) { mpfr_set_d(v_, value, MPFR_RNDN); }

Real Real::parse(std::string_view text, unsigned bits) {
  Real r(Uninit{}, bits);
  std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty number");
  char* end = nullptr;
  mpfr_strtofr(r.v_, s.c_str(), &end, 10, MPFR_RNDN);
  if (end == s.c_str() || *end != '\0' || r.is_nan())
    throw std::invalid_argument("not a decimal number: '" + s + "'");
  return r;
}

Real Real::infinity(unsigned bits) {
  Real r(Uninit{}, bits);
  mpfr_set_inf(r.v_, 1);
  return r;
}

Real Real::pow2(long exponent, unsigned bits) {
  Real r(1L, bits);
  mpfr_mul_2si(r.v_, r.v_, exponent, MPFR_RNDN);
  return r;
}

Real Real::pow10(long exponent, unsigned bits) {
  Real r(Uninit{}, bits);
  mpfr_ui_pow_ui(r.v_, 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent), MPFR_RNDN);
  if (exponent < 0) mpfr_ui_div(r.v_, 1, r.v_, MPFR_RNDN);
  return r;
}

Real::Real(const Real& other) : Real(Uninit{}, other.bits()) { mpfr_set(v_, other.v_, MPFR_RNDN); }

Real::Real(Real&& other) noexcept : Real(Uninit{}, other.bits()) { mpfr_swap(v_, other.v_); }

Real& Real::operator=(const Real& other) {
  if (this != &other) {
    mpfr_set_prec(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  return *this;
}

Real& Real::operator=(Real&& other) noexcept {
  mpfr_swap(v_, other.v_);
  return *this;
}

Real::~Real() { mpfr_clear(v_); }

Real Real::with_bits(unsigned bits) const {
  Real r(Uninit{}, bits);
  mpfr_set(r.v_, v_, MPFR_RNDN);
  return r;
}

std::string Real::to_decimal(unsigned significant) const {
  if (is_nan()) return "nan";
  if (is_inf()) return sign() < 0 ? "-inf" : "inf";
  if (is_zero()) return "0";
  if (significant == 0) significant = round_trip_digits(bits());
  mpfr_exp_t exp10 = 0;
  char* raw_digits = mpfr_get_str(nullptr, &exp10, 10, significant, v_, MPFR_RNDN);
  std::string digits(raw_digits);
  mpfr_free_str(raw_digits);

  bool negative = false;
  if (!digits.empty() && digits.front() == '-') {
    negative = true;
    digits.erase(digits.begin());
  }
  while (digits.size() > 1 && digits.back() == '0') digits.pop_back();

  // value = 0.<digits> * 10^exp10
  std::string out;
  const auto n = static_cast<long>(digits.size());
  if (exp10 <= 0) {
    out = "0." + std::string(static_cast<size_t>(-exp10), '0') + digits;
  } else if (exp10 >= n) {
    out = digits + std::string(static_cast<size_t>(exp10 - n), '0');
  } else {
    out = digits.substr(0, static_cast<size_t>(exp10)) + "." + digits.substr(static_cast<size_t>(exp10));
  }
  return negative ? "-" + out : out;
}

Real Real::operator-() const {
  Real r(Uninit{}, bits());
  mpfr_neg(r.v_, v_, MPFR_RNDN);
  return r;
}

#define PROCRASTINATE_COMPOUND(op, fn)                                         \
  Real& Real::operator op(const Real& rhs) {                                   \
    if (rhs.bits() > bits()) mpfr_prec_round(v_, rhs.bits(), MPFR_RNDN);       \
    fn(v_, v_, rhs.v_, MPFR_RNDN);                                             \
    return *this;                                                              \
  }

PROCRASTINATE_COMPOUND(+=, mpfr_add)
PROCRASTINATE_COMPOUND(-=, mpfr_sub)
PROCRASTINATE_COMPOUND(*=, mpfr_mul)
PROCRASTINATE_COMPOUND(/=, mpfr_div)
#undef PROCRASTINATE_COMPOUND

#define PROCRASTINATE_BINARY(op, fn)                                           \
  Real operator op(const Real& a, const Real& b) {                             \
    Real r(Real::Uninit{}, wider(a, b));                                       \
    fn(r.v_, a.v_, b.v_, MPFR_RNDN);                                           \
    return r;                                                                  \
  }

PROCRASTINATE_BINARY(+, mpfr_add)
PROCRASTINATE_BINARY(-, mpfr_sub)
PROCRASTINATE_BINARY(*, mpfr_mul)
PROCRASTINATE_BINARY(/, mpfr_div)
#undef PROCRASTINATE_BINARY

Real operator+(const Real& a, long b) {
  Real r(Real::Uninit{}, a.bits());
  mpfr_add_si(r.v_, a.v_, b, MPFR_RNDN);
  return r;
}

Real operator-(const Real& a, long b) {
  Real r(Real::Uninit{}, a.bits());
  mpfr_sub_si(r.v_, a.v_, b, MPFR_RNDN);
  return r;
}

Real operator-(long a, const Real& b) {
  Real r(Real::Uninit{}, b.bits());
  mpfr_si_sub(r.v_, a, b.v_, MPFR_RNDN);
  return r;
}

Real operator*(const Real& a, long b) {
  Real r(Real::Uninit{}, a.bits());
  mpfr_mul_si(r.v_, a.v_, b, MPFR_RNDN);
  return r;
}

Real operator/(const Real& a, long b) {
  Real r(Real::Uninit{}, a.bits());
  mpfr_div_si(r.v_, a.v_, b, MPFR_RNDN);
  return r;
}

Real operator/(long a, const Real& b) {
  Real r(Real::Uninit{}, b.bits());
  mpfr_si_div(r.v_, a, b.v_, MPFR_RNDN);
  return r;
}

std::partial_ordering operator<=>(const Real& a, const Real& b) {
  if (a.is_nan() || b.is_nan()) return std::partial_ordering::unordered;
  const int c = mpfr_cmp(a.v_, b.v_);
  return c < 0 ? std::partial_ordering::less
               : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}

std::partial_ordering operator<=>(const Real& a, long b) {
  if (a.is_nan()) return std::partial_ordering::unordered;
  const int c = mpfr_cmp_si(a.v_, b);
  return c < 0 ? std::partial_ordering::less
               : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}

#define PROCRASTINATE_UNARY(name, fn)                                          \
  Real name(const Real& x) {                                                   \
    Real r(Real::Uninit{}, x.bits());                                          \
    fn(r.v_, x.v_, MPFR_RNDN);                                                 \
    return r;                                                                  \
  }

PROCRASTINATE_UNARY(sqrt, mpfr_sqrt)
PROCRASTINATE_UNARY(abs, mpfr_abs)
PROCRASTINATE_UNARY(log10, mpfr_log10)
PROCRASTINATE_UNARY(exp, mpfr_exp)
#undef PROCRASTINATE_UNARY

Real floor(const Real& x) {
  Real r(Real::Uninit{}, x.bits());
  mpfr_floor(r.v_, x.v_);
  return r;
}

Real ceil(const Real& x) {
  Real r(Real::Uninit{}, x.bits());
  mpfr_ceil(r.v_, x.v_);
  return r;
}

const Real& min(const Real& a, const Real& b) { return b < a ? b : a; }
const Real& max(const Real& a, const Real& b) { return a < b ? b : a; }

unsigned round_trip_digits(unsigned bits) {
  if (bits < 2) return 1;
  return static_cast<unsigned>(std::floor((bits - 1) * std::log10(2.0)));
}

std::ostream& operator<<(std::ostream& os, const Real& x) { return os << x.to_decimal(); }

}  // namespace procrastinate
