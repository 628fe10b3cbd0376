#pragma once

#include <mpfr.h>
#include <gmpxx.h>

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace modgal::mp {

using Bits = mpfr_prec_t;

// Integer and double literals are stored exactly at this precision.
inline constexpr Bits kLiteralBits = 64;

class Real {
 public:
  Real() { mpfr_init2(v_, kLiteralBits); mpfr_set_zero(v_, 1); }
  Real(int x) { mpfr_init2(v_, kLiteralBits); mpfr_set_si(v_, x, MPFR_RNDN); }
  Real(long x) { mpfr_init2(v_, kLiteralBits); mpfr_set_si(v_, x, MPFR_RNDN); }
  Real(long long x) { mpfr_init2(v_, kLiteralBits); mpfr_set_si(v_, static_cast<long>(x), MPFR_RNDN); }
  Real(unsigned long x) { mpfr_init2(v_, kLiteralBits); mpfr_set_ui(v_, x, MPFR_RNDN); }
  Real(double x) { mpfr_init2(v_, kLiteralBits); mpfr_set_d(v_, x, MPFR_RNDN); }
  Real(const mpz_class& z, Bits prec);
  Real(const mpq_class& q, Bits prec);
  Real(std::string_view decimal, Bits prec);

  static Real zero(Bits prec) {
    Real r(Uninit{}, prec);
    mpfr_set_zero(r.v_, 1);
    return r;
  }
  static Real from(double x, Bits prec) {
    Real r(Uninit{}, prec);
    mpfr_set_d(r.v_, x, MPFR_RNDN);
    return r;
  }
  static Real from(long x, Bits prec) {
    Real r(Uninit{}, prec);
    mpfr_set_si(r.v_, x, MPFR_RNDN);
    return r;
  }

  Real(const Real& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Real(Real&& o) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, o.v_);
  }
  ~Real() { mpfr_clear(v_); }

  Real& operator=(const Real& o) {
    if (this == &o) return *this;
    if (mpfr_get_prec(v_) != mpfr_get_prec(o.v_)) mpfr_set_prec(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }

  Bits precision() const { return mpfr_get_prec(v_); }
  // Copy rounded (or zero-extended) to the requested precision.
  Real at(Bits prec) const {
    Real r(Uninit{}, prec);
    mpfr_set(r.v_, v_, MPFR_RNDN);
    return r;
  }

  mpfr_srcptr get() const { return v_; }
  mpfr_ptr get() { return v_; }

  Real& operator+=(const Real& o);
  Real& operator-=(const Real& o);
  Real& operator*=(const Real& o);
  Real& operator/=(const Real& o);
  Real operator-() const;

  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }
  // Binary exponent e with 0.5 <= |x|/2^e < 1; very negative for zero.
  long exponent() const;
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  mpz_class round_to_integer() const;
  std::string to_string(int digits = 20) const;

  struct Uninit {};
  Real(Uninit, Bits prec) { mpfr_init2(v_, prec); }

 private:
  mpfr_t v_;
};

Real operator+(const Real& a, const Real& b);
Real operator-(const Real& a, const Real& b);
Real operator*(const Real& a, const Real& b);
Real operator/(const Real& a, const Real& b);
Real operator*(const Real& a, long b);
Real operator/(const Real& a, long b);

bool operator<(const Real& a, const Real& b);
bool operator>(const Real& a, const Real& b);
bool operator<=(const Real& a, const Real& b);
bool operator>=(const Real& a, const Real& b);
bool operator==(const Real& a, const Real& b);
bool operator!=(const Real& a, const Real& b);

Real abs(const Real& x);
Real sqrt(const Real& x);
Real exp(const Real& x);
Real log(const Real& x);
Real sin(const Real& x);
Real cos(const Real& x);
Real atan2(const Real& y, const Real& x);
Real pow(const Real& x, long n);
Real ldexp(const Real& x, long e);
Real floor(const Real& x);
Real pi(Bits prec);
// 2^(-e) at the given precision.
Real two_pow(long e, Bits prec);
Real max(const Real& a, const Real& b);
Real min(const Real& a, const Real& b);
inline Real real(const Real& x) { return x; }
inline Real imag(const Real& x) { return Real::zero(x.precision()); }
inline Real conj(const Real& x) { return x; }
inline Real abs2(const Real& x) { return x * x; }

std::ostream& operator<<(std::ostream& os, const Real& x);

// Exact text form (C99 hex float) and its inverse.
std::string to_hex(const Real& x);
Real from_hex(const std::string& s, Bits prec);

class Complex {
 public:
  Complex() = default;
  Complex(int x) : re_(x) {}
  Complex(long x) : re_(x) {}
  Complex(double x) : re_(x) {}
  Complex(Real re) : re_(std::move(re)), im_(Real::zero(re_.precision())) {}
  Complex(Real re, Real im) : re_(std::move(re)), im_(std::move(im)) {}

  static Complex zero(Bits prec) { return {Real::zero(prec), Real::zero(prec)}; }
  static Complex from(double re, double im, Bits prec) {
    return {Real::from(re, prec), Real::from(im, prec)};
  }

  const Real& real() const { return re_; }
  const Real& imag() const { return im_; }
  Real& real() { return re_; }
  Real& imag() { return im_; }
  Bits precision() const { return std::max(re_.precision(), im_.precision()); }
  Complex at(Bits prec) const { return {re_.at(prec), im_.at(prec)}; }

  Complex& operator+=(const Complex& o);
  Complex& operator-=(const Complex& o);
  Complex& operator*=(const Complex& o);
  Complex& operator/=(const Complex& o);
  Complex& operator*=(const Real& o);
  Complex operator-() const { return {-re_, -im_}; }

  bool is_zero() const { return re_.is_zero() && im_.is_zero(); }
  bool is_finite() const { return re_.is_finite() && im_.is_finite(); }

 private:
  Real re_;
  Real im_;
};

Complex operator+(const Complex& a, const Complex& b);
Complex operator-(const Complex& a, const Complex& b);
Complex operator*(const Complex& a, const Complex& b);
Complex operator/(const Complex& a, const Complex& b);
Complex operator*(const Complex& a, const Real& b);
Complex operator*(const Real& a, const Complex& b);
Complex operator/(const Complex& a, const Real& b);
Complex operator*(const Complex& a, long b);
Complex operator/(const Complex& a, long b);
bool operator==(const Complex& a, const Complex& b);
bool operator!=(const Complex& a, const Complex& b);

inline Real real(const Complex& z) { return z.real(); }
inline Real imag(const Complex& z) { return z.imag(); }
inline Complex conj(const Complex& z) { return {z.real(), -z.imag()}; }
Real abs2(const Complex& z);
Real abs(const Complex& z);
Real arg(const Complex& z);
Complex sqrt(const Complex& z);
Complex exp(const Complex& z);
Complex log(const Complex& z);
Complex pow(const Complex& z, long n);
Complex polar(const Real& r, const Real& theta);
// exp(2 pi i k / n).
Complex root_of_unity(long k, long n, Bits prec);
// exp(2 pi i z).
Complex e2pi(const Complex& z);
Complex i_unit(Bits prec);

std::ostream& operator<<(std::ostream& os, const Complex& z);

}  // namespace modgal::mp

namespace Eigen {

template <>
struct NumTraits<modgal::mp::Real> : GenericNumTraits<modgal::mp::Real> {
  using Real = modgal::mp::Real;
  using NonInteger = modgal::mp::Real;
  using Nested = modgal::mp::Real;
  using Literal = modgal::mp::Real;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 4,
    AddCost = 16,
    MulCost = 32
  };
  static Real epsilon() { return modgal::mp::two_pow(modgal::mp::kLiteralBits, modgal::mp::kLiteralBits); }
  static Real dummy_precision() { return modgal::mp::two_pow(modgal::mp::kLiteralBits / 2, modgal::mp::kLiteralBits); }
  static int digits10() { return 19; }
};

template <>
struct NumTraits<modgal::mp::Complex> : GenericNumTraits<modgal::mp::Complex> {
  using Real = modgal::mp::Real;
  using NonInteger = modgal::mp::Complex;
  using Nested = modgal::mp::Complex;
  using Literal = modgal::mp::Complex;
  enum {
    IsComplex = 1,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 32,
    MulCost = 128
  };
  static Real epsilon() { return NumTraits<modgal::mp::Real>::epsilon(); }
  static Real dummy_precision() { return NumTraits<modgal::mp::Real>::dummy_precision(); }
  static int digits10() { return 19; }
};

template <>
struct ScalarBinaryOpTraits<modgal::mp::Complex, modgal::mp::Real> {
  using ReturnType = modgal::mp::Complex;
};
template <>
struct ScalarBinaryOpTraits<modgal::mp::Real, modgal::mp::Complex> {
  using ReturnType = modgal::mp::Complex;
};

}  // namespace Eigen

namespace modgal::mp {
using CMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
using CVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
using RMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
}  // namespace modgal::mp
