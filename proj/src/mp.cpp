#include "modgal/mp.hpp"

#include <algorithm>
#include <memory>
#include <ostream>
#include <stdexcept>

namespace modgal::mp {

namespace {

Bits join(const Real& a, const Real& b) { return std::max(a.precision(), b.precision()); }

}  // namespace

Real::Real(const mpz_class& z, Bits prec) {
  mpfr_init2(v_, prec);
  mpfr_set_z(v_, z.get_mpz_t(), MPFR_RNDN);
}

Real::Real(const mpq_class& q, Bits prec) {
  mpfr_init2(v_, prec);
  mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN);
}

Real::Real(std::string_view decimal, Bits prec) {
  mpfr_init2(v_, prec);
  std::string s(decimal);
  if (mpfr_set_str(v_, s.c_str(), 10, MPFR_RNDN) != 0) {
    mpfr_clear(v_);
    throw std::invalid_argument("not a decimal number: " + s);
  }
}

Real& Real::operator+=(const Real& o) {
  if (o.precision() > precision()) mpfr_prec_round(v_, o.precision(), MPFR_RNDN);
  mpfr_add(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

Real& Real::operator-=(const Real& o) {
  if (o.precision() > precision()) mpfr_prec_round(v_, o.precision(), MPFR_RNDN);
  mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

Real& Real::operator*=(const Real& o) {
  if (o.precision() > precision()) mpfr_prec_round(v_, o.precision(), MPFR_RNDN);
  mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

Real& Real::operator/=(const Real& o) {
  if (o.precision() > precision()) mpfr_prec_round(v_, o.precision(), MPFR_RNDN);
  mpfr_div(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

Real Real::operator-() const {
  Real r(Uninit{}, precision());
  mpfr_neg(r.v_, v_, MPFR_RNDN);
  return r;
}

long Real::exponent() const {
  if (mpfr_zero_p(v_)) return -(1L << 40);
  return mpfr_get_exp(v_);
}

mpz_class Real::round_to_integer() const {
  if (!is_finite()) throw std::domain_error("round_to_integer: non-finite value");
  mpz_class z;
  mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDN);
  return z;
}

std::string Real::to_string(int digits) const {
  char* buf = nullptr;
  std::string fmt = "%." + std::to_string(digits) + "Rg";
  mpfr_asprintf(&buf, fmt.c_str(), v_);
  std::string s(buf);
  mpfr_free_str(buf);
  return s;
}

Real operator+(const Real& a, const Real& b) {
  Real r(Real::Uninit{}, join(a, b));
  mpfr_add(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}

Real operator-(const Real& a, const Real& b) {
  Real r(Real::Uninit{}, join(a, b));
  mpfr_sub(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}

Real operator*(const Real& a, const Real& b) {
  Real r(Real::Uninit{}, join(a, b));
  mpfr_mul(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}

Real operator/(const Real& a, const Real& b) {
  Real r(Real::Uninit{}, join(a, b));
  mpfr_div(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}

Real operator*(const Real& a, long b) {
  Real r(Real::Uninit{}, a.precision());
  mpfr_mul_si(r.get(), a.get(), b, MPFR_RNDN);
  return r;
}

Real operator/(const Real& a, long b) {
  Real r(Real::Uninit{}, a.precision());
  mpfr_div_si(r.get(), a.get(), b, MPFR_RNDN);
  return r;
}

bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.get(), b.get()) != 0; }
bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.get(), b.get()) != 0; }
bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.get(), b.get()) != 0; }
bool operator>=(const Real& a, const Real& b) { return mpfr_greaterequal_p(a.get(), b.get()) != 0; }
bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.get(), b.get()) != 0; }
bool operator!=(const Real& a, const Real& b) { return !(a == b); }

#define MODGAL_UNARY(name, fn)                     \
  Real name(const Real& x) {                       \
    Real r(Real::Uninit{}, x.precision());         \
    fn(r.get(), x.get(), MPFR_RNDN);               \
    return r;                                      \
  }

MODGAL_UNARY(abs, mpfr_abs)
MODGAL_UNARY(sqrt, mpfr_sqrt)
MODGAL_UNARY(exp, mpfr_exp)
MODGAL_UNARY(log, mpfr_log)
MODGAL_UNARY(sin, mpfr_sin)
MODGAL_UNARY(cos, mpfr_cos)
#undef MODGAL_UNARY

Real floor(const Real& x) {
  Real r(Real::Uninit{}, x.precision());
  mpfr_floor(r.get(), x.get());
  return r;
}

Real atan2(const Real& y, const Real& x) {
  Real r(Real::Uninit{}, join(x, y));
  mpfr_atan2(r.get(), y.get(), x.get(), MPFR_RNDN);
  return r;
}

Real pow(const Real& x, long n) {
  Real r(Real::Uninit{}, x.precision());
  mpfr_pow_si(r.get(), x.get(), n, MPFR_RNDN);
  return r;
}

Real ldexp(const Real& x, long e) {
  Real r(Real::Uninit{}, x.precision());
  if (e >= 0)
    mpfr_mul_2ui(r.get(), x.get(), static_cast<unsigned long>(e), MPFR_RNDN);
  else
    mpfr_div_2ui(r.get(), x.get(), static_cast<unsigned long>(-e), MPFR_RNDN);
  return r;
}

Real pi(Bits prec) {
  Real r(Real::Uninit{}, prec);
  mpfr_const_pi(r.get(), MPFR_RNDN);
  return r;
}

Real two_pow(long e, Bits prec) {
  Real r(Real::Uninit{}, prec);
  mpfr_set_ui_2exp(r.get(), 1, -e, MPFR_RNDN);
  return r;
}

Real max(const Real& a, const Real& b) { return a < b ? b : a; }
Real min(const Real& a, const Real& b) { return b < a ? b : a; }

std::ostream& operator<<(std::ostream& os, const Real& x) { return os << x.to_string(20); }

Complex& Complex::operator+=(const Complex& o) {
  re_ += o.re_;
  im_ += o.im_;
  return *this;
}

Complex& Complex::operator-=(const Complex& o) {
  re_ -= o.re_;
  im_ -= o.im_;
  return *this;
}

Complex& Complex::operator*=(const Complex& o) {
  *this = *this * o;
  return *this;
}

Complex& Complex::operator/=(const Complex& o) {
  *this = *this / o;
  return *this;
}

Complex& Complex::operator*=(const Real& o) {
  re_ *= o;
  im_ *= o;
  return *this;
}

Complex operator+(const Complex& a, const Complex& b) { return {a.real() + b.real(), a.imag() + b.imag()}; }
Complex operator-(const Complex& a, const Complex& b) { return {a.real() - b.real(), a.imag() - b.imag()}; }

Complex operator*(const Complex& a, const Complex& b) {
  Bits p = std::max(a.precision(), b.precision());
  Real re(Real::Uninit{}, p), im(Real::Uninit{}, p);
  mpfr_fmms(re.get(), a.real().get(), b.real().get(), a.imag().get(), b.imag().get(), MPFR_RNDN);
  mpfr_fmma(im.get(), a.real().get(), b.imag().get(), a.imag().get(), b.real().get(), MPFR_RNDN);
  return {std::move(re), std::move(im)};
}

Complex operator/(const Complex& a, const Complex& b) {
  // Smith's scaling is unnecessary with MPFR's exponent range.
  Bits p = std::max(a.precision(), b.precision());
  Real den(Real::Uninit{}, p);
  mpfr_fmma(den.get(), b.real().get(), b.real().get(), b.imag().get(), b.imag().get(), MPFR_RNDN);
  Real re(Real::Uninit{}, p), im(Real::Uninit{}, p);
  mpfr_fmma(re.get(), a.real().get(), b.real().get(), a.imag().get(), b.imag().get(), MPFR_RNDN);
  mpfr_fmms(im.get(), a.imag().get(), b.real().get(), a.real().get(), b.imag().get(), MPFR_RNDN);
  mpfr_div(re.get(), re.get(), den.get(), MPFR_RNDN);
  mpfr_div(im.get(), im.get(), den.get(), MPFR_RNDN);
  return {std::move(re), std::move(im)};
}

Complex operator*(const Complex& a, const Real& b) { return {a.real() * b, a.imag() * b}; }
Complex operator*(const Real& a, const Complex& b) { return {a * b.real(), a * b.imag()}; }
Complex operator/(const Complex& a, const Real& b) { return {a.real() / b, a.imag() / b}; }
Complex operator*(const Complex& a, long b) { return {a.real() * b, a.imag() * b}; }
Complex operator/(const Complex& a, long b) { return {a.real() / b, a.imag() / b}; }
bool operator==(const Complex& a, const Complex& b) { return a.real() == b.real() && a.imag() == b.imag(); }
bool operator!=(const Complex& a, const Complex& b) { return !(a == b); }

Real abs2(const Complex& z) {
  Real r(Real::Uninit{}, z.precision());
  mpfr_fmma(r.get(), z.real().get(), z.real().get(), z.imag().get(), z.imag().get(), MPFR_RNDN);
  return r;
}

Real abs(const Complex& z) {
  Real r(Real::Uninit{}, z.precision());
  mpfr_hypot(r.get(), z.real().get(), z.imag().get(), MPFR_RNDN);
  return r;
}

Real arg(const Complex& z) { return atan2(z.imag(), z.real()); }

Complex sqrt(const Complex& z) {
  Real r = abs(z);
  if (r.is_zero()) return Complex::zero(z.precision());
  // Principal branch, computed without cancellation.
  Real t = sqrt((r + abs(z.real())) / 2L);
  if (z.real().sign() >= 0) return {t, z.imag() / (t * 2L)};
  Real im = z.imag().sign() >= 0 ? t : -t;
  return {abs(z.imag()) / (t * 2L), im};
}

Complex exp(const Complex& z) { return polar(exp(z.real()), z.imag()); }

Complex log(const Complex& z) { return {log(abs(z)), arg(z)}; }

Complex pow(const Complex& z, long n) {
  if (n < 0) return Complex(Real::from(1L, z.precision())) / pow(z, -n);
  Complex result(Real::from(1L, z.precision()));
  Complex base = z;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n) base = base * base;
  }
  return result;
}

Complex polar(const Real& r, const Real& theta) {
  Real s(Real::Uninit{}, theta.precision()), c(Real::Uninit{}, theta.precision());
  mpfr_sin_cos(s.get(), c.get(), theta.get(), MPFR_RNDN);
  return {r * c, r * s};
}

Complex root_of_unity(long k, long n, Bits prec) {
  k %= n;
  if (k < 0) k += n;
  if (k == 0) return Complex(Real::from(1L, prec));
  if (2 * k == n) return Complex(Real::from(-1L, prec));
  Real theta = pi(prec + 16) * (2 * k) / n;
  return polar(Real::from(1L, prec), theta).at(prec);
}

Complex e2pi(const Complex& z) {
  Bits p = z.precision();
  Real twopi = pi(p) * 2L;
  return polar(exp(-(twopi * z.imag())), twopi * z.real());
}

Complex i_unit(Bits prec) { return {Real::zero(prec), Real::from(1L, prec)}; }

std::ostream& operator<<(std::ostream& os, const Complex& z) {
  return os << "(" << z.real() << ", " << z.imag() << ")";
}

std::string to_hex(const Real& x) {
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%Ra", x.get());
  std::string s(buf);
  mpfr_free_str(buf);
  return s;
}

Real from_hex(const std::string& s, Bits prec) {
  Real r = Real::zero(prec);
  if (mpfr_set_str(r.get(), s.c_str(), 0, MPFR_RNDN) != 0) throw std::invalid_argument("bad number " + s);
  return r;
}

}  // namespace modgal::mp
