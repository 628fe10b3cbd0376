#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "modgal/arith.hpp"
#include "modgal/errors.hpp"
#include "modgal/mp.hpp"
#include "modgal/ntt.hpp"

namespace modgal {

struct ModRing {
  using value_type = std::uint64_t;
  std::uint64_t p = 2;

  value_type zero() const { return 0; }
  value_type one() const { return 1 % p; }
  value_type from_int(long x) const { return arith::reduce(x, p); }
  value_type add(value_type a, value_type b) const { return a + b >= p ? a + b - p : a + b; }
  value_type sub(value_type a, value_type b) const { return a >= b ? a - b : a + p - b; }
  value_type neg(value_type a) const { return a ? p - a : 0; }
  value_type mul(value_type a, value_type b) const { return arith::mulmod(a, b, p); }
  value_type inv(value_type a) const { return arith::invmod(a, p); }
  bool is_zero(value_type a) const { return a == 0; }
  bool is_unit(value_type a) const { return a != 0; }
  std::string name() const { return "mod-" + std::to_string(p); }
};

struct IntegerRing {
  using value_type = mpz_class;
  value_type zero() const { return 0; }
  value_type one() const { return 1; }
  value_type from_int(long x) const { return x; }
  value_type add(const value_type& a, const value_type& b) const { return a + b; }
  value_type sub(const value_type& a, const value_type& b) const { return a - b; }
  value_type neg(const value_type& a) const { return -a; }
  value_type mul(const value_type& a, const value_type& b) const { return a * b; }
  value_type inv(const value_type& a) const {
    if (a == 1 || a == -1) return a;
    throw std::domain_error("integer series: non-unit inversion");
  }
  bool is_zero(const value_type& a) const { return a == 0; }
  bool is_unit(const value_type& a) const { return a == 1 || a == -1; }
  std::string name() const { return "integer"; }
};

struct ComplexRing {
  using value_type = mp::Complex;
  mp::Bits prec = 128;
  value_type zero() const { return mp::Complex::zero(prec); }
  value_type one() const { return mp::Complex(mp::Real::from(1L, prec)); }
  value_type from_int(long x) const { return mp::Complex(mp::Real::from(x, prec)); }
  value_type add(const value_type& a, const value_type& b) const { return a + b; }
  value_type sub(const value_type& a, const value_type& b) const { return a - b; }
  value_type neg(const value_type& a) const { return -a; }
  value_type mul(const value_type& a, const value_type& b) const { return a * b; }
  value_type inv(const value_type& a) const { return one() / a; }
  // Valuations over this ring treat values below 2^(-prec/2) as zero.
  bool is_zero(const value_type& a) const {
    return a.is_zero() || mp::abs(a) < mp::two_pow(static_cast<long>(prec / 2), 64);
  }
  bool is_unit(const value_type& a) const { return !is_zero(a); }
  std::string name() const { return "complex-" + std::to_string(prec); }
};

// Truncated power series sum c_n q^n + O(q^trunc) over a ring policy R.
template <class R>
class PowerSeries {
 public:
  using Ring = R;
  using value_type = typename R::value_type;

  PowerSeries() = default;
  PowerSeries(R ring, std::size_t trunc) : ring_(ring), c_(trunc, ring.zero()) {}
  PowerSeries(R ring, std::vector<value_type> coeffs) : ring_(ring), c_(std::move(coeffs)) {}

  static PowerSeries monomial(R ring, std::size_t n, std::size_t trunc) {
    PowerSeries s(ring, trunc);
    if (n < trunc) s.c_[n] = ring.one();
    return s;
  }
  static PowerSeries constant(R ring, const value_type& v, std::size_t trunc) {
    PowerSeries s(ring, trunc);
    if (trunc) s.c_[0] = v;
    return s;
  }

  const R& ring() const { return ring_; }
  std::size_t trunc() const { return c_.size(); }
  const std::vector<value_type>& coeffs() const { return c_; }
  std::vector<value_type>& coeffs() { return c_; }
  const value_type& operator[](std::size_t n) const { return c_[n]; }
  value_type& operator[](std::size_t n) { return c_[n]; }

  // Smallest n with a nonzero coefficient; trunc() if the series is O(q^trunc).
  std::size_t valuation() const {
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (!ring_.is_zero(c_[i])) return i;
    return c_.size();
  }

  PowerSeries truncated(std::size_t n) const {
    PowerSeries s(ring_, n);
    for (std::size_t i = 0; i < std::min(n, c_.size()); ++i) s.c_[i] = c_[i];
    return s;
  }

  // Zero-padded to n terms: only meaningful for polynomial inputs.
  PowerSeries padded(std::size_t n) const { return truncated(n); }

  // Multiplication by q^k (k may be negative when the low terms vanish).
  PowerSeries shifted(long k) const {
    PowerSeries s(ring_, static_cast<std::size_t>(std::max<long>(0, static_cast<long>(c_.size()) + k)));
    for (std::size_t i = 0; i < c_.size(); ++i) {
      long j = static_cast<long>(i) + k;
      if (j < 0) {
        if (!ring_.is_zero(c_[i])) throw std::domain_error("series shift drops a nonzero term");
        continue;
      }
      s.c_[static_cast<std::size_t>(j)] = c_[i];
    }
    return s;
  }

  PowerSeries operator-() const {
    PowerSeries s(ring_, c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) s.c_[i] = ring_.neg(c_[i]);
    return s;
  }

  PowerSeries scaled(const value_type& a) const {
    PowerSeries s(ring_, c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) s.c_[i] = ring_.mul(a, c_[i]);
    return s;
  }

  // q d/dq
  PowerSeries theta() const {
    PowerSeries s(ring_, c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) s.c_[i] = ring_.mul(ring_.from_int(static_cast<long>(i)), c_[i]);
    return s;
  }

 private:
  R ring_{};
  std::vector<value_type> c_;
};

template <class R>
PowerSeries<R> operator+(const PowerSeries<R>& a, const PowerSeries<R>& b) {
  const std::size_t n = std::min(a.trunc(), b.trunc());
  PowerSeries<R> s(a.ring(), n);
  for (std::size_t i = 0; i < n; ++i) s[i] = a.ring().add(a[i], b[i]);
  return s;
}

template <class R>
PowerSeries<R> operator-(const PowerSeries<R>& a, const PowerSeries<R>& b) {
  const std::size_t n = std::min(a.trunc(), b.trunc());
  PowerSeries<R> s(a.ring(), n);
  for (std::size_t i = 0; i < n; ++i) s[i] = a.ring().sub(a[i], b[i]);
  return s;
}

template <class R>
PowerSeries<R> mul_trunc(const PowerSeries<R>& a, const PowerSeries<R>& b, std::size_t n) {
  const R& ring = a.ring();
  PowerSeries<R> s(ring, n);
  for (std::size_t i = 0; i < std::min(n, a.trunc()); ++i) {
    if (ring.is_zero(a[i])) continue;
    for (std::size_t j = 0; j < b.trunc() && i + j < n; ++j) s[i + j] = ring.add(s[i + j], ring.mul(a[i], b[j]));
  }
  return s;
}

inline PowerSeries<ModRing> mul_trunc(const PowerSeries<ModRing>& a, const PowerSeries<ModRing>& b, std::size_t n) {
  return PowerSeries<ModRing>(a.ring(), ntt::multiply(a.coeffs(), b.coeffs(), a.ring().p, n));
}

template <class R>
PowerSeries<R> operator*(const PowerSeries<R>& a, const PowerSeries<R>& b) {
  return mul_trunc(a, b, std::min(a.trunc(), b.trunc()));
}

// Multiplicative inverse by Newton iteration; the constant term must be a unit.
template <class R>
PowerSeries<R> inverse(const PowerSeries<R>& a) {
  const R& ring = a.ring();
  const std::size_t n = a.trunc();
  if (n == 0) return a;
  if (!ring.is_unit(a[0])) throw std::domain_error("series inverse: constant term is not a unit");
  PowerSeries<R> x = PowerSeries<R>::constant(ring, ring.inv(a[0]), 1);
  std::size_t k = 1;
  while (k < n) {
    k = std::min(2 * k, n);
    // x <- x (2 - a x)
    PowerSeries<R> ax = mul_trunc(a.truncated(k), x.padded(k), k);
    PowerSeries<R> two_minus = -ax;
    two_minus[0] = ring.add(two_minus[0], ring.from_int(2));
    x = mul_trunc(x.padded(k), two_minus, k);
  }
  return x;
}

template <class R>
PowerSeries<R> pow(const PowerSeries<R>& a, unsigned long e) {
  PowerSeries<R> r = PowerSeries<R>::constant(a.ring(), a.ring().one(), a.trunc());
  PowerSeries<R> b = a;
  while (e) {
    if (e & 1) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}

// Phi(U, V) = sum_j P_j(U) V^j with coefficient c[j][i] of U^i V^j.
template <class R>
struct Bivariate {
  R ring;
  std::vector<std::vector<typename R::value_type>> c;

  std::size_t deg_v() const { return c.empty() ? 0 : c.size() - 1; }
  std::size_t deg_u() const {
    std::size_t d = 0;
    for (const auto& row : c) {
      for (std::size_t i = row.size(); i-- > 0;)
        if (!ring.is_zero(row[i])) {
          d = std::max(d, i);
          break;
        }
    }
    return d;
  }
};

namespace detail {

template <class R>
std::vector<PowerSeries<R>> v_coefficients(const Bivariate<R>& phi, const PowerSeries<R>& u, std::size_t n) {
  const R& ring = u.ring();
  std::size_t du = phi.deg_u();
  std::vector<PowerSeries<R>> upow;
  upow.push_back(PowerSeries<R>::constant(ring, ring.one(), n));
  PowerSeries<R> ut = u.truncated(n);
  for (std::size_t i = 1; i <= du; ++i) upow.push_back(upow.back() * ut);
  std::vector<PowerSeries<R>> out;
  for (const auto& row : phi.c) {
    PowerSeries<R> s(ring, n);
    for (std::size_t i = 0; i < row.size() && i <= du; ++i) {
      if (ring.is_zero(row[i])) continue;
      for (std::size_t t = 0; t < n; ++t) s[t] = ring.add(s[t], ring.mul(row[i], upow[i][t]));
    }
    out.push_back(std::move(s));
  }
  return out;
}

template <class R>
std::pair<PowerSeries<R>, PowerSeries<R>> eval_with_derivative(const std::vector<PowerSeries<R>>& pj,
                                                               const PowerSeries<R>& v, std::size_t n) {
  const R& ring = v.ring();
  PowerSeries<R> val(ring, n), der(ring, n);
  PowerSeries<R> vt = v.padded(n);
  for (std::size_t j = pj.size(); j-- > 0;) {
    // Horner for Phi and dPhi/dV simultaneously.
    der = der * vt + val;
    val = val * vt + pj[j].truncated(n);
  }
  return {val, der};
}

}  // namespace detail

template <class R>
PowerSeries<R> evaluate(const Bivariate<R>& phi, const PowerSeries<R>& u, const PowerSeries<R>& v) {
  std::size_t n = std::min(u.trunc(), v.trunc());
  auto pj = detail::v_coefficients(phi, u, n);
  return detail::eval_with_derivative(pj, v, n).first;
}

// Newton lifting of a root v of Phi(u, V) from the seed v0 (correct modulo
// q^trunc(v0)) up to O(q^B).  The derivative dPhi/dV(u, v) may have positive
// valuation delta; each step then takes the precision N to 2N - delta, so the
// seed must satisfy trunc(v0) > delta and u must be known to O(q^(B+delta)).
template <class R>
PowerSeries<R> series_newton_root(const Bivariate<R>& phi, const PowerSeries<R>& u, const PowerSeries<R>& v0,
                                  std::size_t B) {
  const R& ring = u.ring();
  std::size_t n = v0.trunc();
  if (u.trunc() < B) throw std::invalid_argument("series_newton_root: u is shorter than the target order");
  if (n == 0) throw std::invalid_argument("series_newton_root: empty seed");
  if (n >= B) return v0.truncated(B);
  auto pj = detail::v_coefficients(phi, u, std::min(u.trunc(), B + n));
  auto [val0, der0] = detail::eval_with_derivative(pj, v0, n);
  std::size_t delta = der0.valuation();
  if (delta >= n) throw PrecisionError("singular lift: dPhi/dV vanishes to the seed order");
  // the last step reads Phi to order B + delta
  if (u.trunc() < B + delta) throw std::invalid_argument("series_newton_root: u must extend delta terms past B");
  auto check = detail::eval_with_derivative(pj, v0, std::min(B, n + delta)).first;
  if (check.valuation() < check.trunc()) throw PrecisionError("bad seed: Phi(u, v0) does not vanish to the seed order");
  PowerSeries<R> v = v0;
  while (n < B) {
    std::size_t next = std::min(2 * n - delta, B);
    std::size_t work = next + delta;
    auto [val, der] = detail::eval_with_derivative(pj, v, work);
    if (val.valuation() < n + delta) throw PrecisionError("bad seed: residual lost precision during lifting");
    PowerSeries<R> num = val.shifted(-static_cast<long>(delta)).truncated(next);
    PowerSeries<R> den = der.shifted(-static_cast<long>(delta)).truncated(next);
    PowerSeries<R> corr = num * inverse(den);
    v = v.padded(next) - corr;
    n = next;
  }
  return v;
}

}  // namespace modgal
