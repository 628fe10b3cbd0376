#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "modgal/arith.hpp"
#include "modgal/mp.hpp"

namespace modgal {

struct RationalField {
  using value_type = mpq_class;
  value_type zero() const { return 0; }
  value_type one() const { return 1; }
  value_type from_int(long x) const { return x; }
  value_type add(const value_type& a, const value_type& b) const { return a + b; }
  value_type sub(const value_type& a, const value_type& b) const { return a - b; }
  value_type mul(const value_type& a, const value_type& b) const { return a * b; }
  value_type div(const value_type& a, const value_type& b) const { return a / b; }
  value_type neg(const value_type& a) const { return -a; }
  bool is_zero(const value_type& a) const { return sgn(a) == 0; }
};

struct PrimeField {
  using value_type = std::uint64_t;
  std::uint64_t p = 2;
  value_type zero() const { return 0; }
  value_type one() const { return 1 % p; }
  value_type from_int(long x) const { return arith::reduce(x, p); }
  value_type add(value_type a, value_type b) const { return a + b >= p ? a + b - p : a + b; }
  value_type sub(value_type a, value_type b) const { return a >= b ? a - b : a + p - b; }
  value_type mul(value_type a, value_type b) const { return arith::mulmod(a, b, p); }
  value_type div(value_type a, value_type b) const { return arith::mulmod(a, arith::invmod(b, p), p); }
  value_type neg(value_type a) const { return a ? p - a : 0; }
  bool is_zero(value_type a) const { return a == 0; }
};

// Element of Q(zeta_m) in the power basis 1, zeta, ..., zeta^(phi(m)-1).
struct Cyclo {
  std::vector<mpq_class> c;
};

class CycloField {
 public:
  using value_type = Cyclo;

  CycloField() = default;
  explicit CycloField(int m);

  int m() const { return m_; }
  int degree() const { return static_cast<int>(phi_.size()) - 1; }
  // Monic Phi_m, lowest coefficient first.
  const std::vector<mpz_class>& modulus() const { return phi_; }

  value_type zero() const { return Cyclo{std::vector<mpq_class>(static_cast<std::size_t>(degree()), 0)}; }
  value_type one() const { return from_int(1); }
  value_type from_int(long x) const;
  value_type from_rational(const mpq_class& x) const;
  // zeta^k for any integer k.
  value_type zeta_pow(long k) const;
  value_type add(const value_type& a, const value_type& b) const;
  value_type sub(const value_type& a, const value_type& b) const;
  value_type mul(const value_type& a, const value_type& b) const;
  value_type div(const value_type& a, const value_type& b) const;
  value_type neg(const value_type& a) const;
  value_type inv(const value_type& a) const;
  bool is_zero(const value_type& a) const;
  value_type conj(const value_type& a) const;  // zeta -> zeta^-1

  // Embedding zeta -> exp(2 pi i k / m), gcd(k, m) = 1.
  mp::Complex embed(const value_type& a, int k, mp::Bits prec) const;
  // Reduction modulo the prime (p, zeta - root).
  std::uint64_t reduce(const value_type& a, std::uint64_t p, std::uint64_t root) const;
  // Common denominator of the coefficients.
  mpz_class denominator(const value_type& a) const;
  std::string to_string(const value_type& a) const;

 private:
  int m_ = 1;
  std::vector<mpz_class> phi_;
  std::vector<std::vector<mpq_class>> zeta_powers_;  // zeta^k reduced, k < m
};

std::vector<mpz_class> cyclotomic_polynomial(int m);
int euler_phi(int m);

template <class F>
struct ExactMatrix {
  using value_type = typename F::value_type;
  F field;
  std::size_t rows = 0, cols = 0;
  std::vector<value_type> data;

  ExactMatrix() = default;
  ExactMatrix(F f, std::size_t r, std::size_t c) : field(f), rows(r), cols(c), data(r * c, f.zero()) {}
  static ExactMatrix identity(F f, std::size_t n) {
    ExactMatrix m(f, n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = f.one();
    return m;
  }

  value_type& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const value_type& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  ExactMatrix transpose() const {
    ExactMatrix t(field, cols, rows);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
    return t;
  }
};

template <class F>
ExactMatrix<F> operator*(const ExactMatrix<F>& a, const ExactMatrix<F>& b) {
  if (a.cols != b.rows) throw std::invalid_argument("matrix product: shape mismatch");
  const F& f = a.field;
  ExactMatrix<F> c(f, a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      if (f.is_zero(a(i, k))) continue;
      for (std::size_t j = 0; j < b.cols; ++j) c(i, j) = f.add(c(i, j), f.mul(a(i, k), b(k, j)));
    }
  return c;
}

template <class F>
ExactMatrix<F> operator+(const ExactMatrix<F>& a, const ExactMatrix<F>& b) {
  ExactMatrix<F> c = a;
  for (std::size_t i = 0; i < c.data.size(); ++i) c.data[i] = a.field.add(a.data[i], b.data[i]);
  return c;
}

template <class F>
ExactMatrix<F> operator-(const ExactMatrix<F>& a, const ExactMatrix<F>& b) {
  ExactMatrix<F> c = a;
  for (std::size_t i = 0; i < c.data.size(); ++i) c.data[i] = a.field.sub(a.data[i], b.data[i]);
  return c;
}

template <class F>
ExactMatrix<F> scaled(const ExactMatrix<F>& a, const typename F::value_type& s) {
  ExactMatrix<F> c = a;
  for (auto& x : c.data) x = a.field.mul(s, x);
  return c;
}

template <class F>
bool operator==(const ExactMatrix<F>& a, const ExactMatrix<F>& b) {
  if (a.rows != b.rows || a.cols != b.cols) return false;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    if (!a.field.is_zero(a.field.sub(a.data[i], b.data[i]))) return false;
  return true;
}

// Reduced row echelon form in place; returns pivot columns.
template <class F>
std::vector<std::size_t> rref(ExactMatrix<F>& m) {
  const F& f = m.field;
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols && r < m.rows; ++c) {
    std::size_t piv = r;
    while (piv < m.rows && f.is_zero(m(piv, c))) ++piv;
    if (piv == m.rows) continue;
    if (piv != r)
      for (std::size_t j = 0; j < m.cols; ++j) std::swap(m(piv, j), m(r, j));
    auto inv = f.div(f.one(), m(r, c));
    for (std::size_t j = c; j < m.cols; ++j) m(r, j) = f.mul(m(r, j), inv);
    for (std::size_t i = 0; i < m.rows; ++i) {
      if (i == r || f.is_zero(m(i, c))) continue;
      auto factor = m(i, c);
      for (std::size_t j = c; j < m.cols; ++j) m(i, j) = f.sub(m(i, j), f.mul(factor, m(r, j)));
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

template <class F>
std::size_t rank(ExactMatrix<F> m) {
  return rref(m).size();
}

// Basis of the right kernel, as columns.
template <class F>
ExactMatrix<F> kernel(ExactMatrix<F> m) {
  const F& f = m.field;
  auto piv = rref(m);
  std::vector<bool> is_piv(m.cols, false);
  for (auto c : piv) is_piv[c] = true;
  std::vector<std::size_t> free_cols;
  for (std::size_t c = 0; c < m.cols; ++c)
    if (!is_piv[c]) free_cols.push_back(c);
  ExactMatrix<F> k(f, m.cols, free_cols.size());
  for (std::size_t t = 0; t < free_cols.size(); ++t) {
    k(free_cols[t], t) = f.one();
    for (std::size_t i = 0; i < piv.size(); ++i) k(piv[i], t) = f.neg(m(i, free_cols[t]));
  }
  return k;
}

// Solves A X = B; throws if inconsistent.  Free variables are set to zero.
template <class F>
ExactMatrix<F> solve(const ExactMatrix<F>& a, const ExactMatrix<F>& b) {
  const F& f = a.field;
  ExactMatrix<F> aug(f, a.rows, a.cols + b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < a.cols; ++j) aug(i, j) = a(i, j);
    for (std::size_t j = 0; j < b.cols; ++j) aug(i, a.cols + j) = b(i, j);
  }
  auto piv = rref(aug);
  ExactMatrix<F> x(f, a.cols, b.cols);
  for (std::size_t i = 0; i < piv.size(); ++i) {
    if (piv[i] >= a.cols) throw std::domain_error("solve: inconsistent system");
    for (std::size_t j = 0; j < b.cols; ++j) x(piv[i], j) = aug(i, a.cols + j);
  }
  return x;
}

template <class F>
ExactMatrix<F> inverse(const ExactMatrix<F>& a) {
  auto x = solve(a, ExactMatrix<F>::identity(a.field, a.rows));
  if (rank(a) != a.rows) throw std::domain_error("inverse: singular matrix");
  return x;
}

// Characteristic polynomial det(X - A), lowest coefficient first, via the
// Hessenberg form.
template <class F>
std::vector<typename F::value_type> charpoly(ExactMatrix<F> h) {
  const F& f = h.field;
  const std::size_t n = h.rows;
  for (std::size_t k = 0; k + 2 <= n; ++k) {
    std::size_t piv = k + 1;
    while (piv < n && f.is_zero(h(piv, k))) ++piv;
    if (piv == n) continue;
    if (piv != k + 1) {
      for (std::size_t j = 0; j < n; ++j) std::swap(h(piv, j), h(k + 1, j));
      for (std::size_t i = 0; i < n; ++i) std::swap(h(i, piv), h(i, k + 1));
    }
    for (std::size_t i = k + 2; i < n; ++i) {
      if (f.is_zero(h(i, k))) continue;
      auto t = f.div(h(i, k), h(k + 1, k));
      for (std::size_t j = 0; j < n; ++j) h(i, j) = f.sub(h(i, j), f.mul(t, h(k + 1, j)));
      for (std::size_t r = 0; r < n; ++r) h(r, k + 1) = f.add(h(r, k + 1), f.mul(t, h(r, i)));
    }
  }
  // p_0 = 1, p_{k+1} = (X - h_kk) p_k - sum_{i<k} h_ik (prod h_{j+1,j}) p_i
  std::vector<std::vector<typename F::value_type>> p(n + 1);
  p[0] = {f.one()};
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<typename F::value_type> next(k + 2, f.zero());
    for (std::size_t d = 0; d <= k; ++d) {
      next[d + 1] = f.add(next[d + 1], p[k][d]);
      next[d] = f.sub(next[d], f.mul(h(k, k), p[k][d]));
    }
    auto prod = f.one();
    for (std::size_t i = k; i-- > 0;) {
      prod = f.mul(prod, h(i + 1, i));
      auto coef = f.mul(h(i, k), prod);
      if (f.is_zero(coef)) continue;
      for (std::size_t d = 0; d < p[i].size(); ++d) next[d] = f.sub(next[d], f.mul(coef, p[i][d]));
    }
    p[k + 1] = std::move(next);
  }
  return p[n];
}

// Polynomial helpers over a field, lowest coefficient first.
template <class F>
void poly_trim(const F& f, std::vector<typename F::value_type>& a) {
  while (!a.empty() && f.is_zero(a.back())) a.pop_back();
}

template <class F>
std::vector<typename F::value_type> poly_rem(const F& f, std::vector<typename F::value_type> a,
                                             std::vector<typename F::value_type> b) {
  poly_trim(f, a);
  poly_trim(f, b);
  if (b.empty()) throw std::domain_error("poly_rem: division by zero");
  auto lead_inv = f.div(f.one(), b.back());
  while (a.size() >= b.size()) {
    auto t = f.mul(a.back(), lead_inv);
    std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] = f.sub(a[shift + i], f.mul(t, b[i]));
    a.pop_back();
    poly_trim(f, a);
  }
  return a;
}

template <class F>
std::vector<typename F::value_type> poly_gcd(const F& f, std::vector<typename F::value_type> a,
                                             std::vector<typename F::value_type> b) {
  poly_trim(f, a);
  poly_trim(f, b);
  while (!b.empty()) {
    auto r = poly_rem(f, a, b);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    auto inv = f.div(f.one(), a.back());
    for (auto& x : a) x = f.mul(x, inv);
  }
  return a;
}

template <class F>
std::vector<typename F::value_type> poly_derivative(const F& f, const std::vector<typename F::value_type>& a) {
  std::vector<typename F::value_type> d;
  for (std::size_t i = 1; i < a.size(); ++i) d.push_back(f.mul(f.from_int(static_cast<long>(i)), a[i]));
  return d;
}

// Evaluates a polynomial matrix expression sum_k c_k A^k.
template <class F>
ExactMatrix<F> poly_of_matrix(const std::vector<typename F::value_type>& c, const ExactMatrix<F>& a) {
  const F& f = a.field;
  ExactMatrix<F> result(f, a.rows, a.cols);
  for (std::size_t k = c.size(); k-- > 0;) {
    result = result * a;
    for (std::size_t i = 0; i < a.rows; ++i) result(i, i) = f.add(result(i, i), c[k]);
  }
  return result;
}

using QMatrix = ExactMatrix<RationalField>;
using FpMatrix = ExactMatrix<PrimeField>;
using KMatrix = ExactMatrix<CycloField>;

}  // namespace modgal
