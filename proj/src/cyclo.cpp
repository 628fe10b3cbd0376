#include <numeric>
#include <sstream>

#include "modgal/exact.hpp"

namespace modgal {

int euler_phi(int m) {
  int r = m;
  for (auto [p, e] : arith::factor(static_cast<arith::u64>(m))) r = r / static_cast<int>(p) * (static_cast<int>(p) - 1);
  return r;
}

std::vector<mpz_class> cyclotomic_polynomial(int m) {
  // x^m - 1 divided by Phi_d for every proper divisor d.
  std::vector<mpz_class> num(static_cast<std::size_t>(m) + 1, 0);
  num[0] = -1;
  num[static_cast<std::size_t>(m)] = 1;
  for (int d = 1; d < m; ++d) {
    if (m % d) continue;
    auto den = cyclotomic_polynomial(d);
    std::vector<mpz_class> quo(num.size() - den.size() + 1, 0);
    const long ld = static_cast<long>(den.size());
    for (long i = static_cast<long>(num.size()) - 1; i >= ld - 1; --i) {
      mpz_class t = num[static_cast<std::size_t>(i)];  // den is monic
      quo[static_cast<std::size_t>(i - ld + 1)] = t;
      for (long j = 0; j < ld; ++j) num[static_cast<std::size_t>(i - ld + 1 + j)] -= t * den[static_cast<std::size_t>(j)];
    }
    num = quo;
  }
  return num;
}

CycloField::CycloField(int m) : m_(m), phi_(cyclotomic_polynomial(m)) {
  const int n = degree();
  std::vector<mpq_class> cur(static_cast<std::size_t>(n), 0);
  cur[0] = 1;
  for (int k = 0; k < m; ++k) {
    zeta_powers_.push_back(cur);
    // multiply by zeta and reduce with the monic modulus
    std::vector<mpq_class> next(static_cast<std::size_t>(n), 0);
    mpq_class top = cur[static_cast<std::size_t>(n - 1)];
    for (int i = n - 1; i > 0; --i) next[static_cast<std::size_t>(i)] = cur[static_cast<std::size_t>(i - 1)];
    for (int i = 0; i < n; ++i) next[static_cast<std::size_t>(i)] -= top * mpq_class(phi_[static_cast<std::size_t>(i)]);
    cur = next;
  }
}

Cyclo CycloField::from_int(long x) const { return from_rational(mpq_class(x)); }

Cyclo CycloField::from_rational(const mpq_class& x) const {
  Cyclo z = zero();
  z.c[0] = x;
  return z;
}

Cyclo CycloField::zeta_pow(long k) const {
  long r = ((k % m_) + m_) % m_;
  return Cyclo{zeta_powers_[static_cast<std::size_t>(r)]};
}

Cyclo CycloField::add(const Cyclo& a, const Cyclo& b) const {
  Cyclo r = a;
  for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] += b.c[i];
  return r;
}

Cyclo CycloField::sub(const Cyclo& a, const Cyclo& b) const {
  Cyclo r = a;
  for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] -= b.c[i];
  return r;
}

Cyclo CycloField::neg(const Cyclo& a) const {
  Cyclo r = a;
  for (auto& x : r.c) x = -x;
  return r;
}

Cyclo CycloField::mul(const Cyclo& a, const Cyclo& b) const {
  const std::size_t n = static_cast<std::size_t>(degree());
  std::vector<mpq_class> prod(2 * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (sgn(a.c[i]) == 0) continue;
    for (std::size_t j = 0; j < n; ++j) prod[i + j] += a.c[i] * b.c[j];
  }
  for (std::size_t i = 2 * n - 1; i >= n; --i) {
    if (sgn(prod[i]) == 0) continue;
    mpq_class t = prod[i];
    for (std::size_t j = 0; j <= n; ++j) prod[i - n + j] -= t * mpq_class(phi_[j]);
  }
  prod.resize(n);
  return Cyclo{prod};
}

Cyclo CycloField::inv(const Cyclo& a) const {
  if (is_zero(a)) throw std::domain_error("cyclotomic inverse of zero");
  const std::size_t n = static_cast<std::size_t>(degree());
  // Column k of the multiplication-by-a matrix is a * zeta^k.
  QMatrix m(RationalField{}, n, n), rhs(RationalField{}, n, 1);
  for (std::size_t k = 0; k < n; ++k) {
    Cyclo col = mul(a, zeta_pow(static_cast<long>(k)));
    for (std::size_t i = 0; i < n; ++i) m(i, k) = col.c[i];
  }
  rhs(0, 0) = 1;
  QMatrix x = solve(m, rhs);
  Cyclo r = zero();
  for (std::size_t i = 0; i < n; ++i) r.c[i] = x(i, 0);
  return r;
}

Cyclo CycloField::div(const Cyclo& a, const Cyclo& b) const { return mul(a, inv(b)); }

bool CycloField::is_zero(const Cyclo& a) const {
  for (const auto& x : a.c)
    if (sgn(x) != 0) return false;
  return true;
}

Cyclo CycloField::conj(const Cyclo& a) const {
  Cyclo r = zero();
  for (std::size_t i = 0; i < a.c.size(); ++i) {
    if (sgn(a.c[i]) == 0) continue;
    Cyclo t = zeta_pow(-static_cast<long>(i));
    for (std::size_t j = 0; j < r.c.size(); ++j) r.c[j] += a.c[i] * t.c[j];
  }
  return r;
}

mp::Complex CycloField::embed(const Cyclo& a, int k, mp::Bits prec) const {
  mp::Complex s = mp::Complex::zero(prec);
  for (std::size_t i = 0; i < a.c.size(); ++i) {
    if (sgn(a.c[i]) == 0) continue;
    s += mp::root_of_unity(static_cast<long>(k) * static_cast<long>(i), m_, prec) * mp::Real(a.c[i], prec);
  }
  return s;
}

std::uint64_t CycloField::reduce(const Cyclo& a, std::uint64_t p, std::uint64_t root) const {
  std::uint64_t s = 0, pw = 1;
  for (const auto& x : a.c) {
    mpz_class num = x.get_num() % mpz_class(static_cast<unsigned long>(p));
    if (num < 0) num += static_cast<unsigned long>(p);
    mpz_class den = x.get_den() % mpz_class(static_cast<unsigned long>(p));
    if (den == 0) throw std::domain_error("cyclotomic reduction: denominator divisible by p");
    std::uint64_t v = arith::mulmod(num.get_ui(), arith::invmod(den.get_ui(), p), p);
    s = (s + arith::mulmod(v, pw, p)) % p;
    pw = arith::mulmod(pw, root, p);
  }
  return s;
}

mpz_class CycloField::denominator(const Cyclo& a) const {
  mpz_class d = 1;
  for (const auto& x : a.c) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), x.get_den_mpz_t());
  return d;
}

std::string CycloField::to_string(const Cyclo& a) const {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < a.c.size(); ++i) {
    if (sgn(a.c[i]) == 0) continue;
    if (!first) os << " + ";
    first = false;
    os << "(" << a.c[i].get_str() << ")";
    if (i) os << "*z^" << i;
  }
  if (first) os << "0";
  return os.str();
}

}  // namespace modgal
