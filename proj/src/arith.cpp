#include "modgal/arith.hpp"

#include <stdexcept>
#include <tuple>

namespace modgal::arith {

u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

u64 invmod(u64 a, u64 m) {
  i64 t = 0, nt = 1;
  i64 r = static_cast<i64>(m), nr = static_cast<i64>(a % m);
  while (nr) {
    i64 q = r / nr;
    std::tie(t, nt) = std::make_pair(nt, t - q * nt);
    std::tie(r, nr) = std::make_pair(nr, r - q * nr);
  }
  if (r != 1) throw std::domain_error("invmod: not invertible");
  return reduce(t, m);
}

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

u64 next_prime(u64 n) {
  u64 c = n + 1;
  while (!is_prime(c)) ++c;
  return c;
}

std::vector<u64> primes_up_to(u64 n) {
  std::vector<bool> sieve(n + 1, true);
  std::vector<u64> out;
  for (u64 i = 2; i <= n; ++i) {
    if (!sieve[i]) continue;
    out.push_back(i);
    for (u64 j = i * i; j <= n; j += i) sieve[j] = false;
  }
  return out;
}

std::vector<std::pair<u64, int>> factor(u64 n) {
  std::vector<std::pair<u64, int>> out;
  for (u64 p = 2; p * p <= n; ++p) {
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e) out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

u64 primitive_root(u64 p) {
  if (p == 2) return 1;
  auto fs = factor(p - 1);
  for (u64 g = 2;; ++g) {
    bool ok = true;
    for (auto [q, e] : fs)
      if (powmod(g, (p - 1) / q, p) == 1) {
        ok = false;
        break;
      }
    if (ok) return g;
  }
}

int legendre(i64 a, u64 p) {
  if (p == 1) return 1;
  u64 r = reduce(a, p);
  if (r == 0) return 0;
  return powmod(r, (p - 1) / 2, p) == 1 ? 1 : -1;
}

int kronecker(i64 a, i64 n) {
  mpz_class x(static_cast<long>(a)), y(static_cast<long>(n));
  return mpz_kronecker(x.get_mpz_t(), y.get_mpz_t());
}

u64 num_divisors(u64 n) {
  u64 d = 1;
  for (auto [p, e] : factor(n)) d *= static_cast<u64>(e + 1);
  return d;
}

std::vector<u64> sigma_mod(int k, std::size_t bound, u64 m) {
  std::vector<u64> s(bound, 0);
  for (std::size_t d = 1; d < bound; ++d) {
    u64 dk = powmod(d % m, static_cast<u64>(k), m);
    for (std::size_t n = d; n < bound; n += d) {
      s[n] += dk;
      if (s[n] >= m) s[n] -= m;
    }
  }
  return s;
}

std::vector<mpz_class> sigma_exact(int k, std::size_t bound) {
  std::vector<mpz_class> s(bound, 0);
  for (std::size_t d = 1; d < bound; ++d) {
    mpz_class dk;
    mpz_ui_pow_ui(dk.get_mpz_t(), d, static_cast<unsigned long>(k));
    for (std::size_t n = d; n < bound; n += d) s[n] += dk;
  }
  return s;
}

int genus_x1(int ell) { return (ell - 5) * (ell - 7) / 24; }

int genus_x0(int ell) {
  // 12 g0(p) = p + 1 - 3 nu2 - 4 nu3 with elliptic point counts nu2, nu3.
  int nu2 = 1 + legendre(-1, ell);
  int nu3 = 1 + legendre(-3, ell);
  int twelve_g = ell + 1 - 3 * nu2 - 4 * nu3;
  return twelve_g / 12;
}

int two_adic_valuation(u64 n) {
  int v = 0;
  while (n && (n & 1) == 0) {
    n >>= 1;
    ++v;
  }
  return v;
}

mpz_class mpz_powmod(const mpz_class& a, const mpz_class& e, const mpz_class& m) {
  mpz_class r;
  mpz_powm(r.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
  return r;
}

mpz_class balanced(const mpz_class& a, const mpz_class& m) {
  mpz_class r = a % m;
  if (r < 0) r += m;
  if (2 * r > m) r -= m;
  return r;
}

i64 balanced(u64 a, u64 m) {
  a %= m;
  return 2 * a > m ? static_cast<i64>(a) - static_cast<i64>(m) : static_cast<i64>(a);
}

}  // namespace modgal::arith
