#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <utility>
#include <vector>

namespace modgal::arith {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }
u64 powmod(u64 a, u64 e, u64 m);
u64 invmod(u64 a, u64 m);  // throws if not invertible
inline u64 reduce(i64 a, u64 m) {
  i64 r = a % static_cast<i64>(m);
  return static_cast<u64>(r < 0 ? r + static_cast<i64>(m) : r);
}

bool is_prime(u64 n);
u64 next_prime(u64 n);  // smallest prime > n
std::vector<u64> primes_up_to(u64 n);
u64 primitive_root(u64 p);
std::vector<std::pair<u64, int>> factor(u64 n);
int legendre(i64 a, u64 p);  // p odd prime; (a|1) = 1 by convention
int kronecker(i64 a, i64 n);
u64 num_divisors(u64 n);
// sigma_k(n) for 1 <= n < bound, reduced mod m, by an Eratosthenes-style sieve.
std::vector<u64> sigma_mod(int k, std::size_t bound, u64 m);
std::vector<mpz_class> sigma_exact(int k, std::size_t bound);
int genus_x1(int ell);  // (ell-5)(ell-7)/24 for prime ell >= 5
int genus_x0(int ell);
int two_adic_valuation(u64 n);

mpz_class mpz_powmod(const mpz_class& a, const mpz_class& e, const mpz_class& m);
// Balanced representative in (-m/2, m/2].
mpz_class balanced(const mpz_class& a, const mpz_class& m);
i64 balanced(u64 a, u64 m);

}  // namespace modgal::arith
