#include "modgal/ntt.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <stdexcept>

#include "modgal/arith.hpp"

namespace modgal::ntt {

using arith::mulmod;
using arith::powmod;
using arith::u64;

namespace {

struct NttPrime {
  u64 p;
  u64 g;
};

// p = c 2^k + 1 with k >= 23 and generator g.
constexpr std::array<NttPrime, 6> kPrimes = {{{998244353, 3},
                                              {167772161, 3},
                                              {469762049, 3},
                                              {754974721, 11},
                                              {1107296257, 10},
                                              {1711276033, 29}}};

// The modulus is a template constant so that the reductions compile to
// multiplications; all primes are below 2^31, so products fit in 64 bits.
template <u64 P>
void transform(std::vector<u64>& a, u64 g, bool invert) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  std::vector<u64> ws(n / 2 + 1);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    u64 w = powmod(g, (P - 1) / len, P);
    if (invert) w = arith::invmod(w, P);
    const std::size_t half = len / 2;
    ws[0] = 1;
    for (std::size_t k = 1; k < half; ++k) ws[k] = ws[k - 1] * w % P;
    for (std::size_t i = 0; i < n; i += len) {
      u64* lo = a.data() + i;
      u64* hi = lo + half;
      for (std::size_t k = 0; k < half; ++k) {
        const u64 u = lo[k], v = hi[k] * ws[k] % P;
        lo[k] = u + v >= P ? u + v - P : u + v;
        hi[k] = u >= v ? u - v : u + P - v;
      }
    }
  }
  if (invert) {
    const u64 ninv = arith::invmod(n % P, P);
    for (auto& x : a) x = x * ninv % P;
  }
}

template <u64 P>
std::vector<u64> convolve_fixed(const std::vector<u64>& a, const std::vector<u64>& b, std::size_t size,
                                std::size_t n_out, u64 g) {
  std::vector<u64> fa(size, 0), fb(size, 0);
  for (std::size_t i = 0; i < a.size(); ++i) fa[i] = a[i] % P;
  for (std::size_t i = 0; i < b.size(); ++i) fb[i] = b[i] % P;
  transform<P>(fa, g, false);
  if (&a == &b) {
    fb = fa;
  } else {
    transform<P>(fb, g, false);
  }
  for (std::size_t i = 0; i < size; ++i) fa[i] = fa[i] * fb[i] % P;
  transform<P>(fa, g, true);
  fa.resize(n_out);
  return fa;
}

std::vector<u64> convolve_prime(const std::vector<u64>& a, const std::vector<u64>& b, std::size_t size,
                                std::size_t n_out, std::size_t k) {
  const u64 g = kPrimes[k].g;
  switch (k) {
    case 0: return convolve_fixed<kPrimes[0].p>(a, b, size, n_out, g);
    case 1: return convolve_fixed<kPrimes[1].p>(a, b, size, n_out, g);
    case 2: return convolve_fixed<kPrimes[2].p>(a, b, size, n_out, g);
    case 3: return convolve_fixed<kPrimes[3].p>(a, b, size, n_out, g);
    case 4: return convolve_fixed<kPrimes[4].p>(a, b, size, n_out, g);
    default: return convolve_fixed<kPrimes[5].p>(a, b, size, n_out, g);
  }
}

}  // namespace

std::vector<u64> schoolbook(const std::vector<u64>& a, const std::vector<u64>& b, u64 p, std::size_t n_out) {
  std::vector<arith::u128> acc(n_out, 0);
  std::vector<u64> out(n_out, 0);
  // Accumulate in 128 bits, reducing before overflow is possible.
  const int budget = p < (1ULL << 32) ? 1 << 30 : 1;
  int pending = 0;
  for (std::size_t i = 0; i < a.size() && i < n_out; ++i) {
    if (a[i] == 0) continue;
    const std::size_t lim = std::min(b.size(), n_out - i);
    for (std::size_t j = 0; j < lim; ++j) acc[i + j] += static_cast<arith::u128>(a[i]) * b[j];
    if (++pending >= budget) {
      for (auto& x : acc) x %= p;
      pending = 0;
    }
  }
  for (std::size_t i = 0; i < n_out; ++i) out[i] = static_cast<u64>(acc[i] % p);
  return out;
}

std::vector<u64> multiply(const std::vector<u64>& a, const std::vector<u64>& b, u64 p, std::size_t n_out,
                          std::size_t crossover) {
  if (a.empty() || b.empty() || n_out == 0) return std::vector<u64>(n_out, 0);
  const std::size_t la = std::min(a.size(), n_out), lb = std::min(b.size(), n_out);
  if (std::min(la, lb) < crossover) return schoolbook(a, b, p, n_out);
  const std::size_t full = la + lb - 1;
  const std::size_t size = std::bit_ceil(full);
  if (size > (1u << 23)) throw std::length_error("ntt: transform too long");
  // Enough primes that the exact integer convolution is recovered.
  const double need = 2.0 * std::log2(static_cast<double>(p)) + std::log2(static_cast<double>(std::min(la, lb))) + 2;
  std::size_t count = 0;
  double have = 0;
  while (have < need) {
    if (count == kPrimes.size()) throw std::length_error("ntt: modulus too large");
    have += std::log2(static_cast<double>(kPrimes[count].p));
    ++count;
  }
  const bool same = &a == &b || (la == lb && std::equal(a.begin(), a.begin() + static_cast<long>(la), b.begin()));
  std::vector<u64> av(a.begin(), a.begin() + static_cast<long>(la)), bv(b.begin(), b.begin() + static_cast<long>(lb));
  std::vector<std::vector<u64>> res;
  for (std::size_t k = 0; k < count; ++k) res.push_back(convolve_prime(av, same ? av : bv, size, std::min(full, n_out), k));
  // Garner reconstruction directly modulo p.
  std::vector<std::vector<u64>> inv(count, std::vector<u64>(count, 0));
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = 0; j < i; ++j) inv[j][i] = arith::invmod(kPrimes[j].p % kPrimes[i].p, kPrimes[i].p);
  std::vector<u64> out(n_out, 0);
  std::vector<u64> digits(count);
  for (std::size_t t = 0; t < std::min(full, n_out); ++t) {
    for (std::size_t i = 0; i < count; ++i) {
      const u64 pi = kPrimes[i].p;
      u64 x = res[i][t];
      for (std::size_t j = 0; j < i; ++j) {
        x = (x + pi - digits[j] % pi) % pi;
        x = mulmod(x, inv[j][i], pi);
      }
      digits[i] = x;
    }
    u64 val = 0, radix = 1 % p;
    for (std::size_t i = 0; i < count; ++i) {
      val = (val + mulmod(digits[i] % p, radix, p)) % p;
      radix = mulmod(radix, kPrimes[i].p % p, p);
    }
    out[t] = val;
  }
  return out;
}

}  // namespace modgal::ntt
