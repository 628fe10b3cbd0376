#include "modgal/targets.hpp"

#include "modgal/arith.hpp"
#include "modgal/errors.hpp"
#include "modgal/ntt.hpp"

namespace modgal {

std::string TargetForm::name() const {
  switch (kind) {
    case FormKind::Delta:
      return "delta";
    case FormKind::E4Delta:
      return "e4delta";
    case FormKind::Weight2:
      return "weight2:" + std::to_string(index);
  }
  return "";
}

TargetForm TargetForm::parse(const std::string& s) {
  if (s == "delta") return {FormKind::Delta, 0};
  if (s == "e4delta") return {FormKind::E4Delta, 0};
  if (s.rfind("weight2", 0) == 0) {
    int idx = 0;
    if (s.size() > 7) {
      if (s[7] != ':') throw std::invalid_argument("form selector: expected weight2:<index>");
      idx = std::stoi(s.substr(8));
    }
    return {FormKind::Weight2, idx};
  }
  throw std::invalid_argument("unknown form selector '" + s + "'");
}

void check_target(const TargetForm& f, int ell) {
  if (ell < 11 || !arith::is_prime(static_cast<arith::u64>(ell)))
    throw ConfigExcluded("ell must be a prime >= 11, got " + std::to_string(ell));
  // The image is not the full group containing SL_2 for these primes.
  if (f.kind == FormKind::Delta && (ell == 23 || ell == 691))
    throw ConfigExcluded("delta mod " + std::to_string(ell) + " has exceptional image");
  if (f.kind == FormKind::E4Delta && (ell == 3617 || ell <= 17))
    throw ConfigExcluded("e4delta mod " + std::to_string(ell) + " is excluded");
}

namespace {

// sum (-1)^k (2k+1) q^{k(k+1)/2} = prod (1 - q^n)^3, reduced mod m.
std::vector<std::uint64_t> eta_cubed(std::size_t B, std::uint64_t m) {
  std::vector<std::uint64_t> e(B, 0);
  for (std::size_t k = 0;; ++k) {
    std::size_t t = k * (k + 1) / 2;
    if (t >= B) break;
    long v = (k % 2 ? -1L : 1L) * static_cast<long>(2 * k + 1);
    e[t] = arith::reduce(v, m);
  }
  return e;
}

std::vector<std::uint64_t> sigma3_series(std::size_t B, std::uint64_t m) {
  auto s = arith::sigma_mod(3, B, m);
  std::vector<std::uint64_t> e(B, 0);
  if (B) e[0] = 1 % m;
  for (std::size_t n = 1; n < B; ++n) e[n] = arith::mulmod(240 % m, s[n], m);
  return e;
}

}  // namespace

std::vector<std::uint64_t> level_one_qexp_mod(FormKind kind, std::size_t B, std::uint64_t m) {
  if (kind == FormKind::Weight2) throw std::invalid_argument("level_one_qexp: not a level-one form");
  if (B == 0) return {};
  // Delta = q (eta^3)^8
  auto e = eta_cubed(B, m);
  auto e2 = ntt::multiply(e, e, m, B);
  auto e4 = ntt::multiply(e2, e2, m, B);
  auto e8 = ntt::multiply(e4, e4, m, B);
  std::vector<std::uint64_t> delta(B, 0);
  for (std::size_t n = 1; n < B; ++n) delta[n] = e8[n - 1];
  if (kind == FormKind::Delta) return delta;
  return ntt::multiply(delta, sigma3_series(B, m), m, B);
}

std::vector<mpz_class> level_one_qexp(FormKind kind, std::size_t B) {
  // CRT over two 62-bit primes, valid while the Deligne bound stays below
  // half their product.
  const std::uint64_t p1 = arith::next_prime(1ULL << 62), p2 = arith::next_prime(p1);
  auto a = level_one_qexp_mod(kind, B, p1);
  auto b = level_one_qexp_mod(kind, B, p2);
  const mpz_class m1(std::to_string(p1)), m2(std::to_string(p2));
  const mpz_class mod = m1 * m2;
  mpz_class inv;
  mpz_invert(inv.get_mpz_t(), m1.get_mpz_t(), m2.get_mpz_t());
  // Bound on |a_n|: d(n) n^{(k-1)/2} <= n^{k/2 + 1}.
  const int k = kind == FormKind::Delta ? 12 : 16;
  mpz_class bound = 1;
  mpz_ui_pow_ui(bound.get_mpz_t(), static_cast<unsigned long>(B), static_cast<unsigned long>(k / 2 + 1));
  if (2 * bound >= mod) throw std::invalid_argument("level_one_qexp: B too large for the CRT moduli");
  std::vector<mpz_class> out(B);
  for (std::size_t n = 0; n < B; ++n) {
    mpz_class x = mpz_class(std::to_string(a[n]));
    mpz_class d = (mpz_class(std::to_string(b[n])) - x) * inv % m2;
    if (d < 0) d += m2;
    x += d * m1;
    out[n] = arith::balanced(x, mod);
  }
  return out;
}

}  // namespace modgal
