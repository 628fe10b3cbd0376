#include <doctest.h>

#include <random>
#include <sstream>

#include "modgal/arith.hpp"
#include "modgal/errors.hpp"
#include "modgal/qexpansion.hpp"

using namespace modgal;
using namespace modgal::qexp;

namespace {

// j(q) * q as exact integers: E4^3 / (Delta / q), Delta from the product.
std::vector<mpz_class> q_times_j(std::size_t n) {
  std::vector<mpz_class> dq(n, 0), e4(n, 0);
  dq[0] = 1;
  for (std::size_t k = 1; k < n; ++k)
    for (int t = 0; t < 24; ++t)
      for (std::size_t i = n; i-- > k;) dq[i] -= dq[i - k];
  e4[0] = 1;
  for (std::size_t k = 1; k < n; ++k) {
    mpz_class s = 0;
    for (std::size_t d = 1; d <= k; ++d)
      if (k % d == 0) s += mpz_class(d) * d * d;
    e4[k] = 240 * s;
  }
  auto mul = [n](const std::vector<mpz_class>& a, const std::vector<mpz_class>& b) {
    std::vector<mpz_class> c(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; i + k < n; ++k) c[i + k] += a[i] * b[k];
    return c;
  };
  auto cube = mul(mul(e4, e4), e4);
  // divide by dq (constant term 1)
  std::vector<mpz_class> out(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    mpz_class s = cube[i];
    for (std::size_t k = 1; k <= i; ++k) s -= dq[k] * out[i - k];
    out[i] = s;
  }
  return out;
}

std::vector<long> eta_11(std::size_t B) {
  std::vector<long> f(B, 0);
  f[1] = 1;
  for (std::size_t n = 1; n < B; ++n)
    for (std::size_t k : {n, n, 11 * n, 11 * n}) {
      if (k >= B) continue;
      for (std::size_t i = B; i-- > k;) f[i] -= f[i - k];
    }
  return f;
}

std::uint64_t red(const mpz_class& x, std::uint64_t p) {
  mpz_class r = x % p;
  if (r < 0) r += p;
  return r.get_ui();
}

}  // namespace

TEST_CASE("base series") {
  const std::uint64_t p = 1000003;
  auto b = base_series(12, p);
  CHECK(b.e4[1] == 240);
  CHECK(b.e4[2] == 2160);
  CHECK(b.e6[1] == p - 504);
  CHECK(b.u[0] == 0);
  CHECK(b.u[1] == 1);
  CHECK(b.u[2] == p - 744);
  CHECK(b.u[3] == 356652);
  // u = 1/j and q^2 dj/dq against the exact product expansion of j
  auto qj = q_times_j(12);
  CHECK(qj[1] == 744);
  CHECK(qj[2] == 196884);
  std::vector<mpz_class> u(12, 0);  // u = q / (q j)
  std::vector<mpz_class> inv(11, 0);
  inv[0] = 1;
  for (std::size_t i = 1; i < 11; ++i) {
    mpz_class s = 0;
    for (std::size_t k = 1; k <= i; ++k) s -= qj[k] * inv[i - k];
    inv[i] = s;
  }
  for (std::size_t i = 0; i < 11; ++i) CHECK(b.u[i + 1] == red(inv[i], p));
  for (std::size_t i = 0; i < 12; ++i) {
    // q^2 dj/dq = sum (n-1) c_n q^n with q j = sum c_n q^n
    mpz_class want = qj[i] * (static_cast<long>(i) - 1);
    CHECK(b.q2dj[i] == red(want, p));
  }
}

TEST_CASE("degree bounds and prime choice") {
  CHECK(trivial_degU(17, static_cast<int>(arith::genus_x0(17))) == 20);
  CHECK(nontrivial_degU(17, static_cast<int>(arith::genus_x1(17)), 2) == 2);
  CHECK(arith::num_divisors(12) == 6);

  modsym::Space s(11);
  auto nb = newforms::nebentypus_bases(s, 40);
  auto ep = choose_prime(nb, 1000, 1);
  CHECK(ep.p % 5 == 1);
  CHECK(static_cast<double>(ep.p) > 2 * ep.bound);
  CHECK(ep.roots.size() == 4);
  for (auto r : ep.roots) {
    CHECK(arith::powmod(r, 5, ep.p) == 1);
    CHECK(r != 1);
  }
  auto ep2 = choose_prime(nb, 4000, 1);
  CHECK(ep2.bound > ep.bound);
  CHECK(ep2.bound < 8 * ep.bound);
}

TEST_CASE("find_equation and series roots") {
  const std::uint64_t p = 1000003;
  ModRing R{p};
  std::mt19937_64 rng(7);
  ModSeries u(R, 80);
  u[1] = 1;
  for (std::size_t n = 2; n < 80; ++n) u[n] = rng() % p;
  // v = u^2 + 3u satisfies V - U^2 - 3U = 0
  ModSeries v = u * u + u.scaled(3);
  auto phi = find_equation(v, u, 4, 3);
  CHECK(phi.deg_v() == 1);
  CHECK(evaluate(phi, u, v).valuation() == 80);
  CHECK_THROWS_AS(find_equation(v.truncated(5), u.truncated(5), 4, 3), PrecisionError);

  ModSeries w(R, 300);
  for (std::size_t n = 0; n < 300; ++n) w[n] = rng() % p;
  w[0] = 5;
  for (int o : {2, 3, 8}) {
    ModSeries ww = pow(w, static_cast<unsigned long>(o));
    auto got = series_root(ww, w.truncated(1), o);
    for (std::size_t n = 0; n < 300; ++n) CHECK(got[n] == w[n]);
  }
  ModSeries qw = w.shifted(2).truncated(300);
  auto got = series_root(pow(qw, 3), qw.truncated(4), 3);
  CHECK(got.trunc() == 296);  // v is known to O(q^300) and starts at q^6
  CHECK((got - qw).valuation() == 296);
  CHECK_THROWS_AS(series_root(pow(w, 2), w.truncated(1).scaled(2), 2), PrecisionError);
}

TEST_CASE("level 11: fast expansion matches the eta product") {
  modsym::Space s(11);
  const std::size_t B = 6000;
  auto e = expand_all(s, B);
  CHECK(e.prime != 0);
  REQUIRE(e.forms.size() == 1);
  auto eta = eta_11(B);
  std::size_t bad = 0;
  for (std::size_t n = 0; n < B; ++n) bad += e.forms[0].coefficient(n).c[0] != eta[n];
  CHECK(bad == 0);

  // the fitted relation has degree ell + 1 in V
  auto nb = newforms::nebentypus_bases(s, 400);
  auto ep = choose_prime(nb, B, 1);
  auto base = base_series(600, ep.p);
  ModSeries omega(ModRing{ep.p}, 400);
  for (std::size_t n = 0; n < 400; ++n) omega[n] = arith::reduce(eta[n], ep.p);
  ModSeries v = -(omega * base.u.truncated(400) * base.e4.truncated(400) * inverse(base.e6.truncated(400)));
  auto phi = find_equation(v, base.u.truncated(400), trivial_degU(11, 1), 12);
  CHECK(phi.deg_v() == 12);
  CHECK(evaluate(phi, base.u.truncated(400), v).valuation() == 400);

  // stable under the next admissible prime
  ExpandOptions opt;
  opt.prime_above = e.prime;
  auto e2 = expand_all(s, 3000, opt);
  CHECK(e2.prime > e.prime);
  for (std::size_t n = 0; n < 3000; ++n) CHECK(e2.forms[0].num[n * e2.forms[0].phi] == eta[n]);

  ModSeries short_omega = omega.truncated(300);
  CHECK_THROWS_AS(expand_nontrivial(short_omega, omega, 1, base, 11, 1, 500), std::invalid_argument);
}

TEST_CASE("fast expansion agrees with the classical one") {
  for (int ell : {17, 19}) {
    modsym::Space s(ell);
    const std::size_t B = 2600;
    auto e = expand_all(s, B);
    CHECK(e.prime != 0);
    auto nb = newforms::nebentypus_bases(s, 200);
    std::size_t forms = 0;
    for (const auto& b : nb.blocks)
      for (std::size_t r = 0; r < b.forms.size(); ++r, ++forms) {
        const auto& f = e.form(b.character, r);
        for (std::size_t n = 0; n < 200; ++n) {
          auto c = f.coefficient(n);
          for (std::size_t k = 0; k < c.c.size(); ++k) CHECK(c.c[k] == b.forms[r][n].c[k]);
        }
      }
    CHECK(forms == arith::genus_x1(ell));
    // Deligne's bound after the change of basis to eigenforms
    std::mt19937 rng(static_cast<unsigned>(ell));
    for (std::size_t j = 0; j < nb.eigen.size(); ++j) {
      auto a = e.eigenform(nb, j, 128);
      for (int t = 0; t < 50; ++t) {
        std::size_t n = 1 + rng() % (B - 1);
        const double bound = static_cast<double>(arith::num_divisors(n)) * std::sqrt(static_cast<double>(n));
        CHECK(mp::abs(a[n]).to_double() <= bound * (1 + 1e-20));
      }
      for (std::size_t n = 0; n < nb.eigen[j].a.size(); ++n) CHECK(mp::abs(a[n] - nb.eigen[j].a[n]).to_double() < 1e-25);
    }
  }
}

TEST_CASE("level 13 takes the classical route") {
  modsym::Space s(13);
  auto e = expand_all(s, 1500);
  CHECK(e.prime == 0);
  CHECK(e.forms.size() == 2);
}

TEST_CASE("cache round trip") {
  modsym::Space s(11);
  auto e = expand_all(s, 900);
  std::stringstream ss;
  write_cache(ss, e, "0:1");
  auto back = read_cache(ss);
  CHECK(back.ell == 11);
  CHECK(back.B == 900);
  CHECK(back.prime == e.prime);
  REQUIRE(back.forms.size() == 1);
  CHECK(back.forms[0].num == e.forms[0].num);
  std::stringstream broken("modgal-qexp 2\n");
  CHECK_THROWS(read_cache(broken));
}
