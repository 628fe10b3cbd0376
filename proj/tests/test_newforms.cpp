#include <doctest.h>

#include <random>

#include "modgal/arith.hpp"
#include "modgal/errors.hpp"
#include "modgal/newforms.hpp"

using namespace modgal;
using namespace modgal::newforms;
using modsym::Space;
using mp::Complex;
using mp::Real;

namespace {

// q prod (1 - q^n)^2 (1 - q^{11 n})^2 by repeated multiplication.
std::vector<long> eta_product_11(std::size_t B) {
  std::vector<long> s(B, 0);
  s[1] = 1;
  for (std::size_t n = 1; n < B; ++n)
    for (std::size_t step : {n, 11 * n})
      for (int rep = 0; rep < 2; ++rep)
        for (std::size_t i = B; i-- > step;) s[i] -= s[i - step];
  return s;
}

long genus_x0(long ell) {
  long r = ell % 12;
  long base = (ell + 1) / 12;
  return r == 1 ? base - 1 : base;  // ell = 1 mod 12 loses one
}

}  // namespace

TEST_CASE("even characters") {
  Characters c(13);
  CHECK(c.m() == 6);
  for (int i = 0; i < 6; ++i) {
    CHECK(c.exponent(i, 12) == 0);  // even
    for (long a = 1; a < 13; ++a)
      for (long b = 1; b < 13; ++b) CHECK(c.exponent(i, a * b) == (c.exponent(i, a) + c.exponent(i, b)) % 6);
  }
  CHECK(c.order(0) == 1);
  CHECK(c.order(3) == 2);
  CHECK(c.order(1) == 6);
}

TEST_CASE("Hecke generator") {
  CHECK(find_hecke_generator(Space(11)) == 2);
  long n17 = find_hecke_generator(Space(17));
  CHECK((n17 == 2 || n17 == 3));
  CHECK(n17 == 2);
  // T_2 with a repeated eigenvalue is skipped.
  auto op = [](long n) {
    QMatrix m = QMatrix::identity(RationalField{}, 2);
    if (n == 3) m(1, 1) = 2;
    return m;
  };
  CHECK(find_hecke_generator(op) == 3);
  CHECK_THROWS_AS(find_hecke_generator([](long) { return QMatrix::identity(RationalField{}, 2); }, 5), Error);
}

TEST_CASE("level 11: classical expansion matches the eta product") {
  Space s(11);
  const std::size_t B = 200;
  auto nb = nebentypus_bases(s, B);
  REQUIRE(nb.blocks.size() == 1);
  CHECK(nb.blocks[0].character == 0);
  auto f = classical_qexp(nb, 0, 0);
  auto oracle = eta_product_11(B);
  bool all = true;
  for (std::size_t n = 0; n < B; ++n) {
    all = all && f[n].c[0] == oracle[n];
    for (std::size_t k = 1; k < f[n].c.size(); ++k) all = all && f[n].c[k] == 0;
  }
  CHECK(all);
  CHECK(oracle[2] == -2);
  CHECK(oracle[11] == 1);
  auto eig = numeric_eigenforms(s, 12, 128);
  REQUIRE(eig.size() == 1);
  CHECK(mp::abs(eig[0].a[2] + Complex(2)).to_double() < 1e-30);
  CHECK(mp::abs(eig[0].a[11] - Complex(1)).to_double() < 1e-30);
}

TEST_CASE("character blocks: dimensions, conjugation and Deligne's bound") {
  for (int ell : {13, 17}) {
    Space s(ell);
    const std::size_t B = 201;
    auto nb = nebentypus_bases(s, B);
    Characters chars(ell);
    std::size_t total = 0;
    long trivial = 0;
    for (const auto& b : nb.blocks) {
      total += b.forms.size();
      if (b.character == 0) trivial = static_cast<long>(b.forms.size());
      // conjugate characters carry blocks of the same size
      const auto* cb = nb.block(chars.conj(b.character));
      REQUIRE(cb != nullptr);
      CHECK(cb->forms.size() == b.forms.size());
    }
    CHECK(total == static_cast<std::size_t>(s.genus()));
    CHECK(trivial == genus_x0(ell));
    std::mt19937 rng(ell);
    std::uniform_int_distribution<std::size_t> pick(1, 200);
    for (std::size_t j = 0; j < nb.eigen.size(); ++j) {
      auto a = nb.eigen_expansion(j, 128);
      const int ch = nb.eigen[j].character;
      for (long p : {2L, 3L, 5L, 7L}) {
        Complex lhs = mp::conj(a[static_cast<std::size_t>(p)]);
        Complex rhs = mp::conj(chars.embed(ch, p, 128)) * a[static_cast<std::size_t>(p)];
        CHECK(mp::abs(lhs - rhs).to_double() < 1e-25);
      }
      for (int t = 0; t < 50; ++t) {
        std::size_t n = pick(rng);
        double bound = static_cast<double>(arith::num_divisors(n)) * std::sqrt(static_cast<double>(n));
        CHECK(mp::abs(a[n]).to_double() <= bound * (1 + 1e-20));
      }
      // agrees with the modular-symbol eigenvalues where both exist
      for (std::size_t n = 1; n < nb.eigen[j].a.size(); ++n)
        CHECK(mp::abs(a[n] - nb.eigen[j].a[n]).to_double() < 1e-25);
    }
  }
}

TEST_CASE("mod-ell eigenvalue systems") {
  Space s11(11);
  auto es = eigen_system_mod_l(s11, TargetForm{FormKind::Delta, 0});
  CHECK(es.mu.at(2) == 9);
  CHECK(es.plane.cols == 2);
  auto w2 = eigen_system_mod_l(s11, TargetForm{FormKind::Weight2, 0});
  CHECK(w2.mu.at(2) == 9);
  Space s23(23);
  CHECK_THROWS_AS(eigen_system_mod_l(s23, TargetForm{FormKind::Delta, 0}), ConfigExcluded);
  auto e4 = eigen_system_mod_l(s23, TargetForm{FormKind::E4Delta, 0});
  CHECK(e4.plane.cols == 2);
}

TEST_CASE("level-one expansions") {
  auto d = level_one_qexp(FormKind::Delta, 12);
  CHECK(d[1] == 1);
  CHECK(d[2] == -24);
  CHECK(d[3] == 252);
  CHECK(d[11] == 534612);
  auto e = level_one_qexp(FormKind::E4Delta, 4);
  CHECK(e[2] == 216);  // -24 + 240
}
