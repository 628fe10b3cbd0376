#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>

#include "modgal/errors.hpp"
#include "modgal/frobenius.hpp"
#include "modgal/pipeline.hpp"
#include "support.hpp"

using namespace modgal;
using frobenius::Mat2;

namespace {

int md(long x, int ell) { return static_cast<int>(((x % ell) + ell) % ell); }

Mat2 mul(const Mat2& x, const Mat2& y, int ell) {
  return {md(x.a * y.a + x.b * y.c, ell), md(x.a * y.b + x.b * y.d, ell), md(x.c * y.a + x.d * y.c, ell),
          md(x.c * y.b + x.d * y.d, ell)};
}

bool same(const Mat2& x, const Mat2& y) { return x.a == y.a && x.b == y.b && x.c == y.c && x.d == y.d; }

std::size_t class_index(const std::vector<frobenius::Class>& cl, const Mat2& m) {
  for (std::size_t i = 0; i < cl.size(); ++i)
    for (const auto& e : cl[i].elements)
      if (same(e, m)) return i;
  return cl.size();
}

std::vector<mpq_class> qpoly(std::initializer_list<long> c) {
  std::vector<mpq_class> f;
  for (long x : c) f.emplace_back(x);
  return f;
}

pipeline::Config delta11() {
  pipeline::Config cfg;
  cfg.form = TargetForm::parse("delta");
  cfg.ell = 11;
  cfg.cache = support::fixture_cache();
  return cfg;
}

}  // namespace

TEST_CASE("similarity classes of GL2(F_ell)") {
  for (int ell : {5, 11, 19}) {
    const auto cl = frobenius::similarity_classes(ell);
    CHECK(cl.size() == static_cast<std::size_t>(ell * ell - 1));
    std::size_t total = 0;
    std::map<std::size_t, int> by_size;
    for (const auto& c : cl) {
      total += c.elements.size();
      ++by_size[c.elements.size()];
      for (const auto& e : c.elements) {
        CHECK(md(e.a + e.d, ell) == c.trace);
        CHECK(md(static_cast<long>(e.a) * e.d - static_cast<long>(e.b) * e.c, ell) == c.det);
      }
    }
    const std::size_t l = static_cast<std::size_t>(ell);
    CHECK(total == (l * l - 1) * (l * l - l));
    CHECK(by_size[1] == ell - 1);
    CHECK(by_size[l * l - 1] == ell - 1);
    CHECK(by_size[l * (l + 1)] == (ell - 1) * (ell - 2) / 2);
    CHECK(by_size[l * (l - 1)] == (ell * ell - ell) / 2);
    // closed under conjugation by g of determinant 1
    const Mat2 g{1, 2, 3, 7}, gi{7, md(-2, ell), md(-3, ell), 1};
    for (std::size_t i = 0; i < cl.size(); i += 7) {
      const Mat2 m = cl[i].elements.back();
      CHECK(class_index(cl, mul(mul(g, m, ell), gi, ell)) == i);
    }
  }
  const auto cl19 = frobenius::similarity_classes(19);
  const auto& c = cl19[class_index(cl19, {17, 1, 0, 17})];
  CHECK(c.trace == 15);
  CHECK_FALSE(c.scalar);
  CHECK(c.elements.size() == 19 * 19 - 1);
}

TEST_CASE("odd part of F_ell^* and quotient classes") {
  CHECK(frobenius::odd_part_subgroup(11).size() == 5);
  CHECK(frobenius::odd_part_subgroup(17).size() == 1);
  CHECK(frobenius::odd_part_subgroup(19).size() == 9);
  CHECK(frobenius::odd_part_subgroup(29).size() == 7);
  for (int ell : {11, 19}) {
    const auto S = frobenius::odd_part_subgroup(ell);
    CHECK(std::find(S.begin(), S.end(), ell - 1) == S.end());
    const auto cl = frobenius::similarity_classes(ell);
    const auto qc = frobenius::quotient_classes(cl, S, ell);
    CHECK(qc.size() * S.size() == cl.size());
    std::size_t total = 0;
    std::set<std::size_t> seen;
    for (const auto& q : qc) {
      total += q.size;
      CHECK(q.lifts.size() == S.size());
      std::set<int> dets;
      for (std::size_t i : q.lifts) {
        seen.insert(i);
        dets.insert(cl[i].det);
        CHECK(cl[i].elements.size() == q.size);
      }
      CHECK(dets.size() == S.size());  // the determinant picks the lift
    }
    CHECK(seen.size() == cl.size());
    CHECK(total * S.size() == static_cast<std::size_t>((ell * ell - 1) * (ell * ell - ell)));
  }
}

TEST_CASE("orbit lengths") {
  std::vector<int> ones(120, 1);
  CHECK(frobenius::orbit_lengths({1, 0, 0, 1}, 11) == ones);
  CHECK(frobenius::orbit_lengths({2, 0, 0, 2}, 11) == std::vector<int>(12, 10));
  std::vector<int> jordan(10, 1);
  jordan.insert(jordan.end(), 10, 11);
  CHECK(frobenius::orbit_lengths({1, 1, 0, 1}, 11) == jordan);
}

TEST_CASE("x^e modulo f and p") {
  for (const mpz_class p : {mpz_class(1009), mpz_class("1267650600228229401496703205653")}) {
    const std::vector<mpz_class> f{7, 3, 0, 0, 0, 1};
    std::vector<mpz_class> naive{1, 0, 0, 0, 0};
    for (int e = 1; e <= 60; ++e) {
      mpz_class top = naive[4];
      for (int i = 4; i > 0; --i) naive[static_cast<std::size_t>(i)] = naive[static_cast<std::size_t>(i - 1)];
      naive[0] = 0;
      for (int i = 0; i < 5; ++i) {
        mpz_class& x = naive[static_cast<std::size_t>(i)];
        x -= top * f[static_cast<std::size_t>(i)];
        x %= p;
        if (x < 0) x += p;
      }
      auto got = frobenius::powmod_x(e, f, p);
      got.resize(5, 0);
      CHECK(got == naive);
    }
  }
}

TEST_CASE("distinct-degree factorisation") {
  for (long p : {17L, 41L, 97L, 3L, 5L, 7L, 11L, 13L, 1000003L}) {
    const auto d = frobenius::factor_degrees(qpoly({1, 0, 0, 0, 1}), p);
    CHECK(d == (p % 8 == 1 ? std::vector<int>{1, 1, 1, 1} : std::vector<int>{2, 2}));
  }
  CHECK(frobenius::factor_degrees(qpoly({1, 1, 1, 1, 1, 1, 1}), 11) == std::vector<int>{3, 3});
  CHECK(frobenius::factor_degrees(qpoly({1, 1, 1, 1, 1, 1, 1}), 29) == std::vector<int>{1, 1, 1, 1, 1, 1});
  mpz_class big("1000000000000000000000000000000");
  for (int i = 0; i < 4; ++i) {
    mpz_nextprime(big.get_mpz_t(), big.get_mpz_t());
    const auto d = frobenius::factor_degrees(qpoly({1, 0, 1}), big);
    CHECK(d == (mpz_class(big % 4) == 1 ? std::vector<int>{1, 1} : std::vector<int>{2}));
  }
}

TEST_CASE("level 11 artifacts: Frobenius of Delta") {
  const auto cfg = delta11();
  if (cfg.cache.empty()) {
    MESSAGE("MODGAL_CACHE unset, skipped");
    return;
  }
  std::ifstream rf(pipeline::find_resolvents(cfg));
  const auto art = pipeline::read_resolvents(rf);
  std::ifstream pf(pipeline::artifact_path(cfg, pipeline::Stage::Poly));
  const auto poly = pipeline::read_poly(pf);

  const auto tau = support::tau_mod(200000, 11);
  CHECK(pipeline::ap(art, 101).ap == 2);
  CHECK(tau[101] == 2);
  mpz_class p = 150000;
  for (int i = 0; i < 10; ++i) {
    mpz_nextprime(p.get_mpz_t(), p.get_mpz_t());
    const auto r = pipeline::ap(art, p);
    CHECK(r.ap == static_cast<long>(tau[p.get_ui()]));
    mpz_class d;
    mpz_powm_ui(d.get_mpz_t(), p.get_mpz_t(), 11, mpz_class(11).get_mpz_t());
    CHECK(r.det == d.get_si());
  }

  // the factorisation pattern of F mod p matches the orbits of Frob_p
  p = 1073741824;
  for (int i = 0; i < 20; ++i) {
    mpz_nextprime(p.get_mpz_t(), p.get_mpz_t());
    const auto r = pipeline::ap(art, p);
    CHECK(frobenius::factor_degrees(poly.F.c, p) == frobenius::orbit_lengths(r.rep, 11));
  }

  CHECK_THROWS_AS(pipeline::ap(art, 11), BadPrime);
  CHECK_THROWS_AS(pipeline::ap(art, 15), BadPrime);
}
