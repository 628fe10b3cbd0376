#include <doctest.h>

#include "modgal/arith.hpp"
#include "modgal/eisenstein.hpp"
#include "modgal/linalg.hpp"
#include "modgal/modsym.hpp"

using namespace modgal;
using namespace modgal::eisenstein;
using mp::Complex;
using mp::Real;

namespace {

const mp::Bits kPrec = 160;

Complex eval(const Series& s, const Complex& q) {
  Complex acc = Complex::zero(kPrec);
  for (std::size_t n = s.size(); n-- > 0;) acc = acc * q + s[n];
  return acc;
}

Complex cplx(double re, double im) { return Complex::from(re, im, kPrec); }

// f|M at tau0 from the expansion at infinity, M = [[a,b],[c,d]] with det > 0.
Complex slash_direct(const Series& f, long a, long b, long c, long d, const Complex& tau0) {
  Complex mt = (tau0 * a + Complex(b)) / (tau0 * c + Complex(d));
  Complex j = tau0 * c + Complex(d);
  return eval(f, mp::e2pi(mt)) * (a * d - b * c) / (j * j);
}

double rel(const Complex& x, const Complex& y) { return (mp::abs(x - y) / mp::abs(y)).to_double(); }

}  // namespace

TEST_CASE("Gauss sums") {
  CHECK(mp::abs(gauss_sum(std::vector<Complex>{cplx(1, 0)}, kPrec) - cplx(1, 0)).to_double() < 1e-40);
  Complex g5 = legendre_gauss_sum(5, kPrec);
  CHECK(mp::abs(g5 - Complex(mp::sqrt(Real::from(5L, kPrec)))).to_double() < 1e-40);
  Characters chars(13);
  for (int i = 1; i < chars.m(); ++i)
    CHECK(mp::abs(mp::abs2(gauss_sum(chars, i, kPrec)) - Real::from(13L, kPrec)).to_double() < 1e-40);
}

TEST_CASE("E_2 expansions and the Fricke involution") {
  for (int ell : {11, 13}) {
    Characters chars(ell);
    for (int i = 1; i < chars.m(); ++i) {
      auto a = e2_qexp(chars, {true, i}, 10, kPrec);
      auto b = e2_qexp(chars, {false, i}, 10, kPrec);
      CHECK(a[0].is_zero());
      CHECK(mp::abs(b[1] - cplx(2, 0)).to_double() < 1e-40);
      CHECK(mp::abs(a[1] - cplx(2, 0)).to_double() < 1e-40);
      // twice Fricke is the identity
      for (bool first : {true, false}) {
        auto w1 = fricke_e2(chars, {first, i}, kPrec);
        auto w2 = fricke_e2(chars, w1.image, kPrec);
        CHECK(w2.image.chi_first == first);
        CHECK(w2.image.character == i);
        CHECK(mp::abs(w1.scalar * w2.scalar - cplx(1, 0)).to_double() < 1e-40);
      }
      // W_ell f (tau) = f(-1/(ell tau)) / (ell tau^2), checked pointwise
      for (bool first : {true, false}) {
        auto f = e2_qexp(chars, {first, i}, 400, kPrec);
        auto w = fricke_e2(chars, {first, i}, kPrec);
        auto g = e2_qexp(chars, w.image, 400, kPrec);
        Complex tau = cplx(0.1, 0.4);
        Complex lhs = slash_direct(f, 0, -1, ell, 0, tau);
        Complex rhs = w.scalar * eval(g, mp::e2pi(tau));
        CHECK(rel(lhs, rhs) < 1e-30);
      }
    }
  }
}

TEST_CASE("cusp charts agree with the action of Gamma_0(ell)") {
  const int ell = 11;
  Characters chars(ell);
  const std::size_t B = 900;
  for (int i = 1; i < chars.m(); ++i) {
    Form f = e2_form(chars, {true, i}, B, kPrec);
    const Series& at_inf = f.pieces[0].at_inf;
    for (int d = 1; d <= 3; ++d) {
      const long a = static_cast<long>(arith::invmod(static_cast<arith::u64>(d), ell));
      const long b = (a * d - 1) / ell;
      // above infinity: gamma_d = [[a,b],[ell,d]]
      Complex t1 = cplx(-static_cast<double>(d) / ell, 0.1);
      CHECK(rel(slash_direct(at_inf, a, b, ell, d, t1), eval(expansion_at(chars, f, {false, d}), mp::e2pi(t1))) < 1e-25);
      // above 0: gamma_d W = [[b ell, -a],[d ell, -ell]]
      Complex t0 = cplx(1.0 / d, 0.25);
      CHECK(rel(slash_direct(at_inf, b * ell, -a, d * ell, -ell, t0), eval(expansion_at(chars, f, {true, d}), mp::e2pi(t0))) <
            1e-25);
    }
  }
}

TEST_CASE("newform pseudo-eigenvalues") {
  for (int ell : {11, 13, 17}) {
    modsym::Space s(ell);
    Characters chars(ell);
    auto eig = newforms::numeric_eigenforms(s, 400, kPrec);
    for (const auto& e : eig) {
      Form f = newform_form(chars, e.character, e.a, kPrec);
      Complex tau = cplx(0.05, 1.0 / std::sqrt(static_cast<double>(ell)));
      Complex lhs = slash_direct(e.a, 0, -1, ell, 0, tau);
      Complex rhs = eval(f.pieces[0].at_zero, mp::e2pi(tau));
      CHECK(rel(lhs, rhs) < 1e-30);
    }
    if (ell == 11) {
      Complex lambda = fricke_pseudo_eigenvalue(chars, 0, eig[0].a, kPrec);
      CHECK(mp::abs(lambda + cplx(1, 0)).to_double() < 1e-30);
    }
  }
}

TEST_CASE("e_{1,2} and e_{1,3}") {
  for (int ell : {11, 13, 17, 19}) {
    Characters chars(ell);
    auto e = build_e12_e13(chars, 60, kPrec);
    auto cusps = all_cusps(ell);
    auto poles = pole_cusps(ell);
    CHECK(poles[0] == Cusp{true, 1});
    for (std::size_t k = 0; k < cusps.size(); ++k) {
      if (!cusps[k].above_zero) {
        CHECK(mp::abs(e.lead12[k]).to_double() < 1e-40);
        CHECK(mp::abs(e.lead13[k]).to_double() < 1e-40);
      }
    }
    // both nonzero at c1, and the pattern is the rational cusps c2, c3
    std::size_t live12 = 0, live13 = 0;
    for (std::size_t k = 0; k < cusps.size(); ++k) {
      live12 += mp::abs(e.lead12[k]).to_double() > 1e-20;
      live13 += mp::abs(e.lead13[k]).to_double() > 1e-20;
    }
    CHECK(live12 == 2);
    CHECK(live13 == 2);
    // S_2 + C e12 + C e13 has dimension g + 2
    modsym::Space s(ell);
    auto eig = newforms::numeric_eigenforms(s, 60, kPrec);
    mp::CMatrix m(static_cast<Eigen::Index>(eig.size() + 2), 60);
    for (std::size_t r = 0; r < eig.size(); ++r)
      for (Eigen::Index n = 0; n < 60; ++n) m(static_cast<Eigen::Index>(r), n) = eig[r].a[static_cast<std::size_t>(n)];
    auto s12 = expansion_at(chars, e.e12, {false, 1});
    auto s13 = expansion_at(chars, e.e13, {false, 1});
    for (Eigen::Index n = 0; n < 60; ++n) {
      m(m.rows() - 2, n) = s12[static_cast<std::size_t>(n)];
      m(m.rows() - 1, n) = s13[static_cast<std::size_t>(n)];
    }
    auto qr = linalg::colpiv_qr(m, linalg::default_tolerance(kPrec), false);
    CHECK(qr.rank == arith::genus_x1(ell) + 2);
  }
}
