#include <doctest.h>

#include <random>

#include "modgal/exact.hpp"
#include "modgal/linalg.hpp"
#include "modgal/ntt.hpp"
#include "modgal/ratrecon.hpp"
#include "modgal/series.hpp"

using namespace modgal;
using mp::Complex;
using mp::Real;

namespace {

mp::CMatrix integer_matrix(std::mt19937_64& rng, int rows, int cols, int range, mp::Bits prec) {
  std::uniform_int_distribution<int> d(-range, range);
  mp::CMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = Complex(Real::from(static_cast<long>(d(rng)), prec), Real::from(static_cast<long>(d(rng)), prec));
  return m;
}

}  // namespace

TEST_CASE("real arithmetic keeps the larger operand precision") {
  Real a = Real::from(1L, 300), b = Real::from(3L, 100);
  Real c = a / b;
  CHECK(c.precision() == 300);
  Real third("0.33333333333333333333333333333333333333333333333333333333333333333333333333333333333333333", 300);
  CHECK(mp::abs(c - third) < mp::two_pow(280, 300));
  Real lit = 5;
  CHECK(lit.precision() == mp::kLiteralBits);
}

TEST_CASE("complex elementary functions") {
  const mp::Bits p = 256;
  Complex i = mp::i_unit(p);
  Complex e = mp::exp(i * mp::pi(p));
  CHECK(mp::abs(e + Complex(Real::from(1L, p))) < mp::two_pow(250, p));
  Complex z = Complex::from(-3.0, 4.0, p);
  Complex s = mp::sqrt(z);
  CHECK(mp::abs(s * s - z) < mp::two_pow(240, p));
  Complex w = mp::root_of_unity(3, 7, p);
  CHECK(mp::abs(mp::pow(w, 7) - Complex(Real::from(1L, p))) < mp::two_pow(240, p));
}

TEST_CASE("kernel of the identity is empty") {
  const mp::Bits p = 128;
  auto k = linalg::kernel_and_reduce(linalg::identity(5, p), Real::from(1e-20, p));
  CHECK(k.dim() == 0);
}

TEST_CASE("equal columns give the kernel vector (1, -1, 0, ...)") {
  const mp::Bits p = 200;
  std::mt19937_64 rng(7);
  mp::CMatrix m = integer_matrix(rng, 6, 5, 9, p);
  m.col(1) = m.col(0);
  auto k = linalg::kernel_and_reduce(m, linalg::default_tolerance(p));
  REQUIRE(k.dim() == 1);
  Complex ratio = k.rows(0, 0) / k.rows(0, 1);
  CHECK(mp::abs(ratio + Complex(Real::from(1L, p))) < mp::two_pow(150, p));
  for (int j = 2; j < 5; ++j) CHECK(mp::abs(k.rows(0, j)) < mp::two_pow(150, p));
}

TEST_CASE("kernel dimension equals the exact rank deficiency") {
  const mp::Bits p = 192;
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 12; ++trial) {
    int rows = 4 + trial % 5, cols = 5 + trial % 4, r = 1 + trial % std::min(rows, cols);
    mp::CMatrix m = linalg::mul(integer_matrix(rng, rows, r, 5, p), integer_matrix(rng, r, cols, 5, p));
    Real tol = linalg::default_tolerance(p);
    auto k = linalg::kernel_and_reduce(m, tol);
    CHECK(k.dim() == cols - r);
    Real mn = linalg::frobenius_norm(m);
    for (Eigen::Index i = 0; i < k.dim(); ++i) {
      mp::CVector v = k.rows.row(i).transpose();
      mp::CVector mv = linalg::mul(m, v);
      mp::CMatrix vm = v;
      CHECK(linalg::frobenius_norm(mv) <= tol * mn * linalg::frobenius_norm(vm));
    }
    // Normal form is idempotent.
    auto again = linalg::reduce_rows(k.rows, tol);
    if (k.dim() > 0) {
      mp::CMatrix diff = again.rows - k.rows;
      CHECK(linalg::max_abs(diff) < mp::two_pow(120, p));
    }
  }
}

TEST_CASE("rank decisions near the threshold are refused") {
  const mp::Bits p = 128;
  mp::CMatrix m = linalg::identity(3, p);
  Real tol = mp::two_pow(40, p);
  m(2, 2) = Complex(tol * 2L);
  CHECK_THROWS_AS(linalg::colpiv_qr(m, tol), RankUnstable);
  m(2, 2) = Complex(tol / 1000L);
  CHECK(linalg::colpiv_qr(m, tol).rank == 2);
}

TEST_CASE("singular values of a rotated diagonal matrix") {
  const mp::Bits p = 160;
  mp::CMatrix d = linalg::zeros(3, 3, p);
  d(0, 0) = Complex(Real::from(5L, p));
  d(1, 1) = Complex(Real::from(2L, p));
  d(2, 2) = Complex(Real::from(1L, p) / 4L);
  std::mt19937_64 rng(3);
  mp::CMatrix q = linalg::image_basis(integer_matrix(rng, 3, 3, 7, p), mp::two_pow(100, p));
  auto sv = linalg::singular_values(linalg::mul(q, d));
  CHECK(mp::abs(sv[0] - Real::from(5L, p)) < mp::two_pow(140, p));
  CHECK(mp::abs(sv[2] - Real::from(0.25, p)) < mp::two_pow(140, p));
}

TEST_CASE("solve recovers an exact solution") {
  const mp::Bits p = 160;
  std::mt19937_64 rng(5);
  mp::CMatrix a = integer_matrix(rng, 5, 3, 6, p);
  mp::CMatrix x = integer_matrix(rng, 3, 2, 6, p);
  mp::CMatrix got = linalg::solve(a, linalg::mul(a, x));
  CHECK(linalg::max_abs(mp::CMatrix(got - x)) < mp::two_pow(140, p));
}

TEST_CASE("ntt product agrees with schoolbook") {
  std::mt19937_64 rng(1);
  for (std::uint64_t p : {1000003ULL, 4294967291ULL, (1ULL << 61) - 1}) {
    std::uniform_int_distribution<std::uint64_t> d(0, p - 1);
    std::vector<std::uint64_t> a(300), b(257);
    for (auto& x : a) x = d(rng);
    for (auto& x : b) x = d(rng);
    CHECK(ntt::multiply(a, b, p, 500) == ntt::schoolbook(a, b, p, 500));
  }
}

TEST_CASE("series inverse and the binomial root") {
  ModRing r{1000003};
  auto one_plus_q = PowerSeries<ModRing>::constant(r, 1, 20) + PowerSeries<ModRing>::monomial(r, 1, 20);
  auto inv = inverse(one_plus_q);
  for (std::size_t n = 0; n < 20; ++n) CHECK(inv[n] == r.from_int(n % 2 ? -1 : 1));

  // V^2 - (1 + U) with u = q: sqrt(1 + q) = 1 + q/2 - q^2/8 + ...
  Bivariate<ModRing> phi{r, {{r.from_int(-1), r.from_int(-1)}, {0}, {1}}};
  auto u = PowerSeries<ModRing>::monomial(r, 1, 200);
  auto v0 = PowerSeries<ModRing>::constant(r, 1, 1);
  auto v = series_newton_root(phi, u, v0, 200);
  CHECK(v[1] == arith::invmod(2, r.p));
  CHECK(v[2] == r.mul(r.neg(1), arith::invmod(8, r.p)));
  CHECK((v * v - (u + PowerSeries<ModRing>::constant(r, 1, 200))).valuation() == 200);

  // Identity case V - U.
  Bivariate<ModRing> ident{r, {{0, r.from_int(-1)}, {1}}};
  auto w = PowerSeries<ModRing>::monomial(r, 1, 50) + PowerSeries<ModRing>::monomial(r, 7, 50);
  auto got = series_newton_root(ident, w, w.truncated(3), 50);
  CHECK(got.coeffs() == w.coeffs());
}

TEST_CASE("newton lifting with a non-unit derivative") {
  // V^2 - U^2 (1 + U): root v = q sqrt(1 + q), derivative 2v has valuation 1.
  ModRing r{998244853};
  Bivariate<ModRing> phi{r, {{0, 0, r.from_int(-1), r.from_int(-1)}, {0}, {1}}};
  // u is needed to one term past B
  auto u = PowerSeries<ModRing>::monomial(r, 1, 301);
  auto seed = PowerSeries<ModRing>::monomial(r, 1, 2);
  auto v = series_newton_root(phi, u, seed, 300);
  CHECK(evaluate(phi, u, v).truncated(300).valuation() == 300);
  CHECK(v[2] == arith::invmod(2, r.p));
  CHECK_THROWS_AS(series_newton_root(phi, u.truncated(300), seed, 300), std::invalid_argument);
  CHECK_THROWS_AS(series_newton_root(phi, u, PowerSeries<ModRing>::monomial(r, 1, 1), 300), PrecisionError);
}

TEST_CASE("random newton lifts vanish exactly mod p") {
  std::mt19937_64 rng(99);
  ModRing r{1000000007};
  std::uniform_int_distribution<std::uint64_t> d(0, r.p - 1);
  for (int trial = 0; trial < 10; ++trial) {
    // Phi(U, V) = (V - c) * a(U) + U * b(U, V): root through V = c at U = 0.
    std::uint64_t c = d(rng);
    Bivariate<ModRing> phi{r, std::vector<std::vector<std::uint64_t>>(4, std::vector<std::uint64_t>(4, 0))};
    for (auto& row : phi.c)
      for (std::size_t i = 1; i < row.size(); ++i) row[i] = d(rng);
    std::uint64_t a0 = 1 + d(rng) % (r.p - 1);
    phi.c[1][0] = r.add(phi.c[1][0], a0);
    phi.c[0][0] = r.sub(phi.c[0][0], r.mul(a0, c));
    auto u = PowerSeries<ModRing>::monomial(r, 1, 400);
    for (std::size_t n = 2; n < 400; ++n) u[n] = d(rng);
    auto v = series_newton_root(phi, u, PowerSeries<ModRing>::constant(r, c, 1), 400);
    CHECK(evaluate(phi, u, v).valuation() == 400);
  }
}

TEST_CASE("complex newton lift residual is below half precision") {
  ComplexRing r{200};
  Bivariate<ComplexRing> phi{r, {{r.from_int(-1), r.from_int(-1)}, {r.zero()}, {r.one()}}};
  auto u = PowerSeries<ComplexRing>::monomial(r, 1, 40);
  auto v = series_newton_root(phi, u, PowerSeries<ComplexRing>::constant(r, r.one(), 1), 40);
  auto res = evaluate(phi, u, v);
  for (std::size_t n = 0; n < 40; ++n) CHECK(mp::abs(res[n]) < mp::two_pow(100, 200));
}

TEST_CASE("rational reconstruction") {
  const mp::Bits p = 700;
  CHECK(rational_reconstruct(Real(mpq_class(1, 3), p)).value == mpq_class(1, 3));
  CHECK(rational_reconstruct(Real::zero(p)).value == 0);
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<long> num(-(1L << 40), 1L << 40);
  std::uniform_int_distribution<long> den(1, 1L << 40);
  for (int i = 0; i < 1000; ++i) {
    mpq_class q(num(rng), den(rng));
    q.canonicalize();
    // height <= 80 bits, precision >= 4 x height
    auto got = rational_reconstruct(Complex(Real(q, 4 * 80 + 16)));
    CHECK(got.value == q);
  }
  Real noise = mp::sqrt(Real::from(2L, 200));
  CHECK_THROWS_AS(rational_reconstruct(noise), PrecisionError);
  RatReconOptions hint;
  hint.denom_hint = mpz_class(7 * 11);
  CHECK(rational_reconstruct(Real(mpq_class(5, 77), 300), hint).value == mpq_class(5, 77));
}

TEST_CASE("cyclotomic field arithmetic") {
  CycloField k(9);
  CHECK(k.degree() == 6);
  auto z = k.zeta_pow(1);
  auto a = k.add(k.from_int(3), k.mul(z, k.from_int(-2)));
  auto b = k.inv(a);
  auto one = k.mul(a, b);
  CHECK(k.is_zero(k.sub(one, k.one())));
  CHECK(k.is_zero(k.sub(k.zeta_pow(9), k.one())));
  const mp::Bits p = 128;
  Complex ea = k.embed(a, 2, p), eb = k.embed(b, 2, p);
  CHECK(mp::abs(ea * eb - Complex(Real::from(1L, p))) < mp::two_pow(110, p));
  Complex ec = k.embed(k.conj(a), 2, p);
  CHECK(mp::abs(ec - mp::conj(ea)) < mp::two_pow(110, p));
  auto phi8 = cyclotomic_polynomial(8);
  CHECK(phi8.size() == 5);
  CHECK(phi8[0] == 1);
  CHECK(phi8[4] == 1);
}

TEST_CASE("exact charpoly and kernel") {
  QMatrix m(RationalField{}, 3, 3);
  int vals[9] = {2, 1, 0, 1, 3, 1, 0, 1, 4};
  for (int i = 0; i < 9; ++i) m.data[static_cast<std::size_t>(i)] = vals[i];
  auto cp = charpoly(m);
  // det(X - M) = X^3 - 9 X^2 + 24 X - 18
  CHECK(cp[0] == -18);
  CHECK(cp[1] == 24);
  CHECK(cp[2] == -9);
  CHECK(cp[3] == 1);
  QMatrix s(RationalField{}, 2, 3);
  s(0, 0) = 1;
  s(0, 1) = 2;
  s(0, 2) = 3;
  s(1, 0) = 2;
  s(1, 1) = 4;
  s(1, 2) = 6;
  auto k = kernel(s);
  CHECK(k.cols == 2);
  CHECK(rank(s * k) == 0);
}
