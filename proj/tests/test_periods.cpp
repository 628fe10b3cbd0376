#include <doctest.h>

#include <cmath>
#include <sstream>

#include "modgal/arith.hpp"
#include "modgal/linalg.hpp"
#include "modgal/periods.hpp"
#include "modgal/qexpansion.hpp"

using namespace modgal;
using namespace modgal::periods;

namespace {

struct Setup {
  modsym::Space s;
  newforms::NebentypusBasis nb;
  std::vector<newforms::Eigenform> forms;
  WindingDecomposition wd, wd_alt;
};

Setup make(int ell, mp::Bits prec) {
  Setup st{modsym::Space(ell), {}, {}, {}, {}};
  auto tw = default_twists(ell);
  st.wd = winding_decomposition(st.s, tw);
  st.wd_alt = winding_decomposition(st.s, std::vector<long>(tw.begin() + 1, tw.end()));
  std::size_t N = 0;
  for (auto* w : {&st.wd, &st.wd_alt})
    for (long p : w->twists_used()) N = std::max(N, terms_needed(ell, p, prec + 32));
  st.nb = newforms::nebentypus_bases(st.s, 64, prec);
  auto ex = qexp::expand_all(st.s, N + 8);
  for (std::size_t j = 0; j < st.nb.eigen.size(); ++j)
    st.forms.push_back({st.nb.eigen[j].character, ex.eigenform(st.nb, j, prec + 64)});
  return st;
}

mp::Real max_diff(const mp::CMatrix& a, const mp::CMatrix& b) {
  mp::Real d = mp::Real::zero(a(0, 0).precision());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) d = mp::max(d, mp::abs(a(i, j) - b(i, j)));
  return d;
}

}  // namespace

TEST_CASE("winding elements are star eigenvectors with sign (-1|p)") {
  for (int ell : {11, 17}) {
    modsym::Space s(ell);
    const QMatrix star = s.star();
    for (long p : {1L, 3L, 5L, 7L}) {
      const QMatrix w = winding_element(s, p);
      const int sign = p == 1 ? 1 : arith::legendre(-1, static_cast<arith::u64>(p));
      const QMatrix sw = star * w;
      for (std::size_t i = 0; i < w.rows; ++i) CHECK(sw(i, 0) == sign * w(i, 0));
    }
  }
  CHECK_THROWS(winding_element(modsym::Space(11), 11));
  CHECK_THROWS(winding_element(modsym::Space(11), 9));
}

TEST_CASE("series length for the winding integrals") {
  // x = exp(-2 pi / (3 sqrt 19)) = 0.61848...
  const double x = std::exp(-2 * M_PI / (3 * std::sqrt(19.0)));
  CHECK(x == doctest::Approx(0.618482).epsilon(1e-6));
  const std::size_t n = terms_needed(19, 3, 1000);
  CHECK(std::pow(x, static_cast<double>(n)) < std::pow(2.0, -990.0));
  CHECK(terms_needed(19, 3, 2000) > n);
  CHECK(terms_needed(19, 1, 1000) < n);
}

TEST_CASE("level 11: the lattice of X_1(11)") {
  const mp::Bits prec = 200;
  Setup st = make(11, prec);
  auto L = period_lattice(st.s, st.forms, st.wd, prec);
  REQUIRE(L.lambda.rows() == 2);
  // 2 pi i times the lattice is the Neron lattice of 11a3, real period 6.346046521397767.
  const mp::Complex two_pi_i(mp::Real::zero(prec), mp::pi(prec) * 2L);
  double best = 1e9;
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b) {
      mp::Complex z = (L.lambda(0, 0) * static_cast<long>(a) + L.lambda(1, 0) * static_cast<long>(b)) * two_pi_i;
      if (std::abs(z.imag().to_double()) < 1e-30 && z.real().to_double() > 1e-6)
        best = std::min(best, z.real().to_double());
    }
  CHECK(best == doctest::Approx(6.346046521397767).epsilon(1e-13));
  CHECK(adjointness_residual(st.s, st.forms, L, 10) < mp::two_pow(prec / 2, prec));
  auto L2 = period_lattice(st.s, st.forms, st.wd_alt, prec);
  CHECK(max_diff(L.lambda, L2.lambda) < mp::two_pow(prec / 2, prec));
}

TEST_CASE("level 17: adjointness, two winding routes, real period matrix") {
  const mp::Bits prec = 300;
  Setup st = make(17, prec);
  CHECK(st.wd.twists_used() != st.wd_alt.twists_used());
  auto L = period_lattice(st.s, st.forms, st.wd, prec);
  REQUIRE(L.lambda.rows() == 10);
  CHECK(adjointness_residual(st.s, st.forms, L, 10) < mp::two_pow(prec / 2, prec));
  auto L2 = period_lattice(st.s, st.forms, st.wd_alt, prec);
  CHECK(max_diff(L.lambda, L2.lambda) < mp::two_pow(prec / 2, prec));

  // Real 2g x 2g matrix of the lattice in R^{2g} = C^g.
  const Eigen::Index n = L.lambda.rows(), g = L.lambda.cols();
  mp::CMatrix r = linalg::zeros(n, n, prec);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < g; ++i) {
      r(j, i) = mp::Complex(L.lambda(j, i).real());
      r(j, g + i) = mp::Complex(L.lambda(j, i).imag());
    }
  auto sv = linalg::singular_values(r);
  CHECK(sv.back() > mp::Real(1e-6));

  // Eigenplane points have coordinates plane / ell in the lattice basis.
  auto es = newforms::eigen_system_mod_l(st.s, TargetForm{FormKind::Weight2, 0}, 30);
  mp::CMatrix x = eigenplane_points(L, es.plane);
  mp::CMatrix rhs = linalg::zeros(n, 2, prec);
  for (Eigen::Index k = 0; k < 2; ++k)
    for (Eigen::Index i = 0; i < g; ++i) {
      rhs(i, k) = mp::Complex(x(i, k).real());
      rhs(g + i, k) = mp::Complex(x(i, k).imag());
    }
  const mp::CMatrix rt = r.transpose();
  mp::CMatrix coords = linalg::solve(rt, rhs);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < 2; ++k) {
      const double want = static_cast<double>(es.plane(static_cast<std::size_t>(j), static_cast<std::size_t>(k))) / 17;
      CHECK(coords(j, k).real().to_double() == doctest::Approx(want).epsilon(1e-20));
    }
}

TEST_CASE("lattice cache round trip is exact") {
  const mp::Bits prec = 160;
  Setup st = make(11, prec);
  auto L = period_lattice(st.s, st.forms, st.wd, prec);
  std::stringstream ss;
  write_lattice(ss, L);
  auto R = read_lattice(ss);
  CHECK(R.ell == 11);
  CHECK(R.prec == prec);
  for (Eigen::Index j = 0; j < L.lambda.rows(); ++j)
    for (Eigen::Index i = 0; i < L.lambda.cols(); ++i) CHECK(R.lambda(j, i) == L.lambda(j, i));
}
