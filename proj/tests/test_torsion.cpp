#include <doctest.h>

#include "modgal/linalg.hpp"
#include "modgal/torsion.hpp"
#include "support.hpp"

using namespace modgal;

namespace {

const support::Level& level11() {
  static const support::Level lv = support::make_level(11, 256);
  return lv;
}

double norm(const mp::CVector& v) {
  double s = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += mp::abs2(v(i)).to_double();
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("reduction modulo the lattice") {
  const auto& L = level11().L;
  const auto& lam = L.lambda;
  mp::CVector z(1);
  z(0) = lam(0, 0) * 3L - lam(1, 0) * 2L + mp::Complex::from(0.01, 0.02, L.prec);
  const auto r = torsion::reduce_mod_lattice(L, z);
  CHECK(norm(r - mp::CVector::Constant(1, mp::Complex::from(0.01, 0.02, L.prec))) < 1e-60);
  // idempotent
  CHECK(norm(torsion::reduce_mod_lattice(L, r) - r) < 1e-60);
}

TEST_CASE("Newton moves the base points by a prescribed Abel-Jacobi image") {
  const auto& lv = level11();
  const auto& A = *lv.A;
  const auto b = torsion::base_points(A);
  CHECK(b.points.size() == 1);
  CHECK(b.sigma_min.to_double() > 0);
  mp::CVector target(1);
  target(0) = mp::Complex::from(0.3 * 0.05 * b.sigma_min.to_double(), -0.001, A.precision());
  const auto moved = torsion::newton_divisor(A, b, target);
  const auto got = torsion::aj_short(A, b.points[0].cusp, b.points[0].q, moved[0].q);
  CHECK(norm(got - target) < 1e-60);

  mp::CVector big(1);
  big(0) = mp::Complex::from(0.4, 0.1, A.precision());
  const int m = torsion::choose_m(big, b);
  CHECK(std::hypot(0.4, 0.1) / std::ldexp(1.0, m) < 0.05 * b.sigma_min.to_double());
  CHECK(std::hypot(0.4, 0.1) / std::ldexp(1.0, m - 1) >= 0.05 * b.sigma_min.to_double());
}

TEST_CASE("level 11: ell-torsion generators of the eigenplane of Delta") {
  const auto& lv = level11();
  const auto& A = *lv.A;
  const auto es = newforms::eigen_system_mod_l(*lv.s, TargetForm::parse("delta"));
  const auto x = periods::eigenplane_points(lv.L, es.plane);
  const auto tp = torsion::torsion_rep(A, lv.L, x);  // checks [D] != 0 and 11 [D] = 0
  CHECK_FALSE(A.is_zero(tp.d1));
  CHECK(A.is_zero(A.scalar_mul(11, tp.d1)));
  CHECK_FALSE(A.same_class(tp.d1, tp.d2));
  // the Abel-Jacobi map is additive
  const auto sum = torsion::class_of(A, lv.L, x.col(0) + x.col(1));
  CHECK(A.same_class(sum, A.add(tp.d1, tp.d2)));
}
