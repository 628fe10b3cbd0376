#include "modgal/evaluation.hpp"

#include <cmath>

#include "modgal/arith.hpp"
#include "modgal/errors.hpp"
#include "modgal/exact.hpp"
#include "modgal/linalg.hpp"

namespace modgal::evaluation {

using mp::CMatrix;
using mp::Complex;
using mp::CVector;
using mp::Real;
using Eigen::Index;

Setup choose_setup(const Ambient& A) {
  Setup st;
  std::vector<jacobian::Cusp> free;
  for (const auto& c : A.cusps())
    if (c.above_zero && !A.is_pole(c)) free.push_back(c);
  if (free.size() < 2) throw ConfigExcluded("fewer than two rational cusps off the poles");
  st.a = free[0];
  st.b = free[1];
  const int g = A.genus();
  const auto& poles = A.poles();
  std::vector<int> m1(3, 0), m12(3, 0);
  for (int k = 0; k < 4 * g + 3; ++k) {
    if (k < 3 * g + 2) ++m1[static_cast<std::size_t>(k % 3)];
    ++m12[static_cast<std::size_t>(k % 3)];
  }
  for (std::size_t i = 0; i < 3; ++i) {
    const jacobian::ChartPoint p{poles[i], Complex::zero(A.precision())};
    if (m1[i]) st.c1.push_back({p, m1[i]});
    st.c12.push_back({p, m12[i]});
  }
  return st;
}

Subspace rigidify(const Ambient& A, const Subspace& wd, const Setup& st) {
  try {
    return A.impose(wd, st.c1, 1);
  } catch (const RankUnstable& e) {
    throw NonGeneric(std::string("rigidify: ") + e.what());
  }
}

Subspace residual_space(const Ambient& A, const Subspace& wd, const Subspace& red) {
  return A.divide(red.c.col(0), wd, A.genus() + 2);
}

Complex value_at_cusp(const Ambient& A, const CVector& v, const jacobian::Cusp& c) {
  if (A.is_pole(c)) throw std::invalid_argument("value_at_cusp: cusp in the support of D0");
  const jacobian::ChartPoint p{c, Complex::zero(A.precision())};
  const Complex top = linalg::mul(A.taylor_rows(p, 3, 1), v)(0);
  const Complex& f1 = A.f0(c)[1];
  return top / (f1 * f1 * f1);
}

Complex alpha(const Ambient& A, const Subspace& wd, const Setup& st) {
  const Subspace red = rigidify(A, wd, st);
  const Subspace res = residual_space(A, wd, red);
  const Subspace t = A.impose(res, st.c12, 1);
  const CVector v = t.c.col(0);
  const Complex tb = value_at_cusp(A, v, st.b);
  if (mp::abs(tb) < mp::two_pow(A.precision() / 4, A.precision()) * linalg::max_abs(t.c))
    throw NonGeneric("alpha: t_D vanishes at B");
  return value_at_cusp(A, v, st.a) / tb;
}

std::vector<PlanePoint> enumerate_plane(const Ambient& A, const torsion::TorsionPlane& tp, const Setup& st,
                                        bool check) {
  const int ell = A.ell();
  std::vector<PlanePoint> out;
  Subspace row = A.w0();  // b D2
  for (int b = 0; b < ell; ++b) {
    Subspace cur = row;
    for (int a = 0; a < ell; ++a) {
      if (a > 0) cur = A.add(cur, tp.d1);
      if (a == 0 && b == 0) continue;
      if (check && A.is_zero(cur))
        throw PrecisionError("enumerate_plane: " + std::to_string(a) + " D1 + " + std::to_string(b) + " D2 is zero");
      out.push_back({a, b, alpha(A, cur, st)});
    }
    if (check && !A.same_class(A.add(cur, tp.d1), row))
      throw PrecisionError("enumerate_plane: row " + std::to_string(b) + " does not close up");
    row = A.add(row, tp.d2);
  }
  if (check && !A.is_zero(row)) throw PrecisionError("enumerate_plane: ell D2 is not zero");
  return out;
}

namespace {

std::vector<Complex> poly_mul(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  const mp::Bits prec = a.front().precision();
  std::vector<Complex> c(a.size() + b.size() - 1, Complex::zero(prec));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

std::vector<Complex> tree(const std::vector<Complex>& r, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return {-r[lo], Complex(Real::from(1L, r[lo].precision()))};
  const std::size_t mid = (lo + hi) / 2;
  return poly_mul(tree(r, lo, mid), tree(r, mid, hi));
}

}  // namespace

std::vector<Complex> poly_from_roots(const std::vector<Complex>& roots) {
  if (roots.empty()) return {Complex(1L)};
  return tree(roots, 0, roots.size());
}

RationalPoly recognize(const std::vector<Complex>& coeffs, double jump) {
  RationalPoly out;
  out.denominator = 1;
  out.min_jump = INFINITY;
  RatReconOptions opt;
  opt.jump = jump;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    RatRecon r;
    try {
      r = rational_reconstruct(coeffs[k], opt);
    } catch (const PrecisionError& e) {
      throw PrecisionError("coefficient of X^" + std::to_string(k) + " not recognized: " + e.what());
    }
    out.c.push_back(r.value);
    out.min_jump = std::min(out.min_jump, r.jump);
    mpz_lcm(out.denominator.get_mpz_t(), out.denominator.get_mpz_t(), r.value.get_den_mpz_t());
  }
  if (out.c.empty() || out.c.back() != 1) throw PrecisionError("recognized polynomial is not monic");
  return out;
}

bool squarefree_mod(const RationalPoly& f, std::uint64_t p) {
  if (mpz_divisible_ui_p(f.denominator.get_mpz_t(), p)) throw std::invalid_argument("p divides the denominator");
  PrimeField fp{p};
  std::vector<arith::u64> a;
  for (const auto& c : f.c) {
    mpz_class n = c.get_num() % static_cast<unsigned long>(p), d = c.get_den() % static_cast<unsigned long>(p);
    if (n < 0) n += static_cast<unsigned long>(p);
    a.push_back(fp.div(n.get_ui(), d.get_ui()));
  }
  return poly_gcd(fp, a, poly_derivative(fp, a)).size() == 1;
}

int squarefree_primes(const RationalPoly& f, int count) {
  int good = 0;
  arith::u64 p = 1000000;
  for (int tried = 0; tried < count;) {
    p = arith::next_prime(p);
    if (mpz_divisible_ui_p(f.denominator.get_mpz_t(), p)) continue;
    ++tried;
    if (squarefree_mod(f, p)) ++good;
  }
  return good;
}

}  // namespace modgal::evaluation
