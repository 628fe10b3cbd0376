#include "modgal/torsion.hpp"

#include <cmath>

#include "modgal/errors.hpp"
#include "modgal/linalg.hpp"

namespace modgal::torsion {

using mp::CMatrix;
using mp::Complex;
using mp::CVector;
using mp::Real;
using Eigen::Index;

namespace {

Complex two_pi_i(mp::Bits prec) { return {Real::zero(prec), mp::pi(prec) * 2L}; }

// sum_{n >= 1} b_n q^n / n
Complex antiderivative(const jacobian::Series& b, const Complex& q) {
  Complex acc = Complex::zero(q.precision());
  for (std::size_t n = b.size(); n-- > 1;) {
    acc += b[n] / static_cast<long>(n);
    acc *= q;
  }
  return acc;
}

Real norm2(const CVector& v) {
  Real s = Real::zero(v.size() ? v(0).precision() : 64);
  for (Index i = 0; i < v.size(); ++i) s += mp::abs2(v(i));
  return mp::sqrt(s);
}

// Real 2g x 2g matrix whose row j is lambda(j, .) split into real and
// imaginary parts.
CMatrix real_lattice(const periods::PeriodLattice& L) {
  const Index n = L.lambda.rows(), g = L.lambda.cols();
  CMatrix r = linalg::zeros(n, n, L.prec);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < g; ++i) {
      r(j, i) = Complex(L.lambda(j, i).real());
      r(j, g + i) = Complex(L.lambda(j, i).imag());
    }
  return r;
}

}  // namespace

CVector aj_short(const Ambient& A, const jacobian::Cusp& c, const Complex& q0, const Complex& q1) {
  const Complex tpi = two_pi_i(A.precision());
  CVector out(A.genus());
  for (int i = 0; i < A.genus(); ++i) {
    const auto& b = A.v2(static_cast<std::size_t>(i), c);
    out(i) = (antiderivative(b, q1) - antiderivative(b, q0)) / tpi;
  }
  return out;
}

CVector aj_derivative(const Ambient& A, const jacobian::Cusp& c, const Complex& q) {
  const Complex tpi = two_pi_i(A.precision());
  CVector out(A.genus());
  for (int i = 0; i < A.genus(); ++i) {
    const auto& b = A.v2(static_cast<std::size_t>(i), c);
    Complex acc = Complex::zero(A.precision());
    for (std::size_t n = b.size(); n-- > 1;) {
      acc *= q;
      acc += b[n];
    }
    out(i) = acc / tpi;
  }
  return out;
}

BasePoints base_points(const Ambient& A) {
  std::vector<jacobian::Cusp> order;
  for (const auto& c : A.cusps())
    if (c.above_zero && !A.is_pole(c)) order.push_back(c);
  for (const auto& c : A.cusps())
    if (!c.above_zero) order.push_back(c);
  for (const auto& c : A.cusps())
    if (c.above_zero && A.is_pole(c)) order.push_back(c);
  const int g = A.genus();
  if (static_cast<int>(order.size()) < g) throw ConfigExcluded("fewer cusps than the genus");
  BasePoints b;
  b.jacobian = CMatrix(g, g);
  for (int j = 0; j < g; ++j) {
    const double th = 0.3 + 0.7 * j;
    b.points.push_back({order[static_cast<std::size_t>(j)], Complex::from(0.1 * std::cos(th), 0.1 * std::sin(th), A.precision())});
    b.jacobian.col(j) = aj_derivative(A, b.points.back().cusp, b.points.back().q);
  }
  b.sigma_min = linalg::singular_values(b.jacobian).back();
  return b;
}

CVector reduce_mod_lattice(const periods::PeriodLattice& L, const CVector& z) {
  const Index n = L.lambda.rows(), g = L.lambda.cols();
  const CMatrix rt = real_lattice(L).transpose();
  CVector rhs(n);
  for (Index i = 0; i < g; ++i) {
    rhs(i) = Complex(z(i).real());
    rhs(g + i) = Complex(z(i).imag());
  }
  CVector t = linalg::solve(rt, rhs);
  CVector out = CVector::Constant(g, Complex::zero(L.prec));
  for (Index j = 0; j < n; ++j) {
    const Real c = t(j).real() - mp::floor(t(j).real() + Real::from(0.5, L.prec));
    for (Index i = 0; i < g; ++i) out(i) += L.lambda(j, i) * c;
  }
  return out;
}

int choose_m(const CVector& x, const BasePoints& b) {
  const double r = norm2(x).to_double(), s = 0.05 * b.sigma_min.to_double();
  int m = 0;
  while (r / std::ldexp(1.0, m) >= s) ++m;
  return m;
}

std::vector<ChartPoint> newton_divisor(const Ambient& A, const BasePoints& b, const CVector& target) {
  const int g = A.genus();
  const mp::Bits prec = A.precision();
  CVector delta = linalg::solve(b.jacobian, target);
  const Real tol = mp::two_pow(prec - 24, prec) * (norm2(target) + Real::from(1L, prec));
  for (int it = 0; it < 80; ++it) {
    CVector f = -target;
    CMatrix J(g, g);
    for (int j = 0; j < g; ++j) {
      const auto& p = b.points[static_cast<std::size_t>(j)];
      const Complex q1 = p.q + delta(j);
      if (mp::abs(q1).to_double() > 0.3) throw NonGeneric("newton_divisor: point left the chart");
      f += aj_short(A, p.cusp, p.q, q1);
      J.col(j) = aj_derivative(A, p.cusp, q1);
    }
    const CVector step = linalg::solve(J, f);
    delta -= step;
    if (norm2(f) < tol) {
      std::vector<ChartPoint> out;
      for (int j = 0; j < g; ++j) out.push_back({b.points[static_cast<std::size_t>(j)].cusp, b.points[static_cast<std::size_t>(j)].q + delta(j)});
      return out;
    }
  }
  throw PrecisionError("newton_divisor: no convergence");
}

std::vector<jacobian::Place> padding(const Ambient& A) {
  std::vector<jacobian::Cusp> free;
  for (const auto& c : A.cusps())
    if (c.above_zero && !A.is_pole(c)) free.push_back(c);
  for (const auto& c : A.cusps())
    if (!c.above_zero) free.push_back(c);
  std::vector<jacobian::Place> out;
  const int need = A.d0() - A.genus();
  for (int k = 0; k < need; ++k) {
    const auto& c = free[static_cast<std::size_t>(k) % free.size()];
    if (static_cast<std::size_t>(k) < free.size())
      out.push_back({{c, Complex::zero(A.precision())}, 1});
    else
      ++out[static_cast<std::size_t>(k) % free.size()].mult;
  }
  return out;
}

Subspace class_of(const Ambient& A, const periods::PeriodLattice& L, const CVector& x) {
  const BasePoints b = base_points(A);
  const CVector xr = reduce_mod_lattice(L, x);
  const int m = choose_m(xr, b);
  CVector target = xr;
  for (Index i = 0; i < target.size(); ++i) target(i) = mp::Complex(mp::ldexp(xr(i).real(), -m), mp::ldexp(xr(i).imag(), -m));
  const auto moved = newton_divisor(A, b, target);
  const auto pad = padding(A);
  std::vector<jacobian::Place> e1 = pad, e0 = pad;
  for (int j = 0; j < A.genus(); ++j) {
    e1.push_back({moved[static_cast<std::size_t>(j)], 1});
    e0.push_back({b.points[static_cast<std::size_t>(j)], 1});
  }
  Subspace d = A.sub(A.from_places(e1), A.from_places(e0));
  for (int k = 0; k < m; ++k) d = A.chord(d);  // (-2)^m [D]
  return m % 2 ? A.negate(d) : d;
}

TorsionPlane torsion_rep(const Ambient& A, const periods::PeriodLattice& L, const CMatrix& plane_points) {
  TorsionPlane t;
  const BasePoints b = base_points(A);
  t.m1 = choose_m(reduce_mod_lattice(L, plane_points.col(0)), b);
  t.m2 = choose_m(reduce_mod_lattice(L, plane_points.col(1)), b);
  t.d1 = class_of(A, L, plane_points.col(0));
  t.d2 = class_of(A, L, plane_points.col(1));
  for (const Subspace* d : {&t.d1, &t.d2}) {
    if (A.is_zero(*d)) throw PrecisionError("torsion_rep: generator is zero");
    if (!A.is_zero(A.scalar_mul(L.ell, *d))) throw PrecisionError("torsion_rep: generator is not ell-torsion");
  }
  return t;
}

}  // namespace modgal::torsion
