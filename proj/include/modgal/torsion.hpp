#pragma once

#include <vector>

#include "modgal/jacobian.hpp"
#include "modgal/mp.hpp"
#include "modgal/periods.hpp"

namespace modgal::torsion {

using jacobian::Ambient;
using jacobian::ChartPoint;
using jacobian::Subspace;

// int_{q0}^{q1} f_i dtau inside one chart, for every newform f_i.
mp::CVector aj_short(const Ambient& A, const jacobian::Cusp& c, const mp::Complex& q0, const mp::Complex& q1);

// d/dq of aj_short at q: f_i(q) / (2 pi i q).
mp::CVector aj_derivative(const Ambient& A, const jacobian::Cusp& c, const mp::Complex& q);

struct BasePoints {
  std::vector<ChartPoint> points;  // g points, |q| = 0.1 in distinct charts
  mp::CMatrix jacobian;            // g x g, columns aj_derivative at the points
  mp::Real sigma_min;
};
BasePoints base_points(const Ambient& A);

// Reduce z in C^g modulo the lattice to the representative with real
// lattice coordinates in [-1/2, 1/2).
mp::CVector reduce_mod_lattice(const periods::PeriodLattice& L, const mp::CVector& z);

// Smallest m with |x| / 2^m < 0.05 sigma_min.
int choose_m(const mp::CVector& x, const BasePoints& b);

// Points q_j' near the base points with sum_j int_{q_j}^{q_j'} f = target,
// by Newton's method; throws PrecisionError without convergence.
std::vector<ChartPoint> newton_divisor(const Ambient& A, const BasePoints& b, const mp::CVector& target);

// Cusps used to pad a degree-g divisor to degree d0, off the support of D0.
std::vector<jacobian::Place> padding(const Ambient& A);

// W_D of the class with Abel-Jacobi image x (mod the lattice).
Subspace class_of(const Ambient& A, const periods::PeriodLattice& L, const mp::CVector& x);

struct TorsionPlane {
  Subspace d1, d2;  // classes of the two generators
  int m1 = 0, m2 = 0;
};

// The classes of the eigenplane generators, checked to have exact order ell.
TorsionPlane torsion_rep(const Ambient& A, const periods::PeriodLattice& L, const mp::CMatrix& plane_points);

}  // namespace modgal::torsion
