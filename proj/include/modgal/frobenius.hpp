#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <vector>

#include "modgal/evaluation.hpp"
#include "modgal/mp.hpp"

namespace modgal::frobenius {

// [[a, b], [c, d]] over F_ell acting on column vectors (a, b)^T of plane
// coordinates: sigma(x D1 + y D2) has coordinates M (x, y)^T.
struct Mat2 {
  int a = 1, b = 0, c = 0, d = 1;
};

struct Class {
  int trace = 0, det = 1;
  bool scalar = false;
  std::vector<Mat2> elements;
};

// Conjugacy classes of GL_2(F_ell), keyed by (trace, det, scalar).
std::vector<Class> similarity_classes(int ell);

// S: the subgroup of F_ell^* of odd order (ell - 1) / 2^v.
std::vector<int> odd_part_subgroup(int ell);

// Orbits of S (acting by scalars) on the nonzero plane vectors.
struct Quotient {
  int ell = 0;
  std::vector<int> S;
  std::vector<int> orbit_of;                 // index x + ell * y -> orbit, -1 for 0
  std::vector<std::pair<int, int>> orbit_rep;
  std::vector<mp::Complex> roots;            // sum over the orbit of alpha
};
Quotient quotient_data(int ell, const std::vector<evaluation::PlanePoint>& plane);

// A class of GL_2 / S with its |S| lifts to GL_2.
struct QuotientClass {
  std::vector<std::size_t> lifts;  // indices into the class list
  std::size_t size = 0;
};
std::vector<QuotientClass> quotient_classes(const std::vector<Class>& classes, const std::vector<int>& S, int ell);

// Dokchitser resolvents Gamma_C(X) = prod_{sigma in C} (X - sum_O h(a_O) a_{sigma O})
// for h = X^hdeg, stored as integer polynomials in Y = D^(1 + hdeg) X with D
// the denominator of F~.
struct Resolvents {
  int ell = 0;
  int hdeg = 2;
  mpz_class D;
  std::vector<mpq_class> ftilde;  // F~, monic, lowest degree first
  std::vector<Class> classes;
  std::vector<QuotientClass> qclasses;
  std::vector<std::vector<mpz_class>> G;  // per quotient class
  double min_margin_bits = 0;             // worst distance of a scaled coefficient from its integer
};

// Refines the roots of F~ to the precision the coefficient sizes require, and
// tries h = X^2, X^3, X, X^4 until the product of all resolvents is
// squarefree modulo a prime (so they are pairwise coprime over Q).
Resolvents build_resolvents(const Quotient& q, const evaluation::RationalPoly& ftilde);

// Quotient classes whose resolvent vanishes at the trace of Frob_p; throws
// BadPrime when p divides D or the discriminant of F~.
std::vector<std::size_t> vanishing_qclasses(const Resolvents& r, const mpz_class& p);
// Index of the quotient class of Frob_p; throws BadPrime when p divides D or
// the discriminant of F~ or no class or several classes vanish.
std::size_t frobenius_qclass(const Resolvents& r, const mpz_class& p);

struct FrobeniusResult {
  std::size_t qclass = 0;
  std::size_t cls = 0;  // the lift with determinant det_target
  long trace = 0;       // a_p mod ell in [0, ell)
};
// det_target = eps(p) p^(k-1) mod ell selects the lift.
FrobeniusResult frobenius(const Resolvents& r, const mpz_class& p, long det_target);

// Degrees of the irreducible factors of F mod p (distinct-degree
// factorisation), sorted.
std::vector<int> factor_degrees(const std::vector<mpq_class>& f, const mpz_class& p);
// Orbit lengths of <M> on the nonzero vectors of F_ell^2, sorted.
std::vector<int> orbit_lengths(const Mat2& m, int ell);

// x^e mod (f, p), f monic of degree >= 1 with coefficients reduced mod p.
std::vector<mpz_class> powmod_x(const mpz_class& e, const std::vector<mpz_class>& f, const mpz_class& p);

}  // namespace modgal::frobenius
