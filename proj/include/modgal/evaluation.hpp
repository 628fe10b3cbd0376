#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

#include "modgal/jacobian.hpp"
#include "modgal/mp.hpp"
#include "modgal/ratrecon.hpp"
#include "modgal/torsion.hpp"

namespace modgal::evaluation {

using jacobian::Ambient;
using jacobian::Place;
using jacobian::Subspace;

// The divisors C1 (degree 3g + 2) and C2 (degree g + 1), supported on the
// pole cusps c1, c2, c3, and the rational cusps A, B off their support.
struct Setup {
  std::vector<Place> c1;
  std::vector<Place> c12;  // C1 + C2
  jacobian::Cusp a, b;
};
Setup choose_setup(const Ambient& A);

// H^0(3 D0 - D - C1), a line spanned by s_D with div s_D = -3 D0 + D + C1 + E_D.
Subspace rigidify(const Ambient& A, const Subspace& wd, const Setup& st);
// H^0(3 D0 - C1 - E_D) = {v : v W_D ⊂ s_D V}.
Subspace residual_space(const Ambient& A, const Subspace& wd, const Subspace& red);
// t_D spanning H^0(3 D0 - C1 - C2 - E_D), and alpha(D) = t_D(A) / t_D(B).
mp::Complex alpha(const Ambient& A, const Subspace& wd, const Setup& st);
// Value at a cusp off the support of D0 of the function v / f0^3.
mp::Complex value_at_cusp(const Ambient& A, const mp::CVector& v, const jacobian::Cusp& c);

struct PlanePoint {
  int a = 0, b = 0;  // the class a D1 + b D2
  mp::Complex alpha;
};

// alpha at the ell^2 - 1 nonzero classes of the plane.  With `check`, every
// row a D1 + b D2 (a = 0..ell-1) is verified to close up and no point of the
// plane to be the zero class.
std::vector<PlanePoint> enumerate_plane(const Ambient& A, const torsion::TorsionPlane& tp, const Setup& st,
                                        bool check = true);

// prod (X - r) by a product tree; coefficients lowest degree first.
std::vector<mp::Complex> poly_from_roots(const std::vector<mp::Complex>& roots);

struct RationalPoly {
  std::vector<mpq_class> c;  // lowest degree first, monic
  double min_jump = 0;       // smallest continued-fraction jump over the coefficients
  mpz_class denominator;     // lcm of the coefficient denominators
};
// Recognises every coefficient as a rational number; PrecisionError otherwise.
RationalPoly recognize(const std::vector<mp::Complex>& coeffs, double jump = 1e8);

// gcd(F, F') = 1 mod p, for p not dividing the denominator.
bool squarefree_mod(const RationalPoly& f, std::uint64_t p);
// gcd(F, F') mod each of the first `count` primes above 10^6 not dividing the
// denominator; returns the number of primes where F is squarefree.
int squarefree_primes(const RationalPoly& f, int count = 5);

}  // namespace modgal::evaluation
