#pragma once

#include <iosfwd>
#include <vector>

#include "modgal/exact.hpp"
#include "modgal/modsym.hpp"
#include "modgal/mp.hpp"
#include "modgal/newforms.hpp"

namespace modgal::periods {

using Series = std::vector<mp::Complex>;

// w_p = sum_{a mod p} (a|p) {oo, a/p} in M coordinates; p = 1 or an odd prime
// different from the level.  w_1 = {oo, 0}.
QMatrix winding_element(const modsym::Space& s, long p);

// The homology basis written in the twisted winding elements:
// gamma_j = sum_c coeffs(c, j) T^{power[c]} pi_S(w_{twist[c]}).
struct WindingDecomposition {
  long generator = 0;          // T = T_generator
  std::vector<long> twist;     // per column
  std::vector<int> power;      // per column
  QMatrix columns;             // 2g x 2g, homology coordinates
  QMatrix coeffs;              // columns^{-1}

  std::vector<long> twists_used() const;
};

// Columns T^k pi_S(w_p), k < g, are taken greedily over the candidate twists
// in the given order.  Throws Error if they do not span H_1 (Q).
WindingDecomposition winding_decomposition(const modsym::Space& s, const std::vector<long>& candidates,
                                           long generator = 0);
std::vector<long> default_twists(int ell, long largest = 19);

// Terms of the q-series needed for the integral over w_p to reach 2^(-prec).
std::size_t terms_needed(int ell, long p, mp::Bits prec);

// Integral of f dtau over w_p, f a newform with the given character; a must
// hold terms_needed(ell, p, prec) coefficients.
mp::Complex winding_integral(const newforms::Characters& chars, int character, const Series& a, long p,
                             mp::Bits prec);

struct PeriodLattice {
  int ell = 0;
  mp::Bits prec = 0;
  mp::CMatrix lambda;  // 2g x g: lambda(j, i) = int_{gamma_j} f_i dtau
};

// Newforms in the order of NebentypusBasis::eigen.
PeriodLattice period_lattice(const modsym::Space& s, const std::vector<newforms::Eigenform>& forms,
                             const WindingDecomposition& wd, mp::Bits prec);

// max_{j, i, n <= nmax} |int_{T_n gamma_j} f_i - a_n(f_i) int_{gamma_j} f_i|.
mp::Real adjointness_residual(const modsym::Space& s, const std::vector<newforms::Eigenform>& forms,
                              const PeriodLattice& L, long nmax);

// x_k = (1/ell) sum_j plane(j, k) lambda(j, .): the eigenplane generators in
// C^g, a g x 2 matrix.
mp::CMatrix eigenplane_points(const PeriodLattice& L, const FpMatrix& plane);

// Text cache: a header with ell, g and the precision, then the entries as
// hexadecimal floats.
void write_lattice(std::ostream& os, const PeriodLattice& L);
PeriodLattice read_lattice(std::istream& is);

}  // namespace modgal::periods
