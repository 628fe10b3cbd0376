#pragma once

#include <string>
#include <vector>

#include "modgal/mp.hpp"
#include "modgal/newforms.hpp"

namespace modgal::eisenstein {

using Series = std::vector<mp::Complex>;
using newforms::Characters;

// sum_{a mod modulus} chi(a) exp(2 pi i a / modulus), chi given by its table.
mp::Complex gauss_sum(const std::vector<mp::Complex>& chi, mp::Bits prec);
// Gauss sum of the even character with index i mod ell.
mp::Complex gauss_sum(const Characters& chars, int i, mp::Bits prec);
// Legendre symbol mod p, with (.|1) = 1.
mp::Complex legendre_gauss_sum(long p, mp::Bits prec);

// Weight-2 Eisenstein series E_2^{psi,phi} at prime level: one of psi, phi
// is the trivial character mod 1, the other the nontrivial even character
// `character` mod ell.
struct E2Pair {
  bool chi_first = true;  // E_2^{chi,1} if true, E_2^{1,chi} otherwise
  int character = 1;
};

Series e2_qexp(const Characters& chars, const E2Pair& e, std::size_t B, mp::Bits prec);

struct Fricke {
  mp::Complex scalar;
  E2Pair image;
};
// W_ell E_2^{psi,phi} = scalar * E_2^{image}.
Fricke fricke_e2(const Characters& chars, const E2Pair& e, mp::Bits prec);

// Cusps of X_1(ell): above infinity (width 1) and above 0 (width ell), each
// indexed by the class +-d of the lower-right entry of the chart matrix.
struct Cusp {
  bool above_zero = false;
  int d = 1;  // 1 <= d <= (ell-1)/2

  std::string label() const;
  bool operator==(const Cusp& o) const { return above_zero == o.above_zero && d == o.d; }
};
std::vector<Cusp> all_cusps(int ell);  // above infinity first, then above 0
Cusp cusp_above_zero(int ell, long d);
// The three cusps carrying the simple poles: c1 = Gamma_1(ell) 0 and the
// rational cusps where e_{1,2}, e_{1,3} survive.
std::vector<Cusp> pole_cusps(int ell);

// A weight-2 form as a sum of pieces with pure nebentypus.  Each piece stores
// its expansion at infinity and the expansion of its image under W_ell.
struct Piece {
  int character = 0;
  Series at_inf;
  Series at_zero;
};
struct Form {
  std::vector<Piece> pieces;
};

// lambda_ell(f) for a newform with the given character and coefficients.
mp::Complex fricke_pseudo_eigenvalue(const Characters& chars, int character, const Series& a, mp::Bits prec);
Form newform_form(const Characters& chars, int character, const Series& a, mp::Bits prec);
Form e2_form(const Characters& chars, const E2Pair& e, std::size_t B, mp::Bits prec);
Form linear_combination(const std::vector<std::pair<mp::Complex, const Form*>>& terms);

// Expansion in the local parameter of the chart at the cusp.
Series expansion_at(const Characters& chars, const Form& f, const Cusp& c);

struct CuspExpansionTable {
  std::vector<Cusp> cusps;
  std::vector<Series> series;  // parallel to cusps
};
CuspExpansionTable all_cusp_expansions(const Characters& chars, const Form& f);

struct E12E13 {
  Form e12, e13;
  // leading (constant) terms at every cusp, parallel to all_cusps
  std::vector<mp::Complex> lead12, lead13;
};
// Throws Error when a certificate fails: a required zero is above
// 2^(-prec/2) or a required nonzero below 2^(-prec/4).
E12E13 build_e12_e13(const Characters& chars, std::size_t B, mp::Bits prec);

}  // namespace modgal::eisenstein
