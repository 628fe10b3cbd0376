#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "modgal/exact.hpp"
#include "modgal/modsym.hpp"
#include "modgal/mp.hpp"
#include "modgal/newforms.hpp"
#include "modgal/series.hpp"

namespace modgal::qexp {

using ModSeries = PowerSeries<ModRing>;

struct ExpansionPrime {
  std::uint64_t p = 0;
  std::uint64_t root = 0;            // zeta_m -> root defines the split prime used for expansion
  std::vector<std::uint64_t> roots;  // root^j for j prime to m: all roots of Phi_m mod p
  double bound = 0;                  // on |denominator * power-basis coefficient|
};

// Smallest admissible p > max(above, 2 * denominator * coefficient bound).
ExpansionPrime choose_prime(const newforms::NebentypusBasis& nb, std::size_t B, long denominator,
                            std::uint64_t above = 0);

struct BaseSeries {
  ModSeries e4, e6, u;  // u = 1/j
  ModSeries q2dj;       // q^2 dj/dq, a unit with constant term -1
};
BaseSeries base_series(std::size_t B, std::uint64_t p);

// Bounds on deg_U of the plane equation: v = omega dq/(q dj) for trivial
// nebentypus, v = (omega/omega0)^o (the degree of v on X_0(ell)) otherwise.
std::size_t trivial_degU(int ell, int g0);
std::size_t nontrivial_degU(int ell, int g, int order);

// Echelon-minimal relation Phi(u, v) = 0 with deg_U <= degU_bound and
// deg_V <= degV: the first linear dependency among the columns u^i v^k taken
// in the order (i, k), found with at least twice as many coefficients as
// unknowns.
Bivariate<ModRing> find_equation(const ModSeries& v_short, const ModSeries& u, std::size_t degU_bound,
                                 std::size_t degV);

// Trivial nebentypus: omega to O(q^B) from a short expansion, through
// v = omega dq / (q dj).
ModSeries expand_trivial(const ModSeries& omega_short, const BaseSeries& base, int ell, int g0, std::size_t B);
// Character of order o > 1: through v = (omega / omega0)^o with omega0 of
// trivial nebentypus already known to O(q^B).
ModSeries expand_nontrivial(const ModSeries& omega_short, const ModSeries& omega0, int order, const BaseSeries& base,
                            int ell, int g, std::size_t B);

// o-th root of v whose leading part agrees with the short series w0.
ModSeries series_root(const ModSeries& v, const ModSeries& w0, int order);

// One echelon form with coefficients (1/denom) sum_k num[n * phi + k] zeta^k.
struct ExpandedForm {
  int character = 0;
  std::size_t row = 0;
  long denom = 1;
  std::size_t phi = 1;
  std::vector<long> num;

  std::size_t size() const { return phi ? num.size() / phi : 0; }
  Cyclo coefficient(std::size_t n) const;
};

struct Expansion {
  int ell = 0;
  std::size_t B = 0;
  std::uint64_t prime = 0;  // 0 when the classical route was used
  std::vector<ExpandedForm> forms;

  const ExpandedForm& form(int character, std::size_t row) const;
  // a_0..a_{B-1} of newform j of nb, as complex numbers.
  std::vector<mp::Complex> eigenform(const newforms::NebentypusBasis& nb, std::size_t j, mp::Bits prec) const;
};

struct ExpandOptions {
  bool force_classical = false;
  std::size_t check_terms = 200;  // prefix compared exactly with the classical expansion
  std::uint64_t prime_above = 0;
};

// Every form of every nonzero S_2(eps) to O(q^B).  Level 13 has no form of
// trivial nebentypus and always takes the classical route.
Expansion expand_all(const modsym::Space& s, std::size_t B, const ExpandOptions& opt = {});

void write_cache(std::ostream& os, const Expansion& e, const std::string& cusp_label = "");
Expansion read_cache(std::istream& is);

}  // namespace modgal::qexp
