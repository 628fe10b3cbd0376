#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "modgal/exact.hpp"
#include "modgal/modsym.hpp"
#include "modgal/mp.hpp"
#include "modgal/targets.hpp"

namespace modgal::newforms {

// Even Dirichlet characters mod ell: eps_i(g^k) = zeta_m^(i k), m = (ell-1)/2,
// g the least primitive root.  Values live in Q(zeta_m).
class Characters {
 public:
  explicit Characters(int ell);

  int ell() const { return ell_; }
  int m() const { return m_; }
  long generator() const { return g_; }
  int count() const { return m_; }
  int order(int i) const;
  int conj(int i) const { return (m_ - i) % m_; }
  // Exponent e with eps_i(a) = zeta_m^e, a a unit mod ell.
  int exponent(int i, long a) const;
  Cyclo value(const CycloField& K, int i, long a) const;
  mp::Complex embed(int i, long a, mp::Bits prec) const;  // zeta_m -> exp(2 pi i / m)
  std::uint64_t reduce(int i, long a, std::uint64_t P, std::uint64_t root) const;

 private:
  int ell_, m_;
  long g_;
  std::vector<int> dlog_;
};

// Exact matrix of T_n on H_1^+ in the basis of PlusSpaceModP::plus_basis.
QMatrix hecke_on_plus(const modsym::Space& s, long n);
QMatrix diamond_on_plus(const modsym::Space& s, long d);

// Smallest n in [2, bound] whose operator has a squarefree characteristic
// polynomial; `op(n)` supplies the operator.  Throws Error("no mild generator").
long find_hecke_generator(const std::function<QMatrix(long)>& op, long bound = 20);
long find_hecke_generator(const modsym::Space& s, long bound = 20);

struct Eigenform {
  int character = 0;          // index into Characters
  std::vector<mp::Complex> a;  // a_0 .. a_{B-1}
};

// Newforms of weight 2 and level ell as complex eigenvectors of the generator
// on H_1^+, with a_n for n < bound.
std::vector<Eigenform> numeric_eigenforms(const modsym::Space& s, std::size_t bound, mp::Bits prec,
                                          long generator = 0);

// Per even character: the echelon basis of S_2(eps) modulo a prime P
// (eps evaluated with zeta_m -> root), coefficients q^0..q^{B-1}.
struct BlockModP {
  int character = 0;
  std::vector<std::size_t> pivots;
  std::vector<std::vector<std::uint64_t>> forms;
};
std::vector<BlockModP> basis_mod_p(const modsym::Space& s, std::uint64_t P, std::uint64_t root, std::size_t B);

// Smallest prime P > lower with P = 1 mod m and P != ell, and the least
// primitive m-th root of unity mod P.
std::pair<std::uint64_t, std::uint64_t> admissible_prime(std::uint64_t lower, int m, int ell);

struct CharacterBlock {
  int character = 0;
  std::vector<std::size_t> pivots;
  std::vector<std::vector<Cyclo>> forms;  // echelon basis, d x B
  std::vector<std::size_t> eigenforms;    // indices into NebentypusBasis::eigen
  mp::CMatrix to_eigen;                   // eigen_j = sum_r to_eigen(j, r) forms_r
};

// The echelonized bases of all S_2(eps), exact in Q(zeta_m), with the
// numeric change of basis to the newforms.
struct NebentypusBasis {
  int ell = 0;
  CycloField K;
  std::vector<CharacterBlock> blocks;  // nonzero blocks only, by character index
  std::vector<Eigenform> eigen;        // newforms, a_n for n < pivot range
  std::uint64_t prime = 0;             // modulus used for the classical expansion

  const CharacterBlock* block(int character) const;
  // Complex q-expansion of eigenform j up to the stored length.
  std::vector<mp::Complex> eigen_expansion(std::size_t j, mp::Bits prec) const;
};

// Bound on the power-basis coefficients of every echelon form up to q^B:
// Deligne's bound pushed through the change of basis and the inverse
// Vandermonde matrix of the embeddings.
double coefficient_bound(const NebentypusBasis& nb, std::size_t B);

NebentypusBasis nebentypus_bases(const modsym::Space& s, std::size_t B, mp::Bits prec = 256);

// q-expansion (a_0..a_{B-1}) of an echelon form, from the modular-symbol
// Hecke action.
std::vector<Cyclo> classical_qexp(const NebentypusBasis& nb, int character, std::size_t row);

// Mod-ell eigenvalue system of the target on H_1 and its eigenplane.
struct EigenSystem {
  int ell = 0;
  TargetForm target;
  std::map<long, long> mu;              // p -> a_p mod ell, p <= test bound, p != ell
  std::vector<long> eps;                // eps[d] = d^(k-2) mod ell
  FpMatrix plane;                       // 2g x 2, homology coordinates mod ell
};

// a_p of the target mod ell for primes p < bound (weight 2: rational newforms
// of level ell with trivial character, ordered by (a_2, a_3, ...)).
std::map<long, long> target_eigenvalues_mod(const modsym::Space& s, const TargetForm& f, long bound);
std::vector<std::vector<long>> rational_newforms(const modsym::Space& s, long bound);

EigenSystem eigen_system_mod_l(const modsym::Space& s, const TargetForm& f, long test_bound = 50);

}  // namespace modgal::newforms
