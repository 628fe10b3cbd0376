#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <utility>
#include <vector>

#include "modgal/exact.hpp"

namespace modgal::modsym {

struct Mat2 {
  long a, b, c, d;
};

// Heilbronn matrices for T_p (p prime, Cremona's list) and for T_n (Merel's set
// {a>b>=0, d>c>=0, ad-bc=n}).
std::vector<Mat2> heilbronn_cremona(long p);
std::vector<Mat2> heilbronn_merel(long n);

using SparseQ = std::vector<std::pair<int, mpq_class>>;

// Weight-2 modular symbols for Gamma_1(ell), ell prime.  Manin symbols (c, d)
// mod ell stand for g{0, oo} with g = [[a, b], [c, d]] in SL_2(Z).  Elements of
// M are column vectors in the basis of free generators.
class Space {
 public:
  explicit Space(int ell);

  int level() const { return ell_; }
  int genus() const { return genus_; }
  std::size_t dim() const { return basis_rep_.size(); }
  std::size_t num_cusps() const { return static_cast<std::size_t>(ell_ - 1); }

  // Coordinates of the Manin symbol (c, d), any integers not both = 0 mod ell.
  SparseQ symbol(long c, long d) const;
  QMatrix symbol_vector(long c, long d) const;
  // {oo, a/b} as an element of M (gcd(a, b) = 1, b > 0, or a/b = 1/0).
  QMatrix inf_to(const mpz_class& a, const mpz_class& b) const;
  // Manin symbol representing basis vector k.
  std::pair<long, long> basis_symbol(std::size_t k) const;

  QMatrix hecke(long n) const;  // on M
  QMatrix diamond(long d) const;
  QMatrix star() const;  // (c, d) -> (-c, d), induced by z -> -conj(z)
  // (ell - 1) x dim; cusp indices 0..h-1 are the cusps above 0 (v = +-1..h),
  // h..2h-1 those above oo (u = +-1..h).
  QMatrix boundary() const;
  int cusp_index(long u, long v) const;

  // Basis (columns) of ker(boundary), dimension 2g.
  const QMatrix& cuspidal() const { return cuspidal_; }
  // Z-basis (columns) of H_1(X_1(ell), Z) inside M.
  const QMatrix& homology() const { return homology_; }
  // Matrix of an operator on M restricted to H_1 in the homology basis; it is
  // integral for Hecke, diamond and star operators.
  QMatrix on_homology(const QMatrix& op) const;
  // Coordinates of a cuspidal element in the homology basis.
  QMatrix homology_coords(const QMatrix& x) const;
  // Projection of M onto the cuspidal part along the Eisenstein part.
  const QMatrix& cuspidal_projector() const;

  // Tables used by the modular computations.
  int symbol_class(long c, long d) const { return sym_class_[index(c, d)]; }
  int symbol_sign(long c, long d) const { return sym_sign_[index(c, d)]; }
  const std::vector<SparseQ>& class_coords() const { return class_coords_; }

 private:
  std::size_t index(long c, long d) const {
    long l = ell_;
    return static_cast<std::size_t>(((c % l + l) % l) * l + ((d % l + l) % l));
  }
  void add_image(std::vector<mpq_class>& acc, long c, long d, const mpq_class& coef) const;

  int ell_;
  int genus_;
  std::vector<int> sym_class_;
  std::vector<int> sym_sign_;
  std::vector<SparseQ> class_coords_;
  std::vector<std::size_t> basis_rep_;  // symbol index per basis vector
  QMatrix cuspidal_;
  QMatrix homology_;
  mutable QMatrix projector_;
};

// The plus part H_1^+ of integral homology reduced modulo a prime P, with Hecke
// and diamond operators computed directly from Heilbronn matrices mod P.
class PlusSpaceModP {
 public:
  PlusSpaceModP(const Space& space, std::uint64_t P);

  std::uint64_t prime() const { return P_; }
  std::size_t dim() const { return basis_.cols; }
  // Z-basis of H_1^+ (columns, homology coordinates).
  static QMatrix plus_basis(const Space& space);

  FpMatrix hecke_prime(long p) const;  // p prime
  FpMatrix diamond(long d) const;
  // T_n for 1 <= n < bound (index 0 unused) by multiplicativity and the
  // prime-power recursion.
  std::vector<FpMatrix> hecke_all(std::size_t bound) const;

 private:
  FpMatrix apply(const std::vector<Mat2>& mats) const;

  const Space* space_;
  std::uint64_t P_;
  FpMatrix basis_;                 // dim M x g, columns in M coordinates
  std::vector<std::vector<std::uint64_t>> psi_;  // per class: g coordinates
};

}  // namespace modgal::modsym
