#pragma once

#include <vector>

#include "modgal/errors.hpp"
#include "modgal/mp.hpp"

namespace modgal::linalg {

using mp::CMatrix;
using mp::CVector;
using mp::Real;

// Default relative rank tolerance 2^(-prec/3).
Real default_tolerance(mp::Bits prec);

struct QR {
  CMatrix q;                  // m x m unitary, or its leading q_cols columns (only if requested)
  std::vector<Real> r_diag;   // |R_ii|, non-increasing up to pivoting noise
  std::vector<int> perm;      // column permutation: A.col(perm[j]) is the j-th pivot
  int rank = 0;
};

// Householder QR with column pivoting, A P = Q R.  The rank counts |R_ii| above
// tol * |R_00|; values within a decade of that threshold raise RankUnstable.
// max_steps stops the factorisation early (r_diag then has that length) and
// q_cols forms only the leading columns of Q.
QR colpiv_qr(const CMatrix& a, const Real& tol, bool want_q = true, Eigen::Index max_steps = -1,
             Eigen::Index q_cols = -1);

// Orthonormal columns spanning the column space / the right kernel.
CMatrix image_basis(const CMatrix& a, const Real& tol);
CMatrix kernel_basis(const CMatrix& m, const Real& tol);

// Rows are basis vectors, reduced so that each row has a unit entry in a
// pivot column where every other row vanishes; rows are ordered by pivot.
struct SubspaceBasis {
  Eigen::Index ambient = 0;
  CMatrix rows;
  std::vector<int> pivots;
  Real tolerance;

  Eigen::Index dim() const { return rows.rows(); }
};

SubspaceBasis reduce_rows(const CMatrix& rows, const Real& tol);
SubspaceBasis kernel_and_reduce(const CMatrix& m, const Real& tol);
bool same_subspace(const SubspaceBasis& a, const SubspaceBasis& b, const Real& tol);

// Solves A x = b in the least-squares sense (A has full column rank).
CVector solve(const CMatrix& a, const CVector& b);
CMatrix solve(const CMatrix& a, const CMatrix& b);

// Largest singular value estimate / smallest via |R| diag of a square matrix.
Real frobenius_norm(const CMatrix& a);
Real max_abs(const CMatrix& a);
std::vector<Real> singular_values(const CMatrix& a);

CMatrix adjoint(const CMatrix& a);
CMatrix mul(const CMatrix& a, const CMatrix& b);
CVector mul(const CMatrix& a, const CVector& b);
CMatrix zeros(Eigen::Index r, Eigen::Index c, mp::Bits prec);
CMatrix identity(Eigen::Index n, mp::Bits prec);

}  // namespace modgal::linalg
