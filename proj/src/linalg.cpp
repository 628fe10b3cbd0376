#include "modgal/linalg.hpp"

#include <algorithm>
#include <numeric>

namespace modgal::linalg {

using mp::Bits;
using mp::Complex;
using Eigen::Index;

namespace {

Bits prec_of(const CMatrix& a) {
  Bits p = mp::kLiteralBits;
  if (a.size() > 0) p = std::max(a(0, 0).precision(), a(a.rows() - 1, a.cols() - 1).precision());
  return p;
}

// acc += x * y without allocating temporaries for the product.
struct Accumulator {
  Real t;
  explicit Accumulator(Bits p) : t(Real::zero(p)) {}
  void fma(Complex& acc, const Complex& x, const Complex& y) {
    mpfr_fmms(t.get(), x.real().get(), y.real().get(), x.imag().get(), y.imag().get(), MPFR_RNDN);
    mpfr_add(acc.real().get(), acc.real().get(), t.get(), MPFR_RNDN);
    mpfr_fmma(t.get(), x.real().get(), y.imag().get(), x.imag().get(), y.real().get(), MPFR_RNDN);
    mpfr_add(acc.imag().get(), acc.imag().get(), t.get(), MPFR_RNDN);
  }
  // acc += conj(x) * y
  void fma_conj(Complex& acc, const Complex& x, const Complex& y) {
    mpfr_fmma(t.get(), x.real().get(), y.real().get(), x.imag().get(), y.imag().get(), MPFR_RNDN);
    mpfr_add(acc.real().get(), acc.real().get(), t.get(), MPFR_RNDN);
    mpfr_fmms(t.get(), x.real().get(), y.imag().get(), x.imag().get(), y.real().get(), MPFR_RNDN);
    mpfr_add(acc.imag().get(), acc.imag().get(), t.get(), MPFR_RNDN);
  }
  // acc -= x * y
  void fms(Complex& acc, const Complex& x, const Complex& y) {
    mpfr_fmms(t.get(), x.real().get(), y.real().get(), x.imag().get(), y.imag().get(), MPFR_RNDN);
    mpfr_sub(acc.real().get(), acc.real().get(), t.get(), MPFR_RNDN);
    mpfr_fmma(t.get(), x.real().get(), y.imag().get(), x.imag().get(), y.real().get(), MPFR_RNDN);
    mpfr_sub(acc.imag().get(), acc.imag().get(), t.get(), MPFR_RNDN);
  }
};

Real col_norm2(const CMatrix& a, Index col, Index from) {
  Bits p = prec_of(a);
  Real s = Real::zero(p), t = Real::zero(p);
  for (Index i = from; i < a.rows(); ++i) {
    mpfr_fmma(t.get(), a(i, col).real().get(), a(i, col).real().get(), a(i, col).imag().get(),
              a(i, col).imag().get(), MPFR_RNDN);
    s += t;
  }
  return s;
}

}  // namespace

Real default_tolerance(Bits prec) { return mp::two_pow(static_cast<long>(prec / 3), 64); }

CMatrix zeros(Index r, Index c, Bits prec) {
  CMatrix m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = Complex::zero(prec);
  return m;
}

CMatrix identity(Index n, Bits prec) {
  CMatrix m = zeros(n, n, prec);
  for (Index i = 0; i < n; ++i) m(i, i) = Complex(Real::from(1L, prec));
  return m;
}

CMatrix adjoint(const CMatrix& a) {
  CMatrix r(a.cols(), a.rows());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) r(j, i) = mp::conj(a(i, j));
  return r;
}

CMatrix mul(const CMatrix& a, const CMatrix& b) {
  Bits p = std::max(prec_of(a), prec_of(b));
  CMatrix c = zeros(a.rows(), b.cols(), p);
  Accumulator acc(p);
  for (Index i = 0; i < a.rows(); ++i)
    for (Index k = 0; k < a.cols(); ++k) {
      const Complex& x = a(i, k);
      if (x.is_zero()) continue;
      for (Index j = 0; j < b.cols(); ++j) acc.fma(c(i, j), x, b(k, j));
    }
  return c;
}

CVector mul(const CMatrix& a, const CVector& b) {
  CMatrix bm = b;
  CMatrix r = mul(a, bm);
  return r.col(0);
}

Real frobenius_norm(const CMatrix& a) {
  Bits p = prec_of(a);
  Real s = Real::zero(p);
  for (Index j = 0; j < a.cols(); ++j) s += col_norm2(a, j, 0);
  return mp::sqrt(s);
}

Real max_abs(const CMatrix& a) {
  Real m = Real::zero(prec_of(a));
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) {
      Real v = mp::abs(a(i, j));
      if (v > m) m = v;
    }
  return m;
}

QR colpiv_qr(const CMatrix& a_in, const Real& tol, bool want_q, Index max_steps, Index q_cols) {
  CMatrix a = a_in;
  const Index m = a.rows(), n = a.cols();
  const Bits p = prec_of(a);
  QR out;
  out.perm.resize(n);
  std::iota(out.perm.begin(), out.perm.end(), 0);
  struct Reflector {
    Index k;
    CVector v;
    Real scale;
  };
  std::vector<Reflector> refl;
  Accumulator acc(p);
  const Index steps = std::min({m, n, max_steps < 0 ? n : max_steps});
  std::vector<Real> norms(n);
  for (Index j = 0; j < n; ++j) norms[j] = col_norm2(a, j, 0);

  for (Index k = 0; k < steps; ++k) {
    Index best = k;
    for (Index j = k + 1; j < n; ++j)
      if (norms[j] > norms[best]) best = j;
    if (best != k) {
      a.col(k).swap(a.col(best));
      std::swap(norms[k], norms[best]);
      std::swap(out.perm[k], out.perm[best]);
    }
    Real nrm = mp::sqrt(col_norm2(a, k, k));
    out.r_diag.push_back(nrm);
    if (nrm.is_zero()) continue;
    // v = x - alpha e1 with alpha = -phase(x0) |x|
    Complex x0 = a(k, k);
    Real ax0 = mp::abs(x0);
    Complex phase = ax0.is_zero() ? Complex(Real::from(1L, p)) : x0 / ax0;
    Complex alpha = -(phase * nrm);
    CVector v(m - k);
    v(0) = x0 - alpha;
    for (Index i = k + 1; i < m; ++i) v(i - k) = a(i, k);
    Real vn2 = Real::zero(p);
    for (Index i = 0; i < v.size(); ++i) vn2 += mp::abs2(v(i));
    if (vn2.is_zero()) continue;
    Real scale = Real::from(2L, p) / vn2;
    // A[k:, k:] -= scale * v (v^H A[k:, k:])
    for (Index j = k; j < n; ++j) {
      Complex s = Complex::zero(p);
      for (Index i = 0; i < v.size(); ++i) acc.fma_conj(s, v(i), a(k + i, j));
      s *= scale;
      for (Index i = 0; i < v.size(); ++i) acc.fms(a(k + i, j), v(i), s);
    }
    if (want_q) refl.push_back({k, std::move(v), std::move(scale)});
    for (Index j = k + 1; j < n; ++j) norms[j] = col_norm2(a, j, k + 1);
  }
  if (want_q) {
    // Q[:, :q_cols] = H_0 ... H_{s-1} I[:, :q_cols], applied right to left
    const Index qc = q_cols < 0 ? m : std::min(q_cols, m);
    out.q = zeros(m, qc, p);
    for (Index i = 0; i < qc; ++i) out.q(i, i) = Complex(Real::from(1L, p));
    for (auto it = refl.rbegin(); it != refl.rend(); ++it) {
      const Index k = it->k;
      for (Index j = 0; j < qc; ++j) {
        Complex s = Complex::zero(p);
        for (Index i = 0; i < it->v.size(); ++i) acc.fma_conj(s, it->v(i), out.q(k + i, j));
        if (s.is_zero()) continue;
        s *= it->scale;
        for (Index i = 0; i < it->v.size(); ++i) acc.fms(out.q(k + i, j), it->v(i), s);
      }
    }
  }

  if (out.r_diag.empty() || out.r_diag[0].is_zero()) {
    out.rank = 0;
    return out;
  }
  Real thresh = out.r_diag[0] * tol;
  Real lo = thresh / 10L, hi = thresh * 10L;
  int rank = 0;
  for (const Real& d : out.r_diag) {
    if (d > lo && d <= hi)
      throw RankUnstable("rank unstable: |R_ii|/|R_00| = " + (d / out.r_diag[0]).to_string(6) +
                         " within a decade of tolerance " + tol.to_string(6));
    if (d > thresh) ++rank;
  }
  out.rank = rank;
  return out;
}

CMatrix image_basis(const CMatrix& a, const Real& tol) {
  QR qr = colpiv_qr(a, tol, true);
  return qr.q.leftCols(qr.rank);
}

CMatrix kernel_basis(const CMatrix& m, const Real& tol) {
  if (m.rows() == 0) return identity(m.cols(), prec_of(m));
  QR qr = colpiv_qr(adjoint(m), tol, true);
  return qr.q.rightCols(m.cols() - qr.rank);
}

SubspaceBasis reduce_rows(const CMatrix& rows, const Real& tol) {
  SubspaceBasis out;
  out.ambient = rows.cols();
  out.tolerance = tol;
  CMatrix b = adjoint(image_basis(adjoint(rows), tol));  // orthonormal rows
  const Index k = b.rows(), n = b.cols();
  const Bits p = prec_of(rows);
  // Pivots are chosen from quantities that depend only on the subspace: the
  // remaining rows always form a Parseval frame of what is left, so their
  // column norms are the norms of the projected unit vectors.
  std::vector<bool> used(n, false);
  std::vector<int> pivots(k, -1);
  CMatrix frame = b, chosen(k, n);
  Accumulator acc(p);
  for (Index step = 0; step < k; ++step) {
    Index bc = -1;
    Real best = Real::zero(p);
    for (Index c = 0; c < n; ++c) {
      if (used[c]) continue;
      Real v = col_norm2(frame, c, 0);
      if (bc < 0 || v > best * Real(1.0 + 1e-12)) {
        best = v;
        bc = c;
      }
    }
    used[bc] = true;
    pivots[step] = static_cast<int>(bc);
    Real nrm = mp::sqrt(best);
    CVector w(frame.rows());
    for (Index r = 0; r < frame.rows(); ++r) w(r) = frame(r, bc) / Complex(nrm);
    for (Index c = 0; c < n; ++c) {
      Complex s = Complex::zero(p);
      for (Index r = 0; r < frame.rows(); ++r) acc.fma_conj(s, w(r), frame(r, c));
      chosen(step, c) = s;
    }
    for (Index r = 0; r < frame.rows(); ++r)
      for (Index c = 0; c < n; ++c) acc.fms(frame(r, c), w(r), chosen(step, c));
  }
  // Reduced echelon form with respect to the chosen pivot columns.
  CMatrix piv(k, k);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) piv(i, j) = chosen(i, pivots[j]);
  CMatrix red = solve(piv, chosen);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) red(i, pivots[j]) = Complex(Real::from(i == j ? 1L : 0L, p));
  std::vector<Index> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Index x, Index y) { return pivots[x] < pivots[y]; });
  out.rows.resize(k, n);
  for (Index i = 0; i < k; ++i) {
    out.rows.row(i) = red.row(order[i]);
    out.pivots.push_back(pivots[order[i]]);
  }
  return out;
}

SubspaceBasis kernel_and_reduce(const CMatrix& m, const Real& tol) {
  CMatrix k = kernel_basis(m, tol);
  if (k.cols() == 0) {
    SubspaceBasis out;
    out.ambient = m.cols();
    out.tolerance = tol;
    out.rows.resize(0, m.cols());
    return out;
  }
  return reduce_rows(k.transpose(), tol);
}

bool same_subspace(const SubspaceBasis& a, const SubspaceBasis& b, const Real& tol) {
  if (a.ambient != b.ambient || a.dim() != b.dim()) return false;
  if (a.dim() == 0) return true;
  CMatrix stacked(a.dim() + b.dim(), a.ambient);
  stacked << a.rows, b.rows;
  return colpiv_qr(adjoint(stacked), tol, false).rank == a.dim();
}

CMatrix solve(const CMatrix& a, const CMatrix& b) {
  // Least squares through A = Q R (no pivoting needed for the full-rank uses here).
  const Index m = a.rows(), n = a.cols();
  const Bits p = std::max(prec_of(a), prec_of(b));
  QR qr = colpiv_qr(a, mp::two_pow(p - 8, 64), true);
  if (qr.rank < n) throw PrecisionError("solve: matrix is rank deficient");
  CMatrix qtb = mul(adjoint(qr.q), b);
  // Recover R = Q^H A P.
  CMatrix ap(m, n);
  for (Index j = 0; j < n; ++j) ap.col(j) = a.col(qr.perm[j]);
  CMatrix r = mul(adjoint(qr.q), ap);
  CMatrix x = zeros(n, b.cols(), p);
  Accumulator acc(p);
  for (Index c = 0; c < b.cols(); ++c)
    for (Index i = n - 1; i >= 0; --i) {
      Complex s = qtb(i, c);
      for (Index j = i + 1; j < n; ++j) acc.fms(s, r(i, j), x(qr.perm[j], c));
      x(qr.perm[i], c) = s / r(i, i);
    }
  return x;
}

CVector solve(const CMatrix& a, const CVector& b) {
  CMatrix bm = b;
  return solve(a, bm).col(0);
}

std::vector<Real> singular_values(const CMatrix& a_in) {
  // One-sided Jacobi on the columns.
  CMatrix a = a_in.rows() >= a_in.cols() ? a_in : adjoint(a_in);
  const Index n = a.cols(), m = a.rows();
  const Bits p = prec_of(a);
  Real eps = mp::two_pow(p - 4, 64);
  Accumulator acc(p);
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) {
        Real aii = col_norm2(a, i, 0), ajj = col_norm2(a, j, 0);
        Complex aij = Complex::zero(p);
        for (Index r = 0; r < m; ++r) acc.fma_conj(aij, a(r, i), a(r, j));
        Real mag = mp::abs(aij);
        if (mag.is_zero() || mag <= eps * mp::sqrt(aii * ajj)) continue;
        rotated = true;
        Complex ph = aij / mag;
        Real zeta = (ajj - aii) / (mag * 2L);
        Real t = Real::from(zeta.sign() >= 0 ? 1L : -1L, p) / (mp::abs(zeta) + mp::sqrt(Real::from(1L, p) + zeta * zeta));
        Real c = Real::from(1L, p) / mp::sqrt(Real::from(1L, p) + t * t);
        Real s = c * t;
        for (Index r = 0; r < m; ++r) {
          Complex xi = a(r, i), xj = a(r, j);
          a(r, i) = xi * c - xj * mp::conj(ph) * s;
          a(r, j) = xi * ph * s + xj * c;
        }
      }
    if (!rotated) break;
  }
  std::vector<Real> sv;
  for (Index j = 0; j < n; ++j) sv.push_back(mp::sqrt(col_norm2(a, j, 0)));
  std::sort(sv.begin(), sv.end(), [](const Real& x, const Real& y) { return x > y; });
  return sv;
}

}  // namespace modgal::linalg
