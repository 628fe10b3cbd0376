#include "modgal/zlinalg.hpp"

#include <utility>

namespace modgal::zlinalg {

namespace {

void swap_rows(ZMatrix& m, std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t j = 0; j < m.cols; ++j) std::swap(m(a, j), m(b, j));
}

// row_a -= q * row_b
void sub_row(ZMatrix& m, std::size_t a, std::size_t b, const mpz_class& q) {
  if (q == 0) return;
  for (std::size_t j = 0; j < m.cols; ++j)
    if (m(b, j) != 0) m(a, j) -= q * m(b, j);
}

// Row echelon form over Z on the first `ncols` columns; returns the rank.
std::size_t echelon(ZMatrix& m, std::size_t ncols) {
  std::size_t r = 0;
  for (std::size_t c = 0; c < ncols && r < m.rows; ++c) {
    while (true) {
      // smallest nonzero |entry| at or below r becomes the pivot
      std::size_t best = m.rows;
      for (std::size_t i = r; i < m.rows; ++i)
        if (m(i, c) != 0 && (best == m.rows || abs(m(i, c)) < abs(m(best, c)))) best = i;
      if (best == m.rows) break;
      swap_rows(m, r, best);
      bool clean = true;
      for (std::size_t i = r + 1; i < m.rows; ++i) {
        if (m(i, c) == 0) continue;
        mpz_class q;
        mpz_fdiv_q(q.get_mpz_t(), m(i, c).get_mpz_t(), m(r, c).get_mpz_t());
        sub_row(m, i, r, q);
        if (m(i, c) != 0) clean = false;
      }
      if (clean) break;
    }
    if (r < m.rows && m(r, c) != 0) {
      if (m(r, c) < 0)
        for (std::size_t j = 0; j < m.cols; ++j) m(r, j) = -m(r, j);
      for (std::size_t i = 0; i < r; ++i) {
        mpz_class q;
        mpz_fdiv_q(q.get_mpz_t(), m(i, c).get_mpz_t(), m(r, c).get_mpz_t());
        sub_row(m, i, r, q);
      }
      ++r;
    }
  }
  return r;
}

}  // namespace

ZMatrix hnf_rows(ZMatrix m) {
  std::size_t r = echelon(m, m.cols);
  ZMatrix out(r, m.cols);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) out(i, j) = m(i, j);
  return out;
}

ZMatrix kernel(const ZMatrix& a) {
  // Rows of [A^T | I]; unimodular row operations that clear the A^T block
  // leave a kernel basis in the identity block.
  const std::size_t n = a.cols, r = a.rows;
  ZMatrix aug(n, r + n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < r; ++j) aug(i, j) = a(j, i);
    aug(i, r + i) = 1;
  }
  std::size_t rank = echelon(aug, r);
  ZMatrix kb(n - rank, n);
  for (std::size_t i = rank; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) kb(i - rank, j) = aug(i, r + j);
  kb = hnf_rows(kb);
  ZMatrix out(n, kb.rows);
  for (std::size_t i = 0; i < kb.rows; ++i)
    for (std::size_t j = 0; j < n; ++j) out(j, i) = kb(i, j);
  return out;
}

}  // namespace modgal::zlinalg
