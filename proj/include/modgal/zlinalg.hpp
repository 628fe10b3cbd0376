#pragma once

#include <gmpxx.h>

#include <vector>

namespace modgal::zlinalg {

// Dense integer matrix, row-major.
struct ZMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<mpz_class> data;

  ZMatrix() = default;
  ZMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}
  mpz_class& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const mpz_class& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

// Hermite basis of the lattice spanned by the rows (zero rows dropped).
ZMatrix hnf_rows(ZMatrix m);

// Z-basis of {x in Z^n : A x = 0}, returned as the columns of an n x k matrix.
// The basis is LLL-free but size-reduced.
ZMatrix kernel(const ZMatrix& a);

}  // namespace modgal::zlinalg
