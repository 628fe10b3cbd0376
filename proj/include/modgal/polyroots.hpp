#pragma once

#include <vector>

#include "modgal/mp.hpp"

namespace modgal {

// All complex roots of a squarefree polynomial (lowest coefficient first):
// Aberth iteration at moderate precision followed by Newton refinement.
std::vector<mp::Complex> polynomial_roots(const std::vector<mp::Complex>& coeffs, mp::Bits prec);

// Newton refinement of known simple-root approximations, doubling the
// precision each step.  Throws PrecisionError when two roots collide.
std::vector<mp::Complex> refine_roots(const std::vector<mp::Complex>& coeffs, std::vector<mp::Complex> roots,
                                      mp::Bits prec);

// Horner evaluation of p and p'.
void eval_poly(const std::vector<mp::Complex>& coeffs, const mp::Complex& z, mp::Complex& p, mp::Complex& dp);

}  // namespace modgal
