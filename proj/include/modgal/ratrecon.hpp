#pragma once

#include <gmpxx.h>

#include <optional>

#include "modgal/mp.hpp"

namespace modgal {

struct RatReconOptions {
  double jump = 1e8;                       // required ratio of a continued-fraction term to its predecessor
  std::optional<mpz_class> denom_hint;     // tried first by exact scaling
  long imag_tolerance_bits = 0;            // 0: half the working precision
};

struct RatRecon {
  mpq_class value;
  double jump = 0;  // size of the terminating partial quotient relative to the previous one
};

// Recognises a real number (imaginary part negligible) as a rational through
// its continued fraction; throws PrecisionError("unrecognized") otherwise.
RatRecon rational_reconstruct(const mp::Complex& x, const RatReconOptions& opt = {});
RatRecon rational_reconstruct(const mp::Real& x, const RatReconOptions& opt = {});

}  // namespace modgal
