#include "modgal/ratrecon.hpp"

#include <cmath>

#include "modgal/errors.hpp"

namespace modgal {

using mp::Real;

namespace {

bool close_to_integer(const Real& y, const mpz_class& n, long bits) {
  Real err = mp::abs(y - Real(n, y.precision()));
  Real scale = mp::max(Real::from(1L, y.precision()), mp::abs(y));
  return err <= scale * mp::two_pow(bits, 64);
}

}  // namespace

RatRecon rational_reconstruct(const Real& x, const RatReconOptions& opt) {
  const mp::Bits prec = x.precision();
  const long half = static_cast<long>(prec / 2);
  if (x.is_zero() || x.exponent() < -static_cast<long>(prec * 7 / 8)) return {mpq_class(0), INFINITY};

  if (opt.denom_hint && *opt.denom_hint > 0) {
    Real y = x * Real(*opt.denom_hint, prec);
    mpz_class n = y.round_to_integer();
    if (close_to_integer(y, n, half)) {
      mpq_class q(n, *opt.denom_hint);
      q.canonicalize();
      return {q, INFINITY};
    }
  }

  // Convergents p_k / q_k of the continued fraction of x.
  mpz_class p0 = 1, q0 = 0, p1, q1 = 1;
  Real y = x;
  Real a = mp::floor(y);
  mpz_class ak = a.round_to_integer();
  p1 = ak;
  Real frac = y - a;
  mpz_class prev_term = mpz_class(abs(ak)) > 1 ? mpz_class(abs(ak)) : mpz_class(1);
  const long exact_bits = static_cast<long>(prec) - 8;
  Real scale = mp::max(Real::from(1L, prec), mp::abs(x));
  auto bits = [](const mpz_class& z) { return static_cast<long>(mpz_sizeinbase(z.get_mpz_t(), 2)); };
  for (int k = 0; k < 4 * static_cast<int>(prec); ++k) {
    // A convergent matching x to full precision, with a denominator small
    // enough to be meaningful, is the same as an infinite partial quotient.
    if (2 * bits(q1) + 32 < static_cast<long>(prec)) {
      Real err = mp::abs(x - Real(mpq_class(p1, q1), prec));
      if (err <= scale * mp::two_pow(exact_bits, 64)) {
        mpq_class q(p1, q1);
        q.canonicalize();
        return {q, INFINITY};
      }
    }
    if (frac.is_zero()) break;
    y = Real::from(1L, prec) / frac;
    a = mp::floor(y);
    frac = y - a;
    ak = a.round_to_integer();
    double ratio = Real(ak, 64).to_double() / Real(prev_term, 64).to_double();
    if (ratio >= opt.jump) {
      mpq_class q(p1, q1);
      q.canonicalize();
      return {q, ratio};
    }
    mpz_class p2 = ak * p1 + p0, q2 = ak * q1 + q0;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    prev_term = ak > 1 ? ak : mpz_class(1);
    // Denominators this large cannot be certified at the working precision.
    if (2 * bits(q1) > static_cast<long>(prec)) break;
  }
  throw PrecisionError("unrecognized: no continued-fraction jump at " + std::to_string(prec) + " bits");
}

RatRecon rational_reconstruct(const mp::Complex& x, const RatReconOptions& opt) {
  const mp::Bits prec = x.precision();
  long bits = opt.imag_tolerance_bits ? opt.imag_tolerance_bits : static_cast<long>(prec / 2);
  Real scale = mp::max(Real::from(1L, prec), mp::abs(x.real()));
  if (mp::abs(x.imag()) > scale * mp::two_pow(bits, 64))
    throw PrecisionError("unrecognized: imaginary part " + x.imag().to_string(6) + " is not negligible");
  return rational_reconstruct(x.real(), opt);
}

}  // namespace modgal
