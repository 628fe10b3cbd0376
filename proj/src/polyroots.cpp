#include "modgal/polyroots.hpp"

#include <algorithm>

#include "modgal/errors.hpp"

namespace modgal {

using mp::Bits;
using mp::Complex;
using mp::Real;

void eval_poly(const std::vector<Complex>& coeffs, const Complex& z, Complex& p, Complex& dp) {
  const Bits prec = z.precision();
  p = Complex::zero(prec);
  dp = Complex::zero(prec);
  for (std::size_t i = coeffs.size(); i-- > 0;) {
    dp = dp * z + p;
    p = p * z + coeffs[i];
  }
}

namespace {

std::vector<Complex> at_prec(const std::vector<Complex>& c, Bits prec) {
  std::vector<Complex> out;
  out.reserve(c.size());
  for (const auto& x : c) out.push_back(x.at(prec));
  return out;
}

}  // namespace

std::vector<Complex> polynomial_roots(const std::vector<Complex>& coeffs_in, Bits prec) {
  std::vector<Complex> coeffs = coeffs_in;
  while (!coeffs.empty() && coeffs.back().is_zero()) coeffs.pop_back();
  if (coeffs.size() < 2) return {};
  const std::size_t n = coeffs.size() - 1;
  const Bits work = std::max<Bits>(128, std::min<Bits>(prec, 256));
  auto c = at_prec(coeffs, work);
  Complex lead = c.back();
  for (auto& x : c) x = x / lead;

  // Start on a circle of the Cauchy-bound radius, slightly rotated.
  Real radius = Real::from(1L, work);
  for (std::size_t i = 0; i < n; ++i) radius = mp::max(radius, Real::from(1L, work) + mp::abs(c[i]));
  radius = radius / 2L;
  std::vector<Complex> z(n);
  for (std::size_t k = 0; k < n; ++k) {
    Real theta = mp::pi(work) * Real::from(2.0 * static_cast<double>(k) / static_cast<double>(n) + 0.4, work);
    z[k] = mp::polar(radius, theta);
  }
  const Real tol = mp::two_pow(static_cast<long>(work) - 24, work);
  bool converged = false;
  for (int it = 0; it < 400 + 20 * static_cast<int>(n) && !converged; ++it) {
    converged = true;
    for (std::size_t k = 0; k < n; ++k) {
      Complex p, dp;
      eval_poly(c, z[k], p, dp);
      if (p.is_zero()) continue;
      Complex ratio = p / dp;
      Complex s = Complex::zero(work);
      for (std::size_t j = 0; j < n; ++j)
        if (j != k) s += Complex(Real::from(1L, work)) / (z[k] - z[j]);
      Complex w = ratio / (Complex(Real::from(1L, work)) - ratio * s);
      z[k] -= w;
      if (mp::abs(w) > tol * mp::max(Real::from(1L, work), mp::abs(z[k]))) converged = false;
    }
  }
  if (!converged) throw PrecisionError("polynomial_roots: Aberth iteration did not converge");
  return refine_roots(coeffs, std::move(z), prec);
}

std::vector<Complex> refine_roots(const std::vector<Complex>& coeffs, std::vector<Complex> roots, Bits prec) {
  Bits cur = 64;
  for (auto& r : roots) cur = std::max(cur, std::min(r.precision(), prec));
  std::vector<Bits> steps;
  for (Bits p = prec; p > cur; p = p / 2 + 8) steps.push_back(p);
  std::reverse(steps.begin(), steps.end());
  steps.push_back(prec);
  steps.push_back(prec);
  for (Bits p : steps) {
    auto c = at_prec(coeffs, p);
    for (auto& r : roots) {
      Complex z = r.at(p), v, dv;
      eval_poly(c, z, v, dv);
      if (dv.is_zero()) throw PrecisionError("refine_roots: vanishing derivative");
      r = z - v / dv;
    }
  }
  // Separation check at the final precision.
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = i + 1; j < roots.size(); ++j)
      if (mp::abs(roots[i] - roots[j]) < mp::two_pow(static_cast<long>(prec) / 2, prec))
        throw PrecisionError("refine_roots: root collision");
  return roots;
}

}  // namespace modgal
