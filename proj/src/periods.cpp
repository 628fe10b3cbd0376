#include "modgal/periods.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "modgal/arith.hpp"
#include "modgal/eisenstein.hpp"
#include "modgal/errors.hpp"
#include "modgal/linalg.hpp"

namespace modgal::periods {

using mp::Complex;
using mp::Real;
using mp::Bits;

QMatrix winding_element(const modsym::Space& s, long p) {
  if (p == 1) return s.inf_to(0, 1);
  if (p < 3 || p % 2 == 0 || p == s.level() || !arith::is_prime(static_cast<arith::u64>(p)))
    throw std::invalid_argument("winding_element: twist must be 1 or an odd prime other than the level");
  QMatrix w(RationalField{}, s.dim(), 1);
  for (long a = 1; a < p; ++a) {
    const int chi = arith::legendre(a, static_cast<arith::u64>(p));
    QMatrix t = s.inf_to(a, p);
    for (std::size_t i = 0; i < w.rows; ++i) w.data[i] += chi * t.data[i];
  }
  return w;
}

std::vector<long> WindingDecomposition::twists_used() const {
  std::vector<long> out;
  for (long p : twist)
    if (out.empty() || out.back() != p) out.push_back(p);
  return out;
}

std::vector<long> default_twists(int ell, long largest) {
  std::vector<long> out{1};
  for (long p = 3; p <= largest; p += 2)
    if (p != ell && arith::is_prime(static_cast<arith::u64>(p))) out.push_back(p);
  return out;
}

WindingDecomposition winding_decomposition(const modsym::Space& s, const std::vector<long>& candidates,
                                           long generator) {
  WindingDecomposition wd;
  wd.generator = generator ? generator : newforms::find_hecke_generator(s);
  const std::size_t n = s.homology().cols;
  const std::size_t g = n / 2;
  const QMatrix t = s.on_homology(s.hecke(wd.generator));
  const QMatrix& proj = s.cuspidal_projector();

  RationalField q;
  QMatrix cols(q, n, 0);
  for (long p : candidates) {
    QMatrix v = s.homology_coords(proj * winding_element(s, p));
    for (std::size_t k = 0; k < g && wd.twist.size() < n; ++k, v = t * v) {
      QMatrix trial(q, n, cols.cols + 1);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < cols.cols; ++j) trial(i, j) = cols(i, j);
        trial(i, cols.cols) = v(i, 0);
      }
      if (rank(trial) == trial.cols) {
        cols = std::move(trial);
        wd.twist.push_back(p);
        wd.power.push_back(static_cast<int>(k));
      }
    }
    if (wd.twist.size() == n) break;
  }
  if (wd.twist.size() != n)
    throw Error("winding elements span only " + std::to_string(wd.twist.size()) + " of " + std::to_string(n) +
                " dimensions");
  wd.columns = cols;
  wd.coeffs = inverse(cols);
  return wd;
}

std::size_t terms_needed(int ell, long p, mp::Bits prec) {
  // |a_n - c conj(a_n)| / n <= 4 and |g| = sqrt(p).
  const double logx = -2 * M_PI / (static_cast<double>(p) * std::sqrt(static_cast<double>(ell)));
  const double x = std::exp(logx);
  const double target = (static_cast<double>(prec) + 8) * std::log(2.0) +
                        std::log(4 * std::sqrt(static_cast<double>(p)) / (2 * M_PI * (1 - x)));
  return static_cast<std::size_t>(std::ceil(target / -logx)) + 2;
}

Complex winding_integral(const newforms::Characters& chars, int character, const Series& a, long p,
                         mp::Bits prec) {
  const int ell = chars.ell();
  const std::size_t N = terms_needed(ell, p, prec);
  if (a.size() < N) throw PrecisionError("winding_integral: " + std::to_string(N) + " coefficients needed");
  const Bits work = prec + 32;
  const Complex lambda = eisenstein::fricke_pseudo_eigenvalue(chars, character, a, work);
  Complex c = lambda;
  if (p > 1) {
    c = c * chars.embed(character, p, work);
    if (arith::legendre(-ell, static_cast<arith::u64>(p)) < 0) c = -c;
  }
  const Real pi = mp::pi(work);
  const Real x = mp::exp(-(pi * 2L) / (mp::sqrt(Real::from(static_cast<long>(ell), work)) * p));
  Complex sum = Complex::zero(work);
  Real xn = x;
  for (std::size_t n = 1; n < N; ++n, xn *= x) {
    const int chi = p == 1 ? 1 : arith::legendre(static_cast<long>(n), static_cast<arith::u64>(p));
    if (chi == 0) continue;
    Complex t = a[n] - c * mp::conj(a[n]);
    t *= xn / static_cast<long>(n);
    if (chi > 0)
      sum += t;
    else
      sum -= t;
  }
  const Complex two_pi_i(Real::zero(work), pi * 2L);
  return (eisenstein::legendre_gauss_sum(p, work) * sum / two_pi_i).at(prec);
}

PeriodLattice period_lattice(const modsym::Space& s, const std::vector<newforms::Eigenform>& forms,
                             const WindingDecomposition& wd, mp::Bits prec) {
  const newforms::Characters chars(s.level());
  const std::size_t n = wd.columns.rows;
  const std::size_t g = forms.size();
  if (2 * g != n) throw std::invalid_argument("period_lattice: need g newforms");
  PeriodLattice L;
  L.ell = s.level();
  L.prec = prec;
  L.lambda = linalg::zeros(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(g), prec);
  const auto twists = wd.twists_used();
  const Bits work = prec + 32;
  for (std::size_t i = 0; i < g; ++i) {
    const auto& f = forms[i];
    if (f.a.size() <= static_cast<std::size_t>(wd.generator)) throw PrecisionError("period_lattice: short expansion");
    std::vector<Complex> w;
    for (long p : twists) w.push_back(winding_integral(chars, f.character, f.a, p, work));
    const Complex t = f.a[static_cast<std::size_t>(wd.generator)].at(work);
    for (std::size_t c = 0; c < n; ++c) {
      const std::size_t slot = static_cast<std::size_t>(std::find(twists.begin(), twists.end(), wd.twist[c]) - twists.begin());
      const Complex v = w[slot] * mp::pow(t, wd.power[c]);
      for (std::size_t j = 0; j < n; ++j) {
        const mpq_class& x = wd.coeffs(c, j);
        if (x == 0) continue;
        L.lambda(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) += v * Real(x, work);
      }
    }
  }
  for (Eigen::Index j = 0; j < L.lambda.rows(); ++j)
    for (Eigen::Index i = 0; i < L.lambda.cols(); ++i) L.lambda(j, i) = L.lambda(j, i).at(prec);
  return L;
}

Real adjointness_residual(const modsym::Space& s, const std::vector<newforms::Eigenform>& forms,
                          const PeriodLattice& L, long nmax) {
  Real worst = Real::zero(L.prec);
  const auto n = static_cast<std::size_t>(L.lambda.rows());
  for (long m = 2; m <= nmax; ++m) {
    const QMatrix t = s.on_homology(s.hecke(m));
    for (std::size_t i = 0; i < forms.size(); ++i)
      for (std::size_t j = 0; j < n; ++j) {
        Complex lhs = Complex::zero(L.prec);
        for (std::size_t k = 0; k < n; ++k)
          if (t(k, j) != 0)
            lhs += L.lambda(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) * Real(t(k, j), L.prec);
        const Complex rhs = forms[i].a[static_cast<std::size_t>(m)] *
                            L.lambda(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
        worst = mp::max(worst, mp::abs(lhs - rhs));
      }
  }
  return worst;
}

mp::CMatrix eigenplane_points(const PeriodLattice& L, const FpMatrix& plane) {
  const Eigen::Index g = L.lambda.cols();
  if (plane.rows != static_cast<std::size_t>(L.lambda.rows()) || plane.cols != 2)
    throw std::invalid_argument("eigenplane_points: plane must be 2g x 2");
  mp::CMatrix x = linalg::zeros(g, 2, L.prec);
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t j = 0; j < plane.rows; ++j) {
      const long c = static_cast<long>(plane(j, k));
      if (c == 0) continue;
      for (Eigen::Index i = 0; i < g; ++i) x(i, static_cast<Eigen::Index>(k)) += L.lambda(static_cast<Eigen::Index>(j), i) * c;
    }
  for (Eigen::Index i = 0; i < g; ++i)
    for (Eigen::Index k = 0; k < 2; ++k) x(i, k) = x(i, k) / static_cast<long>(L.ell);
  return x;
}

void write_lattice(std::ostream& os, const PeriodLattice& L) {
  os << "modgal-periods 1\n";
  os << "ell " << L.ell << " g " << L.lambda.cols() << " prec " << L.prec << "\n";
  for (Eigen::Index j = 0; j < L.lambda.rows(); ++j)
    for (Eigen::Index i = 0; i < L.lambda.cols(); ++i)
      os << mp::to_hex(L.lambda(j, i).real()) << ' ' << mp::to_hex(L.lambda(j, i).imag()) << '\n';
}

PeriodLattice read_lattice(std::istream& is) {
  std::string magic, version, k1, k2, k3;
  long g = 0;
  PeriodLattice L;
  if (!(is >> magic >> version) || magic != "modgal-periods" || version != "1") throw Error("lattice cache: bad header");
  if (!(is >> k1 >> L.ell >> k2 >> g >> k3 >> L.prec) || k1 != "ell" || k2 != "g" || k3 != "prec")
    throw Error("lattice cache: bad header");
  L.lambda = linalg::zeros(2 * g, g, L.prec);
  for (Eigen::Index j = 0; j < 2 * g; ++j)
    for (Eigen::Index i = 0; i < g; ++i) {
      std::string re, im;
      if (!(is >> re >> im)) throw Error("lattice cache: truncated");
      L.lambda(j, i) = Complex(mp::from_hex(re, L.prec), mp::from_hex(im, L.prec));
    }
  return L;
}

}  // namespace modgal::periods
