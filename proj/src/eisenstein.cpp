#include "modgal/eisenstein.hpp"

#include "modgal/arith.hpp"
#include "modgal/errors.hpp"

namespace modgal::eisenstein {

using mp::Complex;
using mp::Real;

namespace {

std::vector<Complex> character_table(const Characters& chars, int i, mp::Bits prec) {
  std::vector<Complex> t(static_cast<std::size_t>(chars.ell()), Complex::zero(prec));
  for (long a = 1; a < chars.ell(); ++a) t[static_cast<std::size_t>(a)] = chars.embed(i, a, prec);
  return t;
}

// sum_a chi(a) a (a/ell + 1)
Complex e2_constant_sum(const Characters& chars, int i, mp::Bits prec) {
  const long ell = chars.ell();
  Complex s = Complex::zero(prec);
  for (long a = 1; a < ell; ++a) {
    Real w = Real::from(a * (a + ell), prec) / ell;
    s += chars.embed(i, a, prec) * w;
  }
  return s;
}

long inverse_mod(long a, long ell) { return static_cast<long>(arith::invmod(arith::reduce(a, static_cast<arith::u64>(ell)), static_cast<arith::u64>(ell))); }

}  // namespace

Complex gauss_sum(const std::vector<Complex>& chi, mp::Bits prec) {
  const long n = static_cast<long>(chi.size());
  Complex s = Complex::zero(prec);
  for (long a = 0; a < n; ++a)
    if (!chi[static_cast<std::size_t>(a)].is_zero()) s += chi[static_cast<std::size_t>(a)] * mp::root_of_unity(a, n, prec);
  return s;
}

Complex gauss_sum(const Characters& chars, int i, mp::Bits prec) { return gauss_sum(character_table(chars, i, prec), prec); }

Complex legendre_gauss_sum(long p, mp::Bits prec) {
  if (p == 1) return Complex(Real::from(1L, prec));
  std::vector<Complex> t(static_cast<std::size_t>(p), Complex::zero(prec));
  for (long a = 1; a < p; ++a) t[static_cast<std::size_t>(a)] = Complex(Real::from(static_cast<long>(arith::legendre(a, static_cast<arith::u64>(p))), prec));
  return gauss_sum(t, prec);
}

Series e2_qexp(const Characters& chars, const E2Pair& e, std::size_t B, mp::Bits prec) {
  if (e.character % chars.m() == 0) throw std::invalid_argument("E_2 pair: both characters trivial");
  const long ell = chars.ell();
  auto chi = character_table(chars, e.character, prec);
  Series s(B, Complex::zero(prec));
  for (std::size_t m = 1; m < B; ++m)
    for (std::size_t n = m; n < B; n += m) {
      const std::size_t arg = e.chi_first ? n / m : m;
      const Complex& v = chi[arg % static_cast<std::size_t>(ell)];
      if (v.is_zero()) continue;
      s[n] += v * static_cast<long>(2 * m);
    }
  if (!e.chi_first && B > 0) s[0] = -e2_constant_sum(chars, e.character, prec) / 2L;
  return s;
}

Fricke fricke_e2(const Characters& chars, const E2Pair& e, mp::Bits prec) {
  const long ell = chars.ell();
  const int bar = chars.conj(e.character);
  if (e.chi_first) return {gauss_sum(chars, e.character, prec) / ell, {false, bar}};
  return {Complex(Real::from(ell, prec)) / gauss_sum(chars, bar, prec), {true, bar}};
}

std::string Cusp::label() const { return (above_zero ? "0:" : "inf:") + std::to_string(d); }

std::vector<Cusp> all_cusps(int ell) {
  std::vector<Cusp> out;
  for (int z = 0; z < 2; ++z)
    for (int d = 1; d <= (ell - 1) / 2; ++d) out.push_back({z == 1, d});
  return out;
}

Cusp cusp_above_zero(int ell, long d) {
  long r = ((d % ell) + ell) % ell;
  if (r == 0) throw std::invalid_argument("cusp class must be a unit");
  return {true, static_cast<int>(std::min(r, ell - r))};
}

std::vector<Cusp> pole_cusps(int ell) {
  return {cusp_above_zero(ell, 1), cusp_above_zero(ell, inverse_mod(2, ell)), cusp_above_zero(ell, inverse_mod(3, ell))};
}

Complex fricke_pseudo_eigenvalue(const Characters& chars, int character, const Series& a, mp::Bits prec) {
  const auto ell = static_cast<std::size_t>(chars.ell());
  if (a.size() <= ell) throw std::invalid_argument("fricke_pseudo_eigenvalue: expansion shorter than ell");
  if (character % chars.m() == 0) return -mp::conj(a[ell]);
  return gauss_sum(chars, character, prec) * mp::conj(a[ell]) / static_cast<long>(ell);
}

Form newform_form(const Characters& chars, int character, const Series& a, mp::Bits prec) {
  Piece p;
  p.character = character;
  p.at_inf = a;
  const Complex lambda = fricke_pseudo_eigenvalue(chars, character, a, prec);
  p.at_zero.resize(a.size());
  for (std::size_t n = 0; n < a.size(); ++n) p.at_zero[n] = lambda * mp::conj(a[n]);
  return Form{{std::move(p)}};
}

Form e2_form(const Characters& chars, const E2Pair& e, std::size_t B, mp::Bits prec) {
  Piece p;
  p.character = e.character;
  p.at_inf = e2_qexp(chars, e, B, prec);
  Fricke w = fricke_e2(chars, e, prec);
  p.at_zero = e2_qexp(chars, w.image, B, prec);
  for (auto& c : p.at_zero) c = w.scalar * c;
  return Form{{std::move(p)}};
}

Form linear_combination(const std::vector<std::pair<Complex, const Form*>>& terms) {
  Form out;
  for (const auto& [c, f] : terms)
    for (const Piece& p : f->pieces) {
      Piece* dst = nullptr;
      for (auto& q : out.pieces)
        if (q.character == p.character) dst = &q;
      if (!dst) {
        out.pieces.push_back({p.character, Series(p.at_inf.size(), Complex::zero(c.precision())),
                              Series(p.at_zero.size(), Complex::zero(c.precision()))});
        dst = &out.pieces.back();
      }
      const std::size_t n = std::min(dst->at_inf.size(), p.at_inf.size());
      dst->at_inf.resize(n);
      dst->at_zero.resize(n);
      for (std::size_t k = 0; k < n; ++k) {
        dst->at_inf[k] += c * p.at_inf[k];
        dst->at_zero[k] += c * p.at_zero[k];
      }
    }
  return out;
}

Series expansion_at(const Characters& chars, const Form& f, const Cusp& c) {
  if (f.pieces.empty()) return {};
  std::size_t n = f.pieces.front().at_inf.size();
  for (const auto& p : f.pieces) n = std::min(n, p.at_inf.size());
  const mp::Bits prec = f.pieces.front().at_inf.empty() ? 64 : f.pieces.front().at_inf.front().precision();
  Series s(n, Complex::zero(prec));
  for (const auto& p : f.pieces) {
    const Complex eps = chars.embed(p.character, c.d, prec);
    const Series& src = c.above_zero ? p.at_zero : p.at_inf;
    for (std::size_t k = 0; k < n; ++k) s[k] += eps * src[k];
  }
  return s;
}

CuspExpansionTable all_cusp_expansions(const Characters& chars, const Form& f) {
  CuspExpansionTable t;
  t.cusps = all_cusps(chars.ell());
  for (const auto& c : t.cusps) t.series.push_back(expansion_at(chars, f, c));
  return t;
}

E12E13 build_e12_e13(const Characters& chars, std::size_t B, mp::Bits prec) {
  const int ell = chars.ell();
  std::vector<Form> basis;
  std::vector<Complex> c2, c3;
  for (int i = 1; i < chars.m(); ++i) {
    basis.push_back(e2_form(chars, {true, i}, B, prec));
    const Complex denom = gauss_sum(chars, i, prec) * e2_constant_sum(chars, chars.conj(i), prec);
    const Complex one(Real::from(1L, prec));
    c2.push_back((one - chars.embed(i, 2, prec)) / denom);
    c3.push_back((one - chars.embed(i, 3, prec)) / denom);
  }
  std::vector<std::pair<Complex, const Form*>> t2, t3;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    t2.emplace_back(c2[k], &basis[k]);
    t3.emplace_back(c3[k], &basis[k]);
  }
  E12E13 out{linear_combination(t2), linear_combination(t3), {}, {}};

  const Real zero_tol = mp::two_pow(static_cast<long>(prec / 2), 64);
  const Real nonzero_tol = mp::two_pow(static_cast<long>(prec / 4), 64);
  const auto poles = pole_cusps(ell);
  auto certify = [&](const Form& f, const Cusp& partner, std::vector<Complex>& lead, const char* name) {
    for (const auto& c : all_cusps(ell)) {
      Complex v = expansion_at(chars, f, c).at(0);
      const bool live = c == poles[0] || c == partner;
      if (live && mp::abs(v) < nonzero_tol)
        throw Error(std::string(name) + ": leading term vanishes at " + c.label());
      if (!live && mp::abs(v) > zero_tol)
        throw Error(std::string(name) + ": leading term does not vanish at " + c.label());
      lead.push_back(std::move(v));
    }
  };
  certify(out.e12, poles[1], out.lead12, "e_{1,2}");
  certify(out.e13, poles[2], out.lead13, "e_{1,3}");
  return out;
}

}  // namespace modgal::eisenstein
