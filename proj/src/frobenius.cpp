#include "modgal/frobenius.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "modgal/arith.hpp"
#include "modgal/errors.hpp"
#include "modgal/exact.hpp"
#include "modgal/polyroots.hpp"

namespace modgal::frobenius {

using mp::Complex;
using mp::Real;

namespace {

int md(long x, int ell) { return static_cast<int>(((x % ell) + ell) % ell); }

using Key = std::tuple<int, int, bool>;

Key key_of(const Mat2& m, int ell) {
  const bool scalar = m.b == 0 && m.c == 0 && m.a == m.d;
  return {md(m.a + m.d, ell), md(static_cast<long>(m.a) * m.d - static_cast<long>(m.b) * m.c, ell), scalar};
}

struct MpzField {
  using value_type = mpz_class;
  mpz_class p;
  value_type zero() const { return 0; }
  value_type one() const { return 1; }
  value_type from_int(long x) const { return reduce(mpz_class(x)); }
  value_type reduce(const mpz_class& x) const {
    mpz_class r = x % p;
    if (r < 0) r += p;
    return r;
  }
  value_type add(const value_type& a, const value_type& b) const {
    mpz_class r = a + b;
    if (r >= p) r -= p;
    return r;
  }
  value_type sub(const value_type& a, const value_type& b) const {
    mpz_class r = a - b;
    if (r < 0) r += p;
    return r;
  }
  value_type mul(const value_type& a, const value_type& b) const { return a * b % p; }
  value_type div(const value_type& a, const value_type& b) const {
    mpz_class inv;
    if (!mpz_invert(inv.get_mpz_t(), b.get_mpz_t(), p.get_mpz_t())) throw std::domain_error("not invertible");
    return a * inv % p;
  }
  value_type neg(const value_type& a) const { return a == 0 ? mpz_class(0) : p - a; }
  bool is_zero(const value_type& a) const { return a == 0; }
};

template <class F>
typename F::value_type from_rational(const F& f, const mpq_class& q);

template <>
mpz_class from_rational(const MpzField& f, const mpq_class& q) {
  return f.div(f.reduce(q.get_num()), f.reduce(q.get_den()));
}

template <>
std::uint64_t from_rational(const PrimeField& f, const mpq_class& q) {
  mpz_class n = q.get_num() % static_cast<unsigned long>(f.p), d = q.get_den() % static_cast<unsigned long>(f.p);
  if (n < 0) n += static_cast<unsigned long>(f.p);
  return f.div(n.get_ui(), d.get_ui());
}

template <class F>
using Poly = std::vector<typename F::value_type>;

template <class F>
Poly<F> reduce_poly(const F& f, const std::vector<mpq_class>& c) {
  Poly<F> out;
  for (const auto& x : c) out.push_back(from_rational(f, x));
  return out;
}

template <class F>
Poly<F> mulmod(const F& f, const Poly<F>& a, const Poly<F>& b, const Poly<F>& m) {
  if (a.empty() || b.empty()) return {};
  Poly<F> c(a.size() + b.size() - 1, f.zero());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (f.is_zero(a[i])) continue;
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] = f.add(c[i + j], f.mul(a[i], b[j]));
  }
  return poly_rem(f, std::move(c), m);
}

// Big moduli: accumulate unreduced products and reduce once per coefficient
// (m monic).
Poly<MpzField> mulmod(const MpzField& f, const Poly<MpzField>& a, const Poly<MpzField>& b, const Poly<MpzField>& m) {
  if (a.empty() || b.empty()) return {};
  const std::size_t n = m.size() - 1;
  Poly<MpzField> c(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) mpz_addmul(c[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
  }
  mpz_class t;
  for (std::size_t i = c.size(); i-- > n;) {
    mpz_mod(t.get_mpz_t(), c[i].get_mpz_t(), f.p.get_mpz_t());
    if (t != 0)
      for (std::size_t j = 0; j < n; ++j) mpz_submul(c[i - n + j].get_mpz_t(), t.get_mpz_t(), m[j].get_mpz_t());
  }
  c.resize(std::min(c.size(), n));
  for (auto& x : c) mpz_mod(x.get_mpz_t(), x.get_mpz_t(), f.p.get_mpz_t());
  poly_trim(f, c);
  return c;
}

template <class F>
Poly<F> powmod_x_t(const F& f, const mpz_class& e, const Poly<F>& m) {
  Poly<F> r{f.one()};
  r = poly_rem(f, r, m);
  for (long i = static_cast<long>(mpz_sizeinbase(e.get_mpz_t(), 2)) - 1; i >= 0; --i) {
    r = mulmod(f, r, r, m);
    if (mpz_tstbit(e.get_mpz_t(), static_cast<mp_bitcnt_t>(i))) {
      r.insert(r.begin(), f.zero());
      r = poly_rem(f, std::move(r), m);
    }
  }
  return r;
}

// Power sums s_0..s_{n-1} of the roots of the monic f, by Newton's identities.
template <class F>
Poly<F> power_sums(const F& f, const Poly<F>& m) {
  const std::size_t n = m.size() - 1;
  Poly<F> s(n, f.zero());
  s[0] = f.from_int(static_cast<long>(n));
  for (std::size_t k = 1; k < n; ++k) {
    auto acc = f.mul(f.from_int(static_cast<long>(k)), m[n - k]);
    for (std::size_t i = 1; i < k; ++i) acc = f.add(acc, f.mul(m[n - i], s[k - i]));
    s[k] = f.neg(acc);
  }
  return s;
}

template <class F>
typename F::value_type horner(const F& f, const Poly<F>& a, const typename F::value_type& x) {
  auto acc = f.zero();
  for (std::size_t i = a.size(); i-- > 0;) acc = f.add(f.mul(acc, x), a[i]);
  return acc;
}

template <class F>
std::vector<std::size_t> vanishing_t(const F& f, const Resolvents& r, const mpz_class& p) {
  const Poly<F> m = reduce_poly(f, r.ftilde);
  if (poly_gcd(f, m, poly_derivative(f, m)).size() != 1) throw BadPrime("p divides the discriminant of F~");
  Poly<F> g = powmod_x_t(f, p, m);
  g.insert(g.begin(), static_cast<std::size_t>(r.hdeg), f.zero());
  g = poly_rem(f, std::move(g), m);
  const Poly<F> s = power_sums(f, m);
  auto t = f.zero();
  for (std::size_t i = 0; i < g.size(); ++i) t = f.add(t, f.mul(g[i], s[i]));
  mpz_class scale;
  mpz_pow_ui(scale.get_mpz_t(), r.D.get_mpz_t(), static_cast<unsigned long>(1 + r.hdeg));
  t = f.mul(t, from_rational(f, mpq_class(scale)));
  std::vector<std::size_t> hits;
  for (std::size_t c = 0; c < r.G.size(); ++c) {
    Poly<F> gc;
    for (const auto& x : r.G[c]) gc.push_back(from_rational(f, mpq_class(x)));
    if (f.is_zero(horner(f, gc, t))) hits.push_back(c);
  }
  return hits;
}

template <class F>
std::vector<int> factor_degrees_t(const F& f, const std::vector<mpq_class>& fq, const mpz_class& p) {
  Poly<F> m = reduce_poly(f, fq);
  poly_trim(f, m);
  const std::size_t n = m.size() - 1;
  if (poly_gcd(f, m, poly_derivative(f, m)).size() != 1) throw BadPrime("F is not squarefree mod p");
  // Frobenius matrix: column i is x^(i p) mod m.
  const Poly<F> xp = powmod_x_t(f, p, m);
  std::vector<Poly<F>> cols{Poly<F>{f.one()}};
  for (std::size_t i = 1; i < n; ++i) cols.push_back(mulmod(f, cols.back(), xp, m));
  auto frob = [&](const Poly<F>& h) {
    Poly<F> out(n, f.zero());
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (f.is_zero(h[i])) continue;
      for (std::size_t j = 0; j < cols[i].size(); ++j) out[j] = f.add(out[j], f.mul(h[i], cols[i][j]));
    }
    poly_trim(f, out);
    return out;
  };
  std::vector<int> degs;
  Poly<F> rest = m, h{f.zero(), f.one()};
  for (std::size_t d = 1; 2 * d <= rest.size() - 1; ++d) {
    h = frob(h);
    Poly<F> hx = h;
    hx.resize(std::max<std::size_t>(hx.size(), 2), f.zero());
    hx[1] = f.sub(hx[1], f.one());
    Poly<F> g = poly_gcd(f, rest, poly_rem(f, hx, rest));
    const std::size_t dg = g.size() - 1;
    if (dg == 0) continue;
    for (std::size_t k = 0; k < dg / d; ++k) degs.push_back(static_cast<int>(d));
    // rest /= g
    Poly<F> q(rest.size() - g.size() + 1, f.zero()), a = rest;
    for (std::size_t i = q.size(); i-- > 0;) {
      q[i] = a[i + g.size() - 1];
      for (std::size_t j = 0; j < g.size(); ++j) a[i + j] = f.sub(a[i + j], f.mul(q[i], g[j]));
    }
    rest = q;
  }
  if (rest.size() > 1) degs.push_back(static_cast<int>(rest.size() - 1));
  std::sort(degs.begin(), degs.end());
  return degs;
}

bool fits_u64(const mpz_class& p) { return mpz_sizeinbase(p.get_mpz_t(), 2) <= 62; }

// Squarefree mod a 40-bit prime not dividing D: then the product is
// squarefree over Q.
bool product_squarefree(const std::vector<std::vector<mpz_class>>& G, const mpz_class& D) {
  std::uint64_t q = std::uint64_t{1} << 40;
  do q = arith::next_prime(q);
  while (mpz_divisible_ui_p(D.get_mpz_t(), q));
  const PrimeField f{q};
  Poly<PrimeField> prod{1};
  for (const auto& g : G) {
    Poly<PrimeField> gq;
    for (const auto& x : g) gq.push_back(from_rational(f, mpq_class(x)));
    Poly<PrimeField> c(prod.size() + gq.size() - 1, 0);
    for (std::size_t i = 0; i < prod.size(); ++i)
      for (std::size_t j = 0; j < gq.size(); ++j) c[i + j] = f.add(c[i + j], f.mul(prod[i], gq[j]));
    prod = std::move(c);
  }
  return poly_gcd(f, prod, poly_derivative(f, prod)).size() == 1;
}

}  // namespace

std::vector<Class> similarity_classes(int ell) {
  std::map<Key, Class> by_key;
  for (int a = 0; a < ell; ++a)
    for (int b = 0; b < ell; ++b)
      for (int c = 0; c < ell; ++c)
        for (int d = 0; d < ell; ++d) {
          const Mat2 m{a, b, c, d};
          const Key k = key_of(m, ell);
          if (std::get<1>(k) == 0) continue;
          Class& cl = by_key[k];
          cl.trace = std::get<0>(k);
          cl.det = std::get<1>(k);
          cl.scalar = std::get<2>(k);
          cl.elements.push_back(m);
        }
  std::vector<Class> out;
  for (auto& [k, c] : by_key) out.push_back(std::move(c));
  return out;
}

std::vector<int> odd_part_subgroup(int ell) {
  const int n = ell - 1, m = n >> arith::two_adic_valuation(static_cast<arith::u64>(n));
  std::vector<int> s;
  for (int x = 1; x < ell; ++x)
    if (arith::powmod(static_cast<arith::u64>(x), static_cast<arith::u64>(m), static_cast<arith::u64>(ell)) == 1)
      s.push_back(x);
  return s;
}

Quotient quotient_data(int ell, const std::vector<evaluation::PlanePoint>& plane) {
  Quotient q;
  q.ell = ell;
  q.S = odd_part_subgroup(ell);
  const std::size_t n = static_cast<std::size_t>(ell) * static_cast<std::size_t>(ell);
  std::vector<const Complex*> alpha(n, nullptr);
  for (const auto& pt : plane) alpha[static_cast<std::size_t>(pt.a + ell * pt.b)] = &pt.alpha;
  q.orbit_of.assign(n, -1);
  for (int y = 0; y < ell; ++y)
    for (int x = 0; x < ell; ++x) {
      const std::size_t i = static_cast<std::size_t>(x + ell * y);
      if (i == 0 || q.orbit_of[i] >= 0) continue;
      const int o = static_cast<int>(q.orbit_rep.size());
      q.orbit_rep.push_back({x, y});
      Complex sum;
      bool first = true;
      for (int s : q.S) {
        const std::size_t j = static_cast<std::size_t>(md(static_cast<long>(s) * x, ell) + ell * md(static_cast<long>(s) * y, ell));
        if (!alpha[j]) throw std::invalid_argument("quotient_data: plane is missing a point");
        q.orbit_of[j] = o;
        sum = first ? *alpha[j] : sum + *alpha[j];
        first = false;
      }
      q.roots.push_back(sum);
    }
  return q;
}

std::vector<QuotientClass> quotient_classes(const std::vector<Class>& classes, const std::vector<int>& S, int ell) {
  std::map<Key, std::size_t> index;
  for (std::size_t i = 0; i < classes.size(); ++i)
    index[{classes[i].trace, classes[i].det, classes[i].scalar}] = i;
  std::vector<bool> used(classes.size(), false);
  std::vector<QuotientClass> out;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (used[i]) continue;
    QuotientClass qc;
    qc.size = classes[i].elements.size();
    for (int s : S) {
      const Key k{md(static_cast<long>(s) * classes[i].trace, ell), md(static_cast<long>(s) * s % ell * classes[i].det, ell),
                  classes[i].scalar};
      const std::size_t j = index.at(k);
      used[j] = true;
      qc.lifts.push_back(j);
    }
    out.push_back(std::move(qc));
  }
  return out;
}

Resolvents build_resolvents(const Quotient& q, const evaluation::RationalPoly& ftilde) {
  const int ell = q.ell;
  Resolvents r;
  r.ell = ell;
  r.ftilde = ftilde.c;
  r.D = ftilde.denominator;
  r.classes = similarity_classes(ell);
  r.qclasses = quotient_classes(r.classes, q.S, ell);
  const std::size_t n_orbits = q.roots.size();
  if (ftilde.c.size() != n_orbits + 1) throw std::invalid_argument("build_resolvents: degree mismatch");

  // orbit permutation for every matrix of the first lift
  auto perm_of = [&](const Mat2& m) {
    std::vector<std::size_t> p(n_orbits);
    for (std::size_t o = 0; o < n_orbits; ++o) {
      const auto [x, y] = q.orbit_rep[o];
      const int u = md(static_cast<long>(m.a) * x + static_cast<long>(m.b) * y, ell);
      const int v = md(static_cast<long>(m.c) * x + static_cast<long>(m.d) * y, ell);
      p[o] = static_cast<std::size_t>(q.orbit_of[static_cast<std::size_t>(u + ell * v)]);
    }
    return p;
  };

  const double log2D = std::log2(std::max(1.0, r.D.get_d()));
  double max_log_root = 0;
  for (const auto& a : q.roots) max_log_root = std::max(max_log_root, std::log2(std::max(1.0, mp::abs(a).to_double())));

  for (int hdeg : {2, 3, 1, 4}) {
    r.hdeg = hdeg;
    // bits of the largest scaled coefficient, plus guard bits
    std::size_t biggest = 0;
    for (const auto& qc : r.qclasses) biggest = std::max(biggest, qc.size);
    const double per_root = std::log2(static_cast<double>(n_orbits)) + (1 + hdeg) * (max_log_root + log2D) + 1;
    const mp::Bits prec = static_cast<mp::Bits>(static_cast<double>(biggest) * (per_root + 1) + 128);

    std::vector<Complex> fc;
    for (const auto& c : ftilde.c) fc.push_back(Complex(Real(c, prec)));
    std::vector<Complex> roots = refine_roots(fc, q.roots, prec);
    std::vector<Complex> hp;
    for (const auto& a : roots) hp.push_back(mp::pow(a, hdeg));

    mpz_class scale;
    mpz_pow_ui(scale.get_mpz_t(), r.D.get_mpz_t(), static_cast<unsigned long>(1 + hdeg));
    const Real rscale(scale, prec);
    r.G.clear();
    r.min_margin_bits = INFINITY;
    for (const auto& qc : r.qclasses) {
      std::vector<Complex> rr;
      for (const auto& m : r.classes[qc.lifts[0]].elements) {
        const auto p = perm_of(m);
        Complex acc = Complex::zero(prec);
        for (std::size_t o = 0; o < n_orbits; ++o) acc += hp[o] * roots[p[o]];
        rr.push_back(acc * rscale);
      }
      const auto coeffs = evaluation::poly_from_roots(rr);
      std::vector<mpz_class> g;
      for (const auto& c : coeffs) {
        const mpz_class z = c.real().round_to_integer();
        const Real err = mp::max(mp::abs(c.real() - Real(z, prec)), mp::abs(c.imag()));
        const double bits = err.is_zero() ? static_cast<double>(prec) : -static_cast<double>(err.exponent());
        r.min_margin_bits = std::min(r.min_margin_bits, bits);
        g.push_back(z);
      }
      r.G.push_back(std::move(g));
    }
    if (r.min_margin_bits < 32) throw PrecisionError("resolvent coefficients are not close to integers");
    if (product_squarefree(r.G, r.D)) return r;
  }
  throw NonGeneric("no h gives pairwise coprime resolvents");
}

std::vector<std::size_t> vanishing_qclasses(const Resolvents& r, const mpz_class& p) {
  if (mpz_divisible_p(r.D.get_mpz_t(), p.get_mpz_t())) throw BadPrime("p divides the denominator of F~");
  if (fits_u64(p)) return vanishing_t(PrimeField{p.get_ui()}, r, p);
  return vanishing_t(MpzField{p}, r, p);
}

std::size_t frobenius_qclass(const Resolvents& r, const mpz_class& p) {
  const auto hits = vanishing_qclasses(r, p);
  if (hits.size() != 1) throw BadPrime(std::to_string(hits.size()) + " resolvents vanish at the trace");
  return hits[0];
}

FrobeniusResult frobenius(const Resolvents& r, const mpz_class& p, long det_target) {
  FrobeniusResult out;
  out.qclass = frobenius_qclass(r, p);
  const int det = md(det_target, r.ell);
  int found = 0;
  for (std::size_t c : r.qclasses[out.qclass].lifts)
    if (r.classes[c].det == det) {
      out.cls = c;
      ++found;
    }
  if (found != 1) throw PrecisionError("no lift of the Frobenius class has the expected determinant");
  out.trace = r.classes[out.cls].trace;
  return out;
}

std::vector<int> factor_degrees(const std::vector<mpq_class>& f, const mpz_class& p) {
  if (fits_u64(p)) return factor_degrees_t(PrimeField{p.get_ui()}, f, p);
  return factor_degrees_t(MpzField{p}, f, p);
}

std::vector<int> orbit_lengths(const Mat2& m, int ell) {
  const std::size_t n = static_cast<std::size_t>(ell) * static_cast<std::size_t>(ell);
  std::vector<bool> seen(n, false);
  std::vector<int> out;
  for (std::size_t i = 1; i < n; ++i) {
    if (seen[i]) continue;
    int len = 0;
    std::size_t j = i;
    do {
      seen[j] = true;
      ++len;
      const int x = static_cast<int>(j % static_cast<std::size_t>(ell)), y = static_cast<int>(j / static_cast<std::size_t>(ell));
      j = static_cast<std::size_t>(md(static_cast<long>(m.a) * x + static_cast<long>(m.b) * y, ell) +
                                   ell * md(static_cast<long>(m.c) * x + static_cast<long>(m.d) * y, ell));
    } while (j != i);
    out.push_back(len);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<mpz_class> powmod_x(const mpz_class& e, const std::vector<mpz_class>& f, const mpz_class& p) {
  return powmod_x_t(MpzField{p}, e, f);
}

}  // namespace modgal::frobenius
