#include "modgal/qexpansion.hpp"

#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "modgal/arith.hpp"
#include "modgal/errors.hpp"

namespace modgal::qexp {

using arith::u64;
using newforms::Characters;
using newforms::NebentypusBasis;

namespace {

std::vector<int> units_mod(int m) {
  std::vector<int> u;
  for (int j = 1; j <= m; ++j)
    if (std::gcd(j, m) == 1) u.push_back(j % m);
  return u;
}

u64 reduce_rational(const mpq_class& x, u64 p) {
  mpz_class num = x.get_num() % p, den = x.get_den() % p;
  if (num < 0) num += p;
  if (den == 0) throw BadPrime("denominator divisible by the expansion prime");
  return arith::mulmod(num.get_ui(), arith::invmod(den.get_ui(), p), p);
}

u64 reduce_cyclo(const Cyclo& c, u64 p, u64 root) {
  u64 acc = 0, pw = 1;
  for (const auto& x : c.c) {
    if (x != 0) acc = (acc + arith::mulmod(reduce_rational(x, p), pw, p)) % p;
    pw = arith::mulmod(pw, root, p);
  }
  return acc;
}

ModSeries reduce_form(const std::vector<Cyclo>& f, std::size_t L, u64 p, u64 root) {
  ModSeries s(ModRing{p}, L);
  for (std::size_t n = 0; n < L; ++n) s[n] = reduce_cyclo(f[n], p, root);
  return s;
}

long common_denominator(const NebentypusBasis& nb) {
  mpz_class d = 1;
  for (const auto& b : nb.blocks)
    for (const auto& f : b.forms)
      for (const auto& c : f)
        for (const auto& x : c.c) d = lcm(d, mpz_class(x.get_den()));
  if (!d.fits_slong_p()) throw PrecisionError("echelon denominators exceed a machine word");
  return d.get_si();
}

}  // namespace

std::size_t trivial_degU(int ell, int g0) { return static_cast<std::size_t>(2 * g0 + ell + 1); }

std::size_t nontrivial_degU(int ell, int g, int order) {
  const long m = (ell - 1) / 2;
  return static_cast<std::size_t>(std::max<long>(1, ((2L * g - 2) * order + m - 1) / m));
}

ExpansionPrime choose_prime(const NebentypusBasis& nb, std::size_t B, long denominator, u64 above) {
  Characters chars(nb.ell);
  ExpansionPrime ep;
  ep.bound = newforms::coefficient_bound(nb, B) * static_cast<double>(denominator);
  const double lower = std::max(static_cast<double>(above), 2.0 * ep.bound);
  if (lower > 4e18) throw PrecisionError("expansion prime exceeds the word size");
  auto [p, root] = newforms::admissible_prime(static_cast<u64>(lower), chars.m(), nb.ell);
  ep.p = p;
  ep.root = root;
  for (int j : units_mod(chars.m())) ep.roots.push_back(arith::powmod(root, static_cast<u64>(j), p));
  return ep;
}

BaseSeries base_series(std::size_t B, u64 p) {
  const ModRing R{p};
  const std::size_t n = B + 1;
  std::vector<u64> s3(n, 0), s5(n, 0);
  for (std::size_t d = 1; d < n; ++d) {
    const u64 d3 = arith::powmod(d % p, 3, p), d5 = arith::powmod(d % p, 5, p);
    for (std::size_t k = d; k < n; k += d) {
      s3[k] = R.add(s3[k], d3);
      s5[k] = R.add(s5[k], d5);
    }
  }
  ModSeries e4(R, n), e6(R, n);
  e4[0] = e6[0] = R.one();
  for (std::size_t k = 1; k < n; ++k) {
    e4[k] = R.mul(R.from_int(240), s3[k]);
    e6[k] = R.neg(R.mul(R.from_int(504), s5[k]));
  }
  ModSeries e4sq = e4 * e4;
  ModSeries e4cube = e4sq * e4;
  // 1728 Delta = E4^3 - E6^2
  ModSeries delta = (e4cube - e6 * e6).scaled(R.inv(R.from_int(1728)));
  BaseSeries out;
  out.u = (delta * inverse(e4cube)).truncated(B);
  ModSeries dq = delta.shifted(-1);  // Delta / q, B terms
  out.q2dj = -(e6.truncated(B) * e4sq.truncated(B) * inverse(dq));
  out.e4 = e4.truncated(B);
  out.e6 = e6.truncated(B);
  return out;
}

Bivariate<ModRing> find_equation(const ModSeries& v_short, const ModSeries& u, std::size_t degU_bound,
                                 std::size_t degV) {
  const ModRing R = u.ring();
  const std::size_t N = std::min(v_short.trunc(), u.trunc());
  const std::size_t cols = (degU_bound + 1) * (degV + 1);
  std::vector<ModSeries> upow{ModSeries::constant(R, R.one(), N)}, vpow{ModSeries::constant(R, R.one(), N)};
  for (std::size_t i = 1; i <= degU_bound; ++i) upow.push_back(upow.back() * u.truncated(N));
  for (std::size_t k = 1; k <= degV; ++k) vpow.push_back(vpow.back() * v_short.truncated(N));

  struct Reduced {
    std::size_t pivot;
    std::vector<u64> vec, combo;
  };
  std::vector<Reduced> basis;
  for (std::size_t c = 0; c < cols; ++c) {
    if (2 * (c + 1) > N) throw PrecisionError("find_equation: insufficient short expansion");
    const std::size_t i = c / (degV + 1), k = c % (degV + 1);
    ModSeries col = mul_trunc(upow[i], vpow[k], N);
    std::vector<u64> x = col.coeffs(), combo(cols, 0);
    combo[c] = 1;
    for (const auto& b : basis) {
      const u64 f = x[b.pivot];
      if (!f) continue;
      for (std::size_t t = 0; t < N; ++t)
        if (b.vec[t]) x[t] = R.sub(x[t], R.mul(f, b.vec[t]));
      for (std::size_t t = 0; t <= c; ++t)
        if (b.combo[t]) combo[t] = R.sub(combo[t], R.mul(f, b.combo[t]));
    }
    std::size_t piv = 0;
    while (piv < N && x[piv] == 0) ++piv;
    if (piv == N) {
      Bivariate<ModRing> phi{R, std::vector<std::vector<u64>>(degV + 1, std::vector<u64>(degU_bound + 1, 0))};
      for (std::size_t t = 0; t <= c; ++t) phi.c[t % (degV + 1)][t / (degV + 1)] = combo[t];
      while (phi.c.size() > 1 && std::all_of(phi.c.back().begin(), phi.c.back().end(), [](u64 z) { return z == 0; }))
        phi.c.pop_back();
      return phi;
    }
    const u64 inv = R.inv(x[piv]);
    for (auto& z : x) z = R.mul(z, inv);
    for (auto& z : combo) z = R.mul(z, inv);
    basis.push_back({piv, std::move(x), std::move(combo)});
  }
  throw PrecisionError("find_equation: no relation within the degree bound");
}

ModSeries expand_trivial(const ModSeries& omega_short, const BaseSeries& base, int ell, int g0, std::size_t B) {
  if (base.u.trunc() < B + 1) throw std::invalid_argument("expand_trivial: base series too short");
  const std::size_t L = omega_short.trunc();
  if (L >= B) return omega_short.truncated(B);
  // v = omega dq / (q dj) = -omega u E4 / E6
  ModSeries v_short = -(omega_short * base.u.truncated(L) * base.e4.truncated(L) * inverse(base.e6.truncated(L)));
  auto phi = find_equation(v_short, base.u.truncated(L), trivial_degU(ell, g0), static_cast<std::size_t>(ell + 1));
  ModSeries v = series_newton_root(phi, base.u, v_short, B + 1);
  ModSeries den = base.u.shifted(-1) * base.e4.truncated(B);
  return -(v.shifted(-1) * base.e6.truncated(B) * inverse(den));
}

ModSeries series_root(const ModSeries& v, const ModSeries& w0, int order) {
  const ModRing R = v.ring();
  const std::size_t s = w0.valuation();
  if (s == w0.trunc()) throw PrecisionError("branch error: short ratio vanishes");
  if (s > 0) {
    return series_root(v.shifted(-static_cast<long>(s) * order), w0.shifted(-static_cast<long>(s)), order)
        .shifted(static_cast<long>(s));
  }
  const std::size_t N = v.trunc();
  std::size_t n = std::min(w0.trunc(), N);
  ModSeries w = w0.truncated(n);
  if ((pow(w, static_cast<unsigned long>(order)) - v.truncated(n)).valuation() < n)
    throw PrecisionError("branch error: short ratio is not an o-th root");
  const u64 o = R.from_int(order);
  while (n < N) {
    n = std::min(2 * n, N);
    ModSeries wn = w.padded(n);
    ModSeries wp = pow(wn, static_cast<unsigned long>(order - 1));
    ModSeries f = wp * wn - v.truncated(n);
    w = wn - f * inverse(wp.scaled(o));
  }
  return w;
}

ModSeries expand_nontrivial(const ModSeries& omega_short, const ModSeries& omega0, int order, const BaseSeries& base,
                            int ell, int g, std::size_t B) {
  if (order <= 1) throw std::invalid_argument("expand_nontrivial: character is trivial");
  if (omega0.trunc() < B || base.u.trunc() < B) throw std::invalid_argument("expand_nontrivial: inputs too short");
  const std::size_t L = omega_short.trunc();
  if (L >= B) return omega_short.truncated(B);
  if (omega0.valuation() != 1) throw std::invalid_argument("expand_nontrivial: omega0 must start at q");
  ModSeries w_short = omega_short.shifted(-1) * inverse(omega0.truncated(L).shifted(-1));
  ModSeries v_short = pow(w_short, static_cast<unsigned long>(order));
  auto phi = find_equation(v_short, base.u.truncated(L - 1), nontrivial_degU(ell, g, order),
                           static_cast<std::size_t>(ell + 1));
  ModSeries v = series_newton_root(phi, base.u, v_short, B - 1);
  ModSeries w = series_root(v, w_short, order);
  return (omega0.shifted(-1) * w).shifted(1);
}

Cyclo ExpandedForm::coefficient(std::size_t n) const {
  Cyclo c;
  c.c.resize(phi);
  for (std::size_t k = 0; k < phi; ++k) {
    c.c[k] = mpq_class(num[n * phi + k], denom);
    c.c[k].canonicalize();
  }
  return c;
}

const ExpandedForm& Expansion::form(int character, std::size_t row) const {
  for (const auto& f : forms)
    if (f.character == character && f.row == row) return f;
  throw std::out_of_range("expansion: no such form");
}

std::vector<mp::Complex> Expansion::eigenform(const NebentypusBasis& nb, std::size_t j, mp::Bits prec) const {
  const int m = (ell - 1) / 2;
  for (const auto& b : nb.blocks)
    for (std::size_t t = 0; t < b.eigenforms.size(); ++t) {
      if (b.eigenforms[t] != j) continue;
      std::vector<mp::Complex> zeta;
      const std::size_t phi = form(b.character, 0).phi;
      for (std::size_t k = 0; k < phi; ++k) zeta.push_back(mp::root_of_unity(static_cast<long>(k), m, prec));
      std::vector<mp::Complex> out(B, mp::Complex::zero(prec));
      for (std::size_t r = 0; r < b.forms.size(); ++r) {
        const ExpandedForm& f = form(b.character, r);
        const mp::Complex c = b.to_eigen(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(r)).at(prec) / f.denom;
        for (std::size_t n = 0; n < B; ++n) {
          mp::Complex a = mp::Complex::zero(prec);
          for (std::size_t k = 0; k < phi; ++k)
            if (f.num[n * phi + k]) a += zeta[k] * f.num[n * phi + k];
          out[n] += c * a;
        }
      }
      return out;
    }
  throw std::out_of_range("expansion: no such eigenform");
}

namespace {

ExpandedForm from_classical(int character, std::size_t row, const std::vector<Cyclo>& f, std::size_t phi) {
  ExpandedForm e;
  e.character = character;
  e.row = row;
  e.phi = phi;
  mpz_class d = 1;
  for (const auto& c : f)
    for (const auto& x : c.c) d = lcm(d, mpz_class(x.get_den()));
  if (!d.fits_slong_p()) throw PrecisionError("classical expansion: denominator exceeds a machine word");
  e.denom = d.get_si();
  e.num.assign(f.size() * phi, 0);
  for (std::size_t n = 0; n < f.size(); ++n)
    for (std::size_t k = 0; k < phi && k < f[n].c.size(); ++k) {
      mpz_class v = f[n].c[k].get_num() * (d / f[n].c[k].get_den());
      if (!v.fits_slong_p()) throw PrecisionError("classical expansion: coefficient exceeds a machine word");
      e.num[n * phi + k] = v.get_si();
    }
  return e;
}

Expansion classical_route(const modsym::Space& s, std::size_t B) {
  NebentypusBasis nb = newforms::nebentypus_bases(s, B);
  Expansion e;
  e.ell = s.level();
  e.B = B;
  const auto phi = static_cast<std::size_t>(nb.K.degree());
  for (const auto& b : nb.blocks)
    for (std::size_t r = 0; r < b.forms.size(); ++r) e.forms.push_back(from_classical(b.character, r, b.forms[r], phi));
  return e;
}

}  // namespace

Expansion expand_all(const modsym::Space& s, std::size_t B, const ExpandOptions& opt) {
  const int ell = s.level();
  const int g = static_cast<int>(arith::genus_x1(ell)), g0 = static_cast<int>(arith::genus_x0(ell));
  Characters chars(ell);
  const std::size_t L = std::max(2 * (trivial_degU(ell, g0) + 1) * static_cast<std::size_t>(ell + 2) + 4,
                                 opt.check_terms);
  if (opt.force_classical || g0 == 0 || B <= L) return classical_route(s, B);

  NebentypusBasis nb = newforms::nebentypus_bases(s, L);
  const long D = common_denominator(nb);
  ExpansionPrime ep = choose_prime(nb, B, D, opt.prime_above);
  const u64 p = ep.p;
  const ModRing R{p};
  // Newton reads u past B by the valuation of dPhi/dV, which is below L
  BaseSeries base = base_series(B + L, p);

  const newforms::CharacterBlock* trivial = nb.block(0);
  ModSeries omega0 = expand_trivial(reduce_form(trivial->forms[0], L, p, ep.root), base, ell, g0, B);

  // expansions of every block under zeta -> root
  std::vector<std::vector<ModSeries>> modp(static_cast<std::size_t>(chars.m()));
  for (const auto& b : nb.blocks)
    for (std::size_t r = 0; r < b.forms.size(); ++r) {
      ModSeries shrt = reduce_form(b.forms[r], L, p, ep.root);
      ModSeries full = b.character == 0
                           ? (r == 0 ? omega0 : expand_trivial(shrt, base, ell, g0, B))
                           : expand_nontrivial(shrt, omega0, chars.order(b.character), base, ell, g, B);
      modp[static_cast<std::size_t>(b.character)].push_back(std::move(full));
    }

  const auto units = units_mod(chars.m());
  const std::size_t phi = units.size();
  PrimeField F{p};
  FpMatrix van(F, phi, phi);
  for (std::size_t j = 0; j < phi; ++j)
    for (std::size_t k = 0; k < phi; ++k) van(j, k) = arith::powmod(ep.roots[j], k, p);
  FpMatrix vinv = inverse(van);
  const u64 Dm = R.from_int(D);

  Expansion e;
  e.ell = ell;
  e.B = B;
  e.prime = p;
  std::vector<u64> vals(phi);
  for (const auto& b : nb.blocks)
    for (std::size_t r = 0; r < b.forms.size(); ++r) {
      std::vector<const ModSeries*> conj;
      for (int j : units) {
        const auto& blk = modp[static_cast<std::size_t>((static_cast<long>(b.character) * j) % chars.m())];
        if (blk.size() <= r) throw BadPrime("conjugate character block missing");
        conj.push_back(&blk[r]);
      }
      ExpandedForm f;
      f.character = b.character;
      f.row = r;
      f.denom = D;
      f.phi = phi;
      f.num.assign(B * phi, 0);
      for (std::size_t n = 0; n < B; ++n) {
        for (std::size_t j = 0; j < phi; ++j) vals[j] = (*conj[j])[n];
        for (std::size_t k = 0; k < phi; ++k) {
          u64 acc = 0;
          for (std::size_t j = 0; j < phi; ++j) acc = R.add(acc, R.mul(vinv(k, j), vals[j]));
          const long c = arith::balanced(R.mul(acc, Dm), p);
          if (static_cast<double>(std::labs(c)) > ep.bound) throw BadPrime("lifted coefficient exceeds the bound");
          f.num[n * phi + k] = c;
        }
      }
      const std::size_t check = std::min(opt.check_terms, L);
      for (std::size_t n = 0; n < check; ++n) {
        Cyclo c = f.coefficient(n);
        for (std::size_t k = 0; k < phi; ++k) {
          const mpq_class want = k < b.forms[r][n].c.size() ? b.forms[r][n].c[k] : mpq_class(0);
          if (c.c[k] != want) throw PrecisionError("fast expansion disagrees with the classical one");
        }
      }
      e.forms.push_back(std::move(f));
    }
  return e;
}

void write_cache(std::ostream& os, const Expansion& e, const std::string& cusp_label) {
  os << "modgal-qexp 1\n";
  os << "ell " << e.ell << " B " << e.B << " prime " << e.prime << " forms " << e.forms.size() << "\n";
  os << "cusp " << (cusp_label.empty() ? "inf" : cusp_label) << "\n";
  for (const auto& f : e.forms) {
    os << "form character " << f.character << " row " << f.row << " denom " << f.denom << " phi " << f.phi << "\n";
    for (std::size_t n = 0; n < f.size(); ++n) {
      for (std::size_t k = 0; k < f.phi; ++k) os << (k ? " " : "") << f.num[n * f.phi + k];
      os << "\n";
    }
  }
}

Expansion read_cache(std::istream& is) {
  auto fail = [](const std::string& what) { return std::runtime_error("qexp cache: " + what); };
  std::string line, tag;
  int version = 0;
  if (!std::getline(is, line) || (std::istringstream(line) >> tag >> version, tag != "modgal-qexp" || version != 1))
    throw fail("bad header");
  Expansion e;
  std::size_t count = 0;
  std::string k1, k2, k3, k4;
  if (!(is >> k1 >> e.ell >> k2 >> e.B >> k3 >> e.prime >> k4 >> count)) throw fail("bad size line");
  if (!(is >> tag >> line) || tag != "cusp") throw fail("missing cusp label");
  for (std::size_t i = 0; i < count; ++i) {
    ExpandedForm f;
    std::string a, b, c, d, form;
    if (!(is >> form >> a >> f.character >> b >> f.row >> c >> f.denom >> d >> f.phi) || form != "form")
      throw fail("bad form header");
    f.num.resize(e.B * f.phi);
    for (auto& x : f.num)
      if (!(is >> x)) throw fail("truncated coefficients");
    e.forms.push_back(std::move(f));
  }
  return e;
}

}  // namespace modgal::qexp
