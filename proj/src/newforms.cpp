#include "modgal/newforms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "modgal/errors.hpp"
#include "modgal/linalg.hpp"
#include "modgal/polyroots.hpp"

namespace modgal::newforms {

using mp::Complex;
using mp::Real;
using modsym::PlusSpaceModP;
using modsym::Space;

Characters::Characters(int ell) : ell_(ell), m_((ell - 1) / 2) {
  g_ = static_cast<long>(arith::primitive_root(static_cast<arith::u64>(ell)));
  dlog_.assign(static_cast<std::size_t>(ell), -1);
  long x = 1;
  for (int k = 0; k < ell - 1; ++k) {
    dlog_[static_cast<std::size_t>(x)] = k;
    x = x * g_ % ell;
  }
}

int Characters::order(int i) const { return m_ / std::gcd(i % m_, m_); }

int Characters::exponent(int i, long a) const {
  long r = ((a % ell_) + ell_) % ell_;
  if (r == 0) throw std::invalid_argument("character value at a non-unit");
  return static_cast<int>((static_cast<long>(i) * dlog_[static_cast<std::size_t>(r)]) % m_);
}

Cyclo Characters::value(const CycloField& K, int i, long a) const { return K.zeta_pow(exponent(i, a)); }

Complex Characters::embed(int i, long a, mp::Bits prec) const { return mp::root_of_unity(exponent(i, a), m_, prec); }

std::uint64_t Characters::reduce(int i, long a, std::uint64_t P, std::uint64_t root) const {
  return arith::powmod(root, static_cast<std::uint64_t>(exponent(i, a)), P);
}

QMatrix hecke_on_plus(const Space& s, long n) {
  QMatrix pb = PlusSpaceModP::plus_basis(s);
  return solve(pb, s.on_homology(s.hecke(n)) * pb);
}

QMatrix diamond_on_plus(const Space& s, long d) {
  QMatrix pb = PlusSpaceModP::plus_basis(s);
  return solve(pb, s.on_homology(s.diamond(d)) * pb);
}

long find_hecke_generator(const std::function<QMatrix(long)>& op, long bound) {
  RationalField q;
  for (long n = 2; n <= bound; ++n) {
    auto cp = charpoly(op(n));
    if (poly_gcd(q, cp, poly_derivative(q, cp)).size() == 1) return n;
  }
  throw Error("no mild generator among T_2..T_" + std::to_string(bound));
}

long find_hecke_generator(const Space& s, long bound) {
  QMatrix pb = PlusSpaceModP::plus_basis(s);
  return find_hecke_generator([&](long n) { return solve(pb, s.on_homology(s.hecke(n)) * pb); }, bound);
}

namespace {

mp::CMatrix to_complex(const QMatrix& m, mp::Bits prec) {
  mp::CMatrix c = linalg::zeros(static_cast<Eigen::Index>(m.rows), static_cast<Eigen::Index>(m.cols), prec);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j)
      if (m(i, j) != 0) c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = Complex(Real(m(i, j), prec));
  return c;
}

Eigen::Index largest_entry(const mp::CVector& v) {
  Eigen::Index k = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (mp::abs(v(i)) > mp::abs(v(k))) k = i;
  return k;
}

std::vector<bool> prime_table(std::size_t bound) {
  std::vector<bool> is_p(bound, false);
  for (auto p : arith::primes_up_to(bound ? bound - 1 : 0)) is_p[p] = true;
  return is_p;
}

// Fills a_n from a_p by multiplicativity and the prime-power recursion.
template <class T, class Mul, class Sub, class Scale>
void fill_multiplicative(std::vector<T>& a, int ell, const std::function<T(long)>& eps_p, Mul mul, Sub sub,
                         Scale scale) {
  const std::size_t B = a.size();
  std::vector<std::size_t> spf(B, 0);
  for (std::size_t i = 2; i < B; ++i)
    if (!spf[i])
      for (std::size_t j = i; j < B; j += i)
        if (!spf[j]) spf[j] = i;
  for (std::size_t n = 2; n < B; ++n) {
    std::size_t p = spf[n], m = n, pk = 1;
    while (m % p == 0) {
      m /= p;
      pk *= p;
    }
    if (m > 1) {
      a[n] = mul(a[pk], a[m]);
    } else if (pk != p) {
      if (static_cast<long>(p) == ell)
        a[n] = mul(a[p], a[n / p]);
      else
        a[n] = sub(mul(a[p], a[n / p]), scale(eps_p(static_cast<long>(p)), static_cast<long>(p), a[n / p / p]));
    }
  }
}

// Wang's rational reconstruction of a mod P with numerator and denominator
// below sqrt(P/2).
std::optional<mpq_class> ratrecon_mod(std::uint64_t a, std::uint64_t P) {
  const mpz_class pz(static_cast<unsigned long>(P));
  mpz_class bound;
  mpz_class half = pz / 2;
  mpz_sqrt(bound.get_mpz_t(), half.get_mpz_t());
  mpz_class r0 = pz, r1 = static_cast<unsigned long>(a), t0 = 0, t1 = 1;
  while (r1 > bound) {
    mpz_class q = r0 / r1;
    mpz_class r2 = r0 - q * r1, t2 = t0 - q * t1;
    r0 = r1;
    r1 = r2;
    t0 = t1;
    t1 = t2;
  }
  if (abs(t1) > bound || t1 == 0) return std::nullopt;
  mpq_class x(r1, t1);
  x.canonicalize();
  return x;
}

std::vector<std::size_t> numeric_pivots(const mp::CMatrix& f, const Real& tol) {
  std::vector<std::size_t> piv;
  const Eigen::Index d = f.rows();
  for (Eigen::Index n = 0; n < f.cols() && static_cast<Eigen::Index>(piv.size()) < d; ++n) {
    mp::CMatrix sub(d, static_cast<Eigen::Index>(piv.size()) + 1);
    for (std::size_t k = 0; k < piv.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = f.col(static_cast<Eigen::Index>(piv[k]));
    sub.col(static_cast<Eigen::Index>(piv.size())) = f.col(n);
    if (linalg::colpiv_qr(sub, tol, false).rank > static_cast<int>(piv.size())) piv.push_back(static_cast<std::size_t>(n));
  }
  if (static_cast<Eigen::Index>(piv.size()) != d) throw PrecisionError("eigenform coefficients do not reach full rank");
  return piv;
}

double max_deligne(std::size_t B) {
  double best = 0;
  for (std::size_t n = 1; n < B; ++n)
    best = std::max(best, static_cast<double>(arith::num_divisors(n)) * std::sqrt(static_cast<double>(n)));
  return best;
}

}  // namespace

std::vector<Eigenform> numeric_eigenforms(const Space& s, std::size_t bound, mp::Bits prec, long generator) {
  const int ell = s.level();
  Characters chars(ell);
  QMatrix pb = PlusSpaceModP::plus_basis(s);
  auto on_plus = [&](const QMatrix& op) { return solve(pb, s.on_homology(op) * pb); };
  if (generator == 0) generator = find_hecke_generator([&](long n) { return on_plus(s.hecke(n)); });
  const std::size_t g = pb.cols;
  QMatrix t = on_plus(s.hecke(generator));
  auto cp = charpoly(t);
  std::vector<Complex> coeffs;
  for (const auto& c : cp) coeffs.push_back(Complex(Real(c, prec)));
  auto roots = polynomial_roots(coeffs, prec);
  mp::CMatrix tc = to_complex(t, prec);
  mp::CMatrix dc = to_complex(on_plus(s.diamond(chars.generator())), prec);
  const Real tol = linalg::default_tolerance(prec);

  std::vector<mp::CMatrix> tp(bound);
  auto is_p = prime_table(bound);
  for (std::size_t p = 2; p < bound; ++p)
    if (is_p[p]) tp[p] = to_complex(on_plus(s.hecke(static_cast<long>(p))), prec);

  std::vector<Eigenform> out;
  for (const auto& lambda : roots) {
    mp::CMatrix m = tc;
    for (std::size_t i = 0; i < g; ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) -= lambda;
    mp::CMatrix k = linalg::kernel_basis(m, tol);
    if (k.cols() != 1) throw PrecisionError("generator eigenspace is not a line");
    mp::CVector v = k.col(0);
    const Eigen::Index idx = largest_entry(v);
    Eigenform f;
    Complex mu = linalg::mul(dc, v)(idx) / v(idx);
    double turns = mp::arg(mu).to_double() / (2 * M_PI) * chars.m();
    f.character = static_cast<int>(((std::lround(turns) % chars.m()) + chars.m()) % chars.m());
    if (mp::abs(mu - mp::root_of_unity(f.character, chars.m(), prec)) > tol)
      throw PrecisionError("diamond eigenvalue is not a root of unity");
    f.a.assign(bound, Complex::zero(prec));
    if (bound > 1) f.a[1] = Complex(Real::from(1L, prec));
    for (std::size_t p = 2; p < bound; ++p)
      if (is_p[p]) f.a[p] = linalg::mul(tp[p], v)(idx) / v(idx);
    const int ch = f.character;
    fill_multiplicative<Complex>(
        f.a, ell, [&](long p) { return chars.embed(ch, p, prec); }, [](const Complex& x, const Complex& y) { return x * y; },
        [](const Complex& x, const Complex& y) { return x - y; },
        [](const Complex& e, long p, const Complex& x) { return e * x * p; });
    out.push_back(std::move(f));
  }
  std::stable_sort(out.begin(), out.end(), [](const Eigenform& a, const Eigenform& b) { return a.character < b.character; });
  return out;
}

std::pair<std::uint64_t, std::uint64_t> admissible_prime(std::uint64_t lower, int m, int ell) {
  const std::uint64_t mm = static_cast<std::uint64_t>(m);
  std::uint64_t P = lower / mm * mm + 1;
  if (P <= lower) P += mm;
  for (;; P += mm) {
    if (P == static_cast<std::uint64_t>(ell) || !arith::is_prime(P)) continue;
    // least element of exact order m
    for (std::uint64_t x = 2; x < P; ++x) {
      std::uint64_t r = arith::powmod(x, (P - 1) / mm, P);
      bool primitive = true;
      for (auto [q, e] : arith::factor(mm))
        if (arith::powmod(r, mm / q, P) == 1) primitive = false;
      if (m == 1 || primitive) return {P, m == 1 ? 1 : r};
    }
  }
}

std::vector<BlockModP> basis_mod_p(const Space& s, std::uint64_t P, std::uint64_t root, std::size_t B) {
  PrimeField f{P};
  Characters chars(s.level());
  PlusSpaceModP plus(s, P);
  auto t = plus.hecke_all(B);
  FpMatrix dg = plus.diamond(chars.generator());
  const std::size_t g = plus.dim();
  std::vector<BlockModP> out;
  for (int i = 0; i < chars.m(); ++i) {
    FpMatrix m = dg;
    const std::uint64_t lam = arith::powmod(root, static_cast<std::uint64_t>(i), P);
    for (std::size_t r = 0; r < g; ++r) m(r, r) = f.sub(m(r, r), lam);
    FpMatrix e = kernel(m);
    const std::size_t d = e.cols;
    if (d == 0) continue;
    FpMatrix et = e.transpose();
    auto piv = rref(et);
    FpMatrix sub(f, d, d);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) sub(r, c) = e(piv[r], c);
    FpMatrix sinv = inverse(sub);
    FpMatrix w(f, d * d, B);
    for (std::size_t n = 1; n < B; ++n) {
      FpMatrix te = t[n] * e;
      FpMatrix rows(f, d, d);
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) rows(r, c) = te(piv[r], c);
      FpMatrix rn = sinv * rows;
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) w(r * d + c, n) = rn(r, c);
    }
    auto wp = rref(w);
    if (wp.size() != d) throw BadPrime("Hecke matrix entries do not span the character block mod P");
    BlockModP blk;
    blk.character = i;
    blk.pivots = wp;
    for (std::size_t r = 0; r < d; ++r) {
      std::vector<std::uint64_t> row(B);
      for (std::size_t n = 0; n < B; ++n) row[n] = w(r, n);
      blk.forms.push_back(std::move(row));
    }
    out.push_back(std::move(blk));
  }
  return out;
}

const CharacterBlock* NebentypusBasis::block(int character) const {
  for (const auto& b : blocks)
    if (b.character == character) return &b;
  return nullptr;
}

std::vector<Complex> NebentypusBasis::eigen_expansion(std::size_t j, mp::Bits prec) const {
  const CharacterBlock* b = block(eigen[j].character);
  const auto pos = static_cast<Eigen::Index>(std::find(b->eigenforms.begin(), b->eigenforms.end(), j) - b->eigenforms.begin());
  const std::size_t B = b->forms.front().size();
  std::vector<Complex> out(B, Complex::zero(prec));
  for (std::size_t r = 0; r < b->forms.size(); ++r) {
    const Complex w = b->to_eigen(pos, static_cast<Eigen::Index>(r)).at(prec);
    for (std::size_t n = 0; n < B; ++n) {
      const Cyclo& c = b->forms[r][n];
      if (K.is_zero(c)) continue;
      out[n] += w * K.embed(c, 1, prec);
    }
  }
  return out;
}

namespace {

// max over the Galois orbit of sum_j |M_rj|, M = F_piv^{-1}.
double change_of_basis_norm(const NebentypusBasis& nb, const Characters& chars, int character) {
  double worst = 0;
  for (int j = 1; j < chars.m(); ++j) {
    if (std::gcd(j, chars.m()) != 1) continue;
    const CharacterBlock* b = nb.block(static_cast<int>((static_cast<long>(character) * j) % chars.m()));
    if (!b) continue;
    mp::CMatrix fp = b->to_eigen;
    mp::CMatrix inv = linalg::solve(fp, linalg::identity(fp.rows(), fp(0, 0).precision()));
    for (Eigen::Index r = 0; r < inv.rows(); ++r) {
      double s = 0;
      for (Eigen::Index c = 0; c < inv.cols(); ++c) s += mp::abs(inv(r, c)).to_double();
      worst = std::max(worst, s);
    }
  }
  return worst;
}

double inverse_vandermonde_norm(int m) {
  std::vector<int> units;
  for (int j = 1; j <= m; ++j)
    if (std::gcd(j, m) == 1) units.push_back(j % m);
  const auto n = static_cast<Eigen::Index>(units.size());
  const mp::Bits prec = 128;
  mp::CMatrix v(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index k = 0; k < n; ++k) v(r, k) = mp::root_of_unity(static_cast<long>(units[static_cast<std::size_t>(r)]) * k, m, prec);
  mp::CMatrix inv = linalg::solve(v, linalg::identity(n, prec));
  double worst = 0;
  for (Eigen::Index r = 0; r < n; ++r) {
    double s = 0;
    for (Eigen::Index c = 0; c < n; ++c) s += mp::abs(inv(r, c)).to_double();
    worst = std::max(worst, s);
  }
  return worst;
}

}  // namespace

double coefficient_bound(const NebentypusBasis& nb, std::size_t B) {
  Characters chars(nb.ell);
  double cob = 0;
  for (const auto& b : nb.blocks) cob = std::max(cob, change_of_basis_norm(nb, chars, b.character));
  return cob * max_deligne(B) * inverse_vandermonde_norm(chars.m());
}

namespace {

// Exact echelon forms from the blocks mod P: values at the embeddings
// zeta -> root^j come from the conjugate characters i j.
std::vector<std::vector<Cyclo>> lift_block(const std::vector<BlockModP>& mod, int character, const Characters& chars,
                                           std::uint64_t P, std::uint64_t root) {
  const int m = chars.m();
  std::vector<int> units;
  for (int j = 1; j <= m; ++j)
    if (std::gcd(j, m) == 1) units.push_back(j % m);
  const std::size_t phi = units.size();
  PrimeField f{P};
  FpMatrix v(f, phi, phi);
  for (std::size_t r = 0; r < phi; ++r)
    for (std::size_t k = 0; k < phi; ++k)
      v(r, k) = arith::powmod(root, static_cast<std::uint64_t>(units[r]) * k % static_cast<std::uint64_t>(m), P);
  FpMatrix vinv = inverse(v);
  std::vector<const BlockModP*> conj;
  for (int j : units) {
    int target = static_cast<int>((static_cast<long>(character) * j) % m);
    const BlockModP* b = nullptr;
    for (const auto& x : mod)
      if (x.character == target) b = &x;
    if (!b) throw BadPrime("conjugate character block missing mod P");
    conj.push_back(b);
  }
  const BlockModP& base = *conj.front();
  for (const auto* b : conj)
    if (b->pivots != base.pivots) throw BadPrime("pivot pattern differs between conjugate blocks mod P");
  const std::size_t d = base.forms.size(), B = base.forms.front().size();
  std::vector<std::vector<Cyclo>> out(d, std::vector<Cyclo>(B));
  std::vector<std::uint64_t> vals(phi);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t n = 0; n < B; ++n) {
      for (std::size_t j = 0; j < phi; ++j) vals[j] = conj[j]->forms[r][n];
      Cyclo c;
      c.c.resize(phi);
      for (std::size_t k = 0; k < phi; ++k) {
        std::uint64_t acc = 0;
        for (std::size_t j = 0; j < phi; ++j) acc = f.add(acc, f.mul(vinv(k, j), vals[j]));
        auto q = ratrecon_mod(acc, P);
        if (!q) throw PrecisionError("classical expansion: coefficient not recognised mod P");
        c.c[k] = *q;
      }
      out[r][n] = std::move(c);
    }
  return out;
}

}  // namespace

NebentypusBasis nebentypus_bases(const Space& s, std::size_t B, mp::Bits prec) {
  NebentypusBasis nb;
  nb.ell = s.level();
  Characters chars(nb.ell);
  nb.K = CycloField(chars.m());
  const std::size_t sturm = static_cast<std::size_t>(nb.ell + 1) / 6 + 2;
  nb.eigen = numeric_eigenforms(s, sturm, prec);
  const Real tol = linalg::default_tolerance(prec);

  for (int i = 0; i < chars.m(); ++i) {
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < nb.eigen.size(); ++j)
      if (nb.eigen[j].character == i) idx.push_back(j);
    if (idx.empty()) continue;
    CharacterBlock b;
    b.character = i;
    b.eigenforms = idx;
    mp::CMatrix fm(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(sturm));
    for (std::size_t r = 0; r < idx.size(); ++r)
      for (std::size_t n = 0; n < sturm; ++n) fm(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(n)) = nb.eigen[idx[r]].a[n];
    b.pivots = numeric_pivots(fm, tol);
    b.to_eigen = mp::CMatrix(fm.rows(), fm.rows());
    for (Eigen::Index r = 0; r < fm.rows(); ++r)
      for (std::size_t k = 0; k < b.pivots.size(); ++k)
        b.to_eigen(r, static_cast<Eigen::Index>(k)) = fm(r, static_cast<Eigen::Index>(b.pivots[k]));
    nb.blocks.push_back(std::move(b));
  }

  const double bound = std::max(coefficient_bound(nb, B), 1048576.0);
  const double lower = 2.0 * bound * bound;
  if (lower > 4e18) throw PrecisionError("classical expansion: coefficient bound exceeds the word-size modulus");
  auto [p1, r1] = admissible_prime(static_cast<std::uint64_t>(lower), chars.m(), nb.ell);
  auto [p2, r2] = admissible_prime(p1, chars.m(), nb.ell);
  auto mod1 = basis_mod_p(s, p1, r1, B);
  auto mod2 = basis_mod_p(s, p2, r2, B);
  nb.prime = p1;
  for (auto& b : nb.blocks) {
    auto f1 = lift_block(mod1, b.character, chars, p1, r1);
    auto f2 = lift_block(mod2, b.character, chars, p2, r2);
    for (std::size_t r = 0; r < f1.size(); ++r)
      for (std::size_t n = 0; n < B; ++n)
        if (f1[r][n].c != f2[r][n].c) throw PrecisionError("classical expansion disagrees between two primes");
    const BlockModP* m1 = nullptr;
    for (const auto& x : mod1)
      if (x.character == b.character) m1 = &x;
    if (m1->pivots != b.pivots) throw PrecisionError("numeric and modular pivots differ");
    b.forms = std::move(f1);
  }
  return nb;
}

std::vector<Cyclo> classical_qexp(const NebentypusBasis& nb, int character, std::size_t row) {
  const CharacterBlock* b = nb.block(character);
  if (!b || row >= b->forms.size()) throw std::invalid_argument("classical_qexp: no such form");
  return b->forms[row];
}

std::vector<std::vector<long>> rational_newforms(const Space& s, long bound) {
  Characters chars(s.level());
  QMatrix pb = PlusSpaceModP::plus_basis(s);
  auto on_plus = [&](const QMatrix& op) { return solve(pb, s.on_homology(op) * pb); };
  QMatrix dg = on_plus(s.diamond(chars.generator()));
  for (std::size_t i = 0; i < dg.rows; ++i) dg(i, i) -= 1;
  QMatrix k0 = kernel(dg);
  std::vector<std::vector<long>> out;
  if (k0.cols == 0) return out;
  auto restrict = [&](long n) { return solve(k0, on_plus(s.hecke(n)) * k0); };
  const long gen = find_hecke_generator(restrict);
  QMatrix t = restrict(gen);
  auto cp = charpoly(t);
  const long range = static_cast<long>(arith::num_divisors(static_cast<arith::u64>(gen)) * std::sqrt(static_cast<double>(gen))) + 1;
  auto is_p = prime_table(static_cast<std::size_t>(bound));
  for (long lam = -range; lam <= range; ++lam) {
    mpq_class val = 0;
    for (std::size_t i = cp.size(); i-- > 0;) val = val * lam + cp[i];
    if (val != 0) continue;
    QMatrix m = t;
    for (std::size_t i = 0; i < m.rows; ++i) m(i, i) -= lam;
    QMatrix v = kernel(m);
    std::size_t idx = 0;
    while (v(idx, 0) == 0) ++idx;
    std::vector<long> a(static_cast<std::size_t>(bound), 0);
    if (bound > 1) a[1] = 1;
    for (long p = 2; p < bound; ++p) {
      if (!is_p[static_cast<std::size_t>(p)]) continue;
      mpq_class ap = (restrict(p) * v)(idx, 0) / v(idx, 0);
      if (ap.get_den() != 1) throw std::logic_error("rational newform with non-integral a_p");
      a[static_cast<std::size_t>(p)] = ap.get_num().get_si();
    }
    fill_multiplicative<long>(
        a, s.level(), [](long) { return 1L; }, [](long x, long y) { return x * y; }, [](long x, long y) { return x - y; },
        [](long e, long p, long x) { return e * p * x; });
    out.push_back(std::move(a));
  }
  std::sort(out.begin(), out.end(), [&](const std::vector<long>& x, const std::vector<long>& y) {
    for (long p = 2; p < bound; ++p)
      if (is_p[static_cast<std::size_t>(p)] && x[static_cast<std::size_t>(p)] != y[static_cast<std::size_t>(p)])
        return x[static_cast<std::size_t>(p)] < y[static_cast<std::size_t>(p)];
    return false;
  });
  return out;
}

std::map<long, long> target_eigenvalues_mod(const Space& s, const TargetForm& f, long bound) {
  const long ell = s.level();
  std::map<long, long> mu;
  std::vector<long> a;
  if (f.kind == FormKind::Weight2) {
    auto forms = rational_newforms(s, bound);
    if (f.index < 0 || static_cast<std::size_t>(f.index) >= forms.size())
      throw ConfigExcluded("no rational newform with index " + std::to_string(f.index) + " at level " + std::to_string(ell));
    a = forms[static_cast<std::size_t>(f.index)];
  } else {
    auto c = level_one_qexp_mod(f.kind, static_cast<std::size_t>(bound), static_cast<std::uint64_t>(ell));
    a.assign(c.begin(), c.end());
  }
  for (auto p : arith::primes_up_to(static_cast<arith::u64>(bound - 1)))
    if (static_cast<long>(p) != ell) mu[static_cast<long>(p)] = ((a[p] % ell) + ell) % ell;
  return mu;
}

EigenSystem eigen_system_mod_l(const Space& s, const TargetForm& f, long test_bound) {
  const int ell = s.level();
  check_target(f, ell);
  EigenSystem es;
  es.ell = ell;
  es.target = f;
  es.mu = target_eigenvalues_mod(s, f, test_bound + 1);
  const int k = f.weight();
  es.eps.assign(static_cast<std::size_t>(ell), 0);
  for (long d = 1; d < ell; ++d)
    es.eps[static_cast<std::size_t>(d)] = static_cast<long>(arith::powmod(static_cast<arith::u64>(d), static_cast<arith::u64>(k - 2), static_cast<arith::u64>(ell)));

  PrimeField fl{static_cast<std::uint64_t>(ell)};
  const std::size_t n = s.homology().cols;
  auto reduce = [&](const QMatrix& m) {
    FpMatrix r(fl, m.rows, m.cols);
    for (std::size_t i = 0; i < m.data.size(); ++i) {
      mpz_class v = m.data[i].get_num() % ell;
      r.data[i] = static_cast<std::uint64_t>((v.get_si() + ell) % ell);
    }
    return r;
  };
  std::vector<FpMatrix> eqs;
  for (auto [p, mu] : es.mu) {
    FpMatrix t = reduce(s.on_homology(s.hecke(p)));
    for (std::size_t i = 0; i < n; ++i) t(i, i) = fl.sub(t(i, i), static_cast<std::uint64_t>(mu));
    eqs.push_back(std::move(t));
  }
  const long g = static_cast<long>(arith::primitive_root(static_cast<arith::u64>(ell)));
  FpMatrix dg = reduce(s.on_homology(s.diamond(g)));
  for (std::size_t i = 0; i < n; ++i) dg(i, i) = fl.sub(dg(i, i), static_cast<std::uint64_t>(es.eps[static_cast<std::size_t>(g)]));
  eqs.push_back(std::move(dg));
  FpMatrix stack(fl, eqs.size() * n, n);
  for (std::size_t e = 0; e < eqs.size(); ++e)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) stack(e * n + i, j) = eqs[e](i, j);
  es.plane = kernel(stack);
  if (es.plane.cols != 2)
    throw Error("weight lowering failed: eigenplane has dimension " + std::to_string(es.plane.cols));
  return es;
}

}  // namespace modgal::newforms
