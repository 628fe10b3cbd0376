#include "modgal/modsym.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "modgal/errors.hpp"
#include "modgal/zlinalg.hpp"

namespace modgal::modsym {

std::vector<Mat2> heilbronn_cremona(long p) {
  if (p == 2) return {{1, 0, 0, 2}, {2, 0, 0, 1}, {2, 1, 0, 1}, {1, 0, 1, 2}};
  std::vector<Mat2> out{{1, 0, 0, p}};
  for (long r = -(p - 1) / 2; r <= (p - 1) / 2; ++r) {
    long x1 = p, x2 = -r, y1 = 0, y2 = 1, a = -p, b = r;
    out.push_back({x1, x2, y1, y2});
    while (b != 0) {
      long q = std::lround(static_cast<double>(a) / static_cast<double>(b));
      long c = a - b * q;
      a = -b;
      b = c;
      long x3 = q * x2 - x1;
      x1 = x2;
      x2 = x3;
      long y3 = q * y2 - y1;
      y1 = y2;
      y2 = y3;
      out.push_back({x1, x2, y1, y2});
    }
  }
  return out;
}

std::vector<Mat2> heilbronn_merel(long n) {
  std::vector<Mat2> out;
  for (long a = 1; a <= n; ++a)
    for (long d = 1; d <= n; ++d) {
      long bc = a * d - n;
      if (bc < 0) continue;
      if (bc == 0) {
        for (long c = 0; c < d; ++c) out.push_back({a, 0, c, d});
        for (long b = 1; b < a; ++b) out.push_back({a, b, 0, d});
        continue;
      }
      for (long c = 1; c < d; ++c)
        if (bc % c == 0 && bc / c < a) out.push_back({a, bc / c, c, d});
    }
  return out;
}

namespace {

long mod(long x, long m) { return ((x % m) + m) % m; }

// Divides a by b exactly (both over Q, lowest coefficient first).
std::vector<mpq_class> poly_divexact(std::vector<mpq_class> a, const std::vector<mpq_class>& b) {
  const long na = static_cast<long>(a.size()), nb = static_cast<long>(b.size());
  std::vector<mpq_class> q(static_cast<std::size_t>(na - nb + 1), 0);
  for (long i = na - 1; i >= nb - 1; --i) {
    mpq_class t = a[static_cast<std::size_t>(i)] / b.back();
    q[static_cast<std::size_t>(i - nb + 1)] = t;
    for (long j = 0; j < nb; ++j) a[static_cast<std::size_t>(i - nb + 1 + j)] -= t * b[static_cast<std::size_t>(j)];
  }
  for (const auto& r : a)
    if (r != 0) throw std::logic_error("poly_divexact: nonzero remainder");
  return q;
}

QMatrix poly_at(const std::vector<mpq_class>& c, const QMatrix& a) { return poly_of_matrix(c, a); }

zlinalg::ZMatrix to_z(const QMatrix& m) {
  zlinalg::ZMatrix z(m.rows, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) {
      if (m(i, j).get_den() != 1) throw std::logic_error("to_z: non-integral entry");
      z(i, j) = m(i, j).get_num();
    }
  return z;
}

QMatrix to_q(const zlinalg::ZMatrix& z) {
  QMatrix m(RationalField{}, z.rows, z.cols);
  for (std::size_t i = 0; i < z.rows; ++i)
    for (std::size_t j = 0; j < z.cols; ++j) m(i, j) = z(i, j);
  return m;
}

}  // namespace

Space::Space(int ell) : ell_(ell) {
  if (ell < 11 || !arith::is_prime(static_cast<arith::u64>(ell))) throw BadPrime("level must be a prime >= 11");
  genus_ = arith::genus_x1(ell);
  const long l = ell;
  const std::size_t nsym = static_cast<std::size_t>(l * l);
  sym_class_.assign(nsym, -1);
  sym_sign_.assign(nsym, 0);

  // Two-term relations: x = -x (weight 2) and x + x sigma = 0.
  std::vector<std::size_t> class_rep;
  for (long c = 0; c < l; ++c)
    for (long d = 0; d < l; ++d) {
      if (c == 0 && d == 0) continue;
      std::size_t i = index(c, d);
      if (sym_class_[i] >= 0) continue;
      int k = static_cast<int>(class_rep.size());
      class_rep.push_back(i);
      for (auto [cc, dd, s] : {std::tuple{c, d, 1}, std::tuple{-c, -d, 1}, std::tuple{d, -c, -1}, std::tuple{-d, c, -1}}) {
        std::size_t j = index(cc, dd);
        sym_class_[j] = k;
        sym_sign_[j] = s;
      }
    }
  const std::size_t ncls = class_rep.size();

  // Three-term relations x + x tau + x tau^2 = 0, one per orbit of <tau, -I>.
  std::vector<bool> seen(nsym, false);
  std::vector<std::vector<std::pair<int, int>>> rels;
  for (long c = 0; c < l; ++c)
    for (long d = 0; d < l; ++d) {
      if ((c == 0 && d == 0) || seen[index(c, d)]) continue;
      std::pair<long, long> orbit[3] = {{c, d}, {d, -c - d}, {-c - d, c}};
      std::vector<std::pair<int, int>> rel;
      for (auto [x, y] : orbit) {
        seen[index(x, y)] = true;
        seen[index(-x, -y)] = true;
        rel.push_back({sym_class_[index(x, y)], sym_sign_[index(x, y)]});
      }
      rels.push_back(rel);
    }
  QMatrix r(RationalField{}, rels.size(), ncls);
  for (std::size_t i = 0; i < rels.size(); ++i)
    for (auto [k, s] : rels[i]) r(i, static_cast<std::size_t>(k)) += s;
  auto piv = rref(r);
  std::vector<int> free_index(ncls, -1), piv_row(ncls, -1);
  for (std::size_t i = 0; i < piv.size(); ++i) piv_row[piv[i]] = static_cast<int>(i);
  for (std::size_t k = 0; k < ncls; ++k)
    if (piv_row[k] < 0) {
      free_index[k] = static_cast<int>(basis_rep_.size());
      basis_rep_.push_back(class_rep[k]);
    }
  class_coords_.resize(ncls);
  for (std::size_t k = 0; k < ncls; ++k) {
    if (free_index[k] >= 0) {
      class_coords_[k] = {{free_index[k], mpq_class(1)}};
      continue;
    }
    const auto row = static_cast<std::size_t>(piv_row[k]);
    for (std::size_t f = 0; f < ncls; ++f)
      if (free_index[f] >= 0 && r(row, f) != 0) class_coords_[k].push_back({free_index[f], -r(row, f)});
  }

  // Cuspidal subspace and integral homology.
  QMatrix bd = boundary();
  cuspidal_ = kernel(bd);
  if (cuspidal_.cols != static_cast<std::size_t>(2 * genus_))
    throw std::logic_error("modular symbols: cuspidal dimension mismatch");

  // L = Z-span of all Manin symbols, in M coordinates (rows).
  const std::size_t n = dim();
  mpz_class den = 1;
  for (const auto& cc : class_coords_)
    for (const auto& [k, v] : cc) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), v.get_den_mpz_t());
  zlinalg::ZMatrix gens(ncls, n);
  for (std::size_t k = 0; k < ncls; ++k)
    for (const auto& [j, v] : class_coords_[k]) gens(k, static_cast<std::size_t>(j)) = mpq_class(v * den).get_num();
  zlinalg::ZMatrix lat = zlinalg::hnf_rows(gens);
  if (lat.rows != n) throw std::logic_error("modular symbols: lattice rank mismatch");
  QMatrix lt(RationalField{}, n, n);  // columns are the lattice basis
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) lt(j, i) = mpq_class(lat(i, j), den);
  for (auto& x : lt.data) x.canonicalize();
  QMatrix bd_l = bd * lt;
  zlinalg::ZMatrix ker = zlinalg::kernel(to_z(bd_l));
  homology_ = lt * to_q(ker);
  if (homology_.cols != static_cast<std::size_t>(2 * genus_))
    throw std::logic_error("modular symbols: homology rank mismatch");
}

std::pair<long, long> Space::basis_symbol(std::size_t k) const {
  std::size_t i = basis_rep_[k];
  return {static_cast<long>(i) / ell_, static_cast<long>(i) % ell_};
}

SparseQ Space::symbol(long c, long d) const {
  std::size_t i = index(c, d);
  if (i == 0) throw std::invalid_argument("Manin symbol (0, 0)");
  SparseQ out = class_coords_[static_cast<std::size_t>(sym_class_[i])];
  if (sym_sign_[i] < 0)
    for (auto& e : out) e.second = -e.second;
  return out;
}

QMatrix Space::symbol_vector(long c, long d) const {
  QMatrix v(RationalField{}, dim(), 1);
  for (const auto& [k, x] : symbol(c, d)) v(static_cast<std::size_t>(k), 0) += x;
  return v;
}

void Space::add_image(std::vector<mpq_class>& acc, long c, long d, const mpq_class& coef) const {
  std::size_t i = index(c, d);
  if (i == 0) return;
  const auto& cc = class_coords_[static_cast<std::size_t>(sym_class_[i])];
  if (sym_sign_[i] > 0) {
    for (const auto& [k, x] : cc) acc[static_cast<std::size_t>(k)] += coef * x;
  } else {
    for (const auto& [k, x] : cc) acc[static_cast<std::size_t>(k)] -= coef * x;
  }
}

QMatrix Space::inf_to(const mpz_class& a, const mpz_class& b) const {
  QMatrix v(RationalField{}, dim(), 1);
  if (b == 0) return v;  // {oo, oo}
  std::vector<mpq_class> acc(dim(), 0);
  // Convergents p_k/q_k; {p_{k-1}/q_{k-1}, p_k/q_k} is the Manin symbol
  // ((-1)^(k-1) q_k, q_{k-1}).
  mpz_class num = a, den = b;
  mpz_class q_cur;
  mpz_class qm2 = 1, qm1 = 0;       // q_{-2}, q_{-1}
  const mpz_class L = ell_;
  for (int k = 0;; ++k) {
    mpz_class t;
    mpz_fdiv_q(t.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    q_cur = t * qm1 + qm2;
    mpz_class c = (k % 2 == 0 ? mpz_class(-q_cur) : q_cur);
    mpz_class cm, dm;
    mpz_fdiv_r(cm.get_mpz_t(), c.get_mpz_t(), L.get_mpz_t());
    mpz_fdiv_r(dm.get_mpz_t(), qm1.get_mpz_t(), L.get_mpz_t());
    add_image(acc, cm.get_si(), dm.get_si(), 1);
    qm2 = qm1;
    qm1 = q_cur;
    mpz_class rem = num - t * den;
    if (rem == 0) break;
    num = den;
    den = rem;
  }
  for (std::size_t k = 0; k < dim(); ++k) v(k, 0) = acc[k];
  return v;
}

QMatrix Space::hecke(long n) const {
  if (n < 1) throw std::invalid_argument("hecke: n must be positive");
  if (n == 1) return QMatrix::identity(RationalField{}, dim());
  auto fac = arith::factor(static_cast<arith::u64>(n));
  if (fac.size() > 1) {
    QMatrix t = QMatrix::identity(RationalField{}, dim());
    for (auto [p, e] : fac) {
      long pe = 1;
      for (int i = 0; i < e; ++i) pe *= static_cast<long>(p);
      t = t * hecke(pe);
    }
    return t;
  }
  const long p = static_cast<long>(fac[0].first);
  const int e = fac[0].second;
  if (e > 1) {
    if (p == ell_) {
      QMatrix u = hecke(p), t = u;
      for (int i = 1; i < e; ++i) t = t * u;
      return t;
    }
    // T_{p^{k+1}} = T_p T_{p^k} - p <p> T_{p^{k-1}}
    QMatrix tp = hecke(p), dp = scaled(diamond(p), mpq_class(p));
    QMatrix prev = QMatrix::identity(RationalField{}, dim()), cur = tp;
    for (int i = 1; i < e; ++i) {
      QMatrix next = tp * cur - dp * prev;
      prev = cur;
      cur = next;
    }
    return cur;
  }
  const auto mats = p == ell_ ? heilbronn_merel(p) : heilbronn_cremona(p);
  QMatrix t(RationalField{}, dim(), dim());
  std::vector<mpq_class> acc(dim());
  for (std::size_t k = 0; k < dim(); ++k) {
    std::fill(acc.begin(), acc.end(), mpq_class(0));
    auto [u, v] = basis_symbol(k);
    for (const auto& h : mats) add_image(acc, mod(u * h.a + v * h.c, ell_), mod(u * h.b + v * h.d, ell_), 1);
    for (std::size_t i = 0; i < dim(); ++i) t(i, k) = acc[i];
  }
  return t;
}

QMatrix Space::diamond(long d) const {
  if (mod(d, ell_) == 0) throw std::invalid_argument("diamond: d must be a unit");
  QMatrix t(RationalField{}, dim(), dim());
  for (std::size_t k = 0; k < dim(); ++k) {
    auto [u, v] = basis_symbol(k);
    for (const auto& [i, x] : symbol(d * u, d * v)) t(static_cast<std::size_t>(i), k) += x;
  }
  return t;
}

QMatrix Space::star() const {
  QMatrix t(RationalField{}, dim(), dim());
  for (std::size_t k = 0; k < dim(); ++k) {
    auto [u, v] = basis_symbol(k);
    for (const auto& [i, x] : symbol(-u, v)) t(static_cast<std::size_t>(i), k) += x;
  }
  return t;
}

int Space::cusp_index(long u, long v) const {
  const long h = (ell_ - 1) / 2;
  long vv = mod(v, ell_);
  if (vv != 0) return static_cast<int>(std::min(vv, ell_ - vv) - 1);
  long uu = mod(u, ell_);
  if (uu == 0) throw std::invalid_argument("cusp_index: (0, 0)");
  return static_cast<int>(h + std::min(uu, ell_ - uu) - 1);
}

QMatrix Space::boundary() const {
  QMatrix b(RationalField{}, num_cusps(), dim());
  for (std::size_t k = 0; k < dim(); ++k) {
    auto [c, d] = basis_symbol(k);
    // delta(g{0, oo}) = [a/c] - [b/d]
    long a = c == 0 ? static_cast<long>(arith::invmod(static_cast<arith::u64>(d), static_cast<arith::u64>(ell_))) : 1;
    long bb = d == 0 ? mod(-static_cast<long>(arith::invmod(static_cast<arith::u64>(c), static_cast<arith::u64>(ell_))), ell_) : 1;
    b(static_cast<std::size_t>(cusp_index(a, c)), k) += 1;
    b(static_cast<std::size_t>(cusp_index(bb, d)), k) -= 1;
  }
  return b;
}

QMatrix Space::on_homology(const QMatrix& op) const { return solve(homology_, op * homology_); }

QMatrix Space::homology_coords(const QMatrix& x) const { return solve(homology_, x); }

const QMatrix& Space::cuspidal_projector() const {
  if (projector_.rows) return projector_;
  // Split off the Eisenstein part with T_p for p >= 7, where the Eisenstein
  // eigenvalues exceed the Ramanujan bound.
  for (long p = 7;; p = static_cast<long>(arith::next_prime(static_cast<arith::u64>(p)))) {
    if (p == ell_) continue;
    QMatrix t = hecke(p);
    auto cm = charpoly(t);
    auto cs = charpoly(solve(cuspidal_, t * cuspidal_));
    auto ce = poly_divexact(cm, cs);
    if (poly_gcd(RationalField{}, cs, ce).size() != 1) continue;
    QMatrix e = kernel(poly_at(ce, t));
    const std::size_t n = dim(), s = cuspidal_.cols;
    QMatrix basis(RationalField{}, n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < s; ++j) basis(i, j) = cuspidal_(i, j);
      for (std::size_t j = 0; j < e.cols; ++j) basis(i, s + j) = e(i, j);
    }
    QMatrix inv = inverse(basis);
    QMatrix top(RationalField{}, s, n);
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t j = 0; j < n; ++j) top(i, j) = inv(i, j);
    projector_ = cuspidal_ * top;
    return projector_;
  }
}

QMatrix PlusSpaceModP::plus_basis(const Space& space) {
  QMatrix st = space.on_homology(space.star());
  for (std::size_t i = 0; i < st.rows; ++i) st(i, i) -= 1;
  return to_q(zlinalg::kernel(to_z(st)));
}

PlusSpaceModP::PlusSpaceModP(const Space& space, std::uint64_t P) : space_(&space), P_(P) {
  PrimeField f{P};
  QMatrix b = space.homology() * plus_basis(space);
  basis_ = FpMatrix(f, b.rows, b.cols);
  const mpz_class pz(static_cast<unsigned long>(P));
  auto red = [&](const mpq_class& x) -> std::uint64_t {
    mpz_class num = x.get_num() % pz, den = x.get_den() % pz;
    if (num < 0) num += pz;
    if (den == 0) throw BadPrime("prime divides a modular-symbol denominator");
    return f.div(num.get_ui(), den.get_ui());
  };
  for (std::size_t i = 0; i < b.data.size(); ++i) basis_.data[i] = red(b.data[i]);
  // Left inverse on the span: pivot rows of the basis.
  FpMatrix bt = basis_.transpose();
  auto piv = rref(bt);
  if (piv.size() != basis_.cols) throw BadPrime("plus space does not reduce to full rank");
  const std::size_t g = basis_.cols;
  FpMatrix sub(f, g, g);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j) sub(i, j) = basis_(piv[i], j);
  FpMatrix subinv = inverse(sub);
  const auto& cc = space.class_coords();
  psi_.assign(cc.size(), std::vector<std::uint64_t>(g, 0));
  std::vector<int> piv_slot(space.dim(), -1);
  for (std::size_t i = 0; i < g; ++i) piv_slot[piv[i]] = static_cast<int>(i);
  for (std::size_t k = 0; k < cc.size(); ++k) {
    std::vector<std::uint64_t> x(g, 0);
    for (const auto& [j, v] : cc[k]) {
      int s = piv_slot[static_cast<std::size_t>(j)];
      if (s >= 0) x[static_cast<std::size_t>(s)] = f.add(x[static_cast<std::size_t>(s)], red(v));
    }
    for (std::size_t r = 0; r < g; ++r) {
      std::uint64_t acc = 0;
      for (std::size_t s = 0; s < g; ++s) acc = f.add(acc, f.mul(subinv(r, s), x[s]));
      psi_[k][r] = acc;
    }
  }
}

FpMatrix PlusSpaceModP::apply(const std::vector<Mat2>& mats) const {
  PrimeField f{P_};
  const std::size_t g = dim(), n = space_->dim();
  const long l = space_->level();
  FpMatrix out(f, g, g);
  std::vector<std::uint64_t> a(g);
  for (std::size_t k = 0; k < n; ++k) {
    bool used = false;
    for (std::size_t j = 0; j < g; ++j) used = used || basis_(k, j) != 0;
    if (!used) continue;
    std::fill(a.begin(), a.end(), 0);
    auto [u, v] = space_->basis_symbol(k);
    for (const auto& h : mats) {
      long c = mod(u * h.a + v * h.c, l), d = mod(u * h.b + v * h.d, l);
      if (c == 0 && d == 0) continue;
      const auto& ps = psi_[static_cast<std::size_t>(space_->symbol_class(c, d))];
      if (space_->symbol_sign(c, d) > 0) {
        for (std::size_t r = 0; r < g; ++r) a[r] = f.add(a[r], ps[r]);
      } else {
        for (std::size_t r = 0; r < g; ++r) a[r] = f.sub(a[r], ps[r]);
      }
    }
    for (std::size_t j = 0; j < g; ++j) {
      if (basis_(k, j) == 0) continue;
      for (std::size_t r = 0; r < g; ++r) out(r, j) = f.add(out(r, j), f.mul(basis_(k, j), a[r]));
    }
  }
  return out;
}

FpMatrix PlusSpaceModP::hecke_prime(long p) const {
  return apply(p == space_->level() ? heilbronn_merel(p) : heilbronn_cremona(p));
}

FpMatrix PlusSpaceModP::diamond(long d) const { return apply({{d, 0, 0, d}}); }

std::vector<FpMatrix> PlusSpaceModP::hecke_all(std::size_t bound) const {
  PrimeField f{P_};
  const long l = space_->level();
  std::vector<FpMatrix> t(std::max<std::size_t>(bound, 2));
  t[1] = FpMatrix::identity(f, dim());
  std::vector<std::size_t> spf(bound, 0);
  for (std::size_t i = 2; i < bound; ++i)
    if (!spf[i])
      for (std::size_t j = i; j < bound; j += i)
        if (!spf[j]) spf[j] = i;
  for (std::size_t n = 2; n < bound; ++n) {
    const std::size_t p = spf[n];
    std::size_t m = n, pk = 1;
    while (m % p == 0) {
      m /= p;
      pk *= p;
    }
    if (m > 1) {
      t[n] = t[pk] * t[m];
      continue;
    }
    if (pk == p) {
      t[n] = hecke_prime(static_cast<long>(p));
      continue;
    }
    if (static_cast<long>(p) == l) {
      t[n] = t[p] * t[n / p];
      continue;
    }
    FpMatrix dp = scaled(diamond(static_cast<long>(p)), f.from_int(static_cast<long>(p)));
    t[n] = t[p] * t[n / p] - dp * t[n / p / p];
  }
  return t;
}

}  // namespace modgal::modsym
