#include "modgal/jacobian.hpp"

#include <cmath>

#include "modgal/errors.hpp"
#include "modgal/linalg.hpp"

namespace modgal::jacobian {

using mp::CMatrix;
using mp::Complex;
using mp::CVector;
using mp::Real;
using Eigen::Index;

namespace {

// Numerical rank decisions: a value counts as zero below 2^(-prec/2) and as
// nonzero above 2^(-prec/4), relative to the largest.
struct Gap {
  Real lo, hi;
  explicit Gap(mp::Bits prec) : lo(mp::two_pow(prec / 2, prec)), hi(mp::two_pow(prec / 4, prec)) {}
};

mp::Bits prec_of(const CMatrix& m) { return m.size() ? m(0, 0).precision() : 64; }

void check_gap(const std::vector<Real>& d, std::size_t rank, const char* what) {
  if (d.empty() || d[0].is_zero()) {
    if (rank == 0) return;
    throw NonGeneric(std::string(what) + ": zero matrix");
  }
  const Gap gap(d[0].precision());
  if (rank > d.size()) throw NonGeneric(std::string(what) + ": too few conditions");
  if (rank > 0 && d[rank - 1] / d[0] < gap.hi)
    throw RankUnstable(std::string(what) + ": rank below expectation, |R| ratio " + (d[rank - 1] / d[0]).to_string(4));
  if (rank < d.size() && d[rank] / d[0] > gap.lo)
    throw RankUnstable(std::string(what) + ": rank above expectation, |R| ratio " + (d[rank] / d[0]).to_string(4));
}

CMatrix image_of_dim(const CMatrix& a, Index expected, const char* what) {
  auto qr = linalg::colpiv_qr(a, Real::zero(prec_of(a)), true, expected + 1, expected);
  check_gap(qr.r_diag, static_cast<std::size_t>(expected), what);
  return qr.q;
}

// y - U (U^* y) for orthonormal U.
CMatrix project_out(const CMatrix& u, const CMatrix& y) {
  return y - linalg::mul(u, linalg::mul(linalg::adjoint(u), y));
}

CMatrix hadamard_cols(const CVector& w, const CMatrix& y) {
  CMatrix out = y;
  for (Index j = 0; j < y.cols(); ++j)
    for (Index i = 0; i < y.rows(); ++i) out(i, j) = w(i) * y(i, j);
  return out;
}

CVector hadamard(const CVector& a, const CVector& b) {
  CVector out(a.size());
  for (Index i = 0; i < a.size(); ++i) out(i) = a(i) * b(i);
  return out;
}

Complex horner(const Series& s, const Complex& q) {
  Complex acc = Complex::zero(q.precision());
  for (std::size_t n = s.size(); n-- > 0;) {
    acc *= q;
    acc += s[n];
  }
  return acc;
}

}  // namespace

CMatrix kernel_of_dim(const CMatrix& m, Index expected, const char* what) {
  const Index n = m.cols();
  if (expected > n || expected < 0) throw std::invalid_argument(std::string(what) + ": bad kernel dimension");
  if (m.rows() == 0) {
    if (expected != n) throw NonGeneric(std::string(what) + ": too few conditions");
    return linalg::identity(n, prec_of(m));
  }
  auto qr = linalg::colpiv_qr(linalg::adjoint(m), Real::zero(prec_of(m)), true, n - expected + 1);
  check_gap(qr.r_diag, static_cast<std::size_t>(n - expected), what);
  return qr.q.rightCols(expected);
}

std::size_t chart_terms(mp::Bits prec) {
  return static_cast<std::size_t>(std::ceil((static_cast<double>(prec) + 84) * std::log(2.0) / std::log(1 / 0.35))) + 8;
}

Ambient::Ambient(const newforms::NebentypusBasis& nb, const std::vector<newforms::Eigenform>& forms,
                 const Options& opt)
    : ell_(nb.ell), g_(static_cast<int>(forms.size())), prec_(opt.prec), chars_(nb.ell), rng_(opt.seed) {
  const newforms::CharacterBlock* triv = nb.block(0);
  if (g_ == 0 || !triv) throw ConfigExcluded("no weight-2 form of trivial nebentypus at level " + std::to_string(ell_));
  if (triv->to_eigen.size() && triv->to_eigen(0, 0).precision() < prec_)
    throw std::invalid_argument("Ambient: newform basis computed below the working precision");
  const std::size_t T = chart_terms(prec_);
  cusps_ = eisenstein::all_cusps(ell_);
  poles_ = eisenstein::pole_cusps(ell_);

  std::vector<eisenstein::Form> v2;
  for (const auto& f : forms) {
    const std::size_t len = std::max(T, static_cast<std::size_t>(ell_) + 1);
    if (f.a.size() < len) throw PrecisionError("Ambient: newform expansions too short");
    Series a(f.a.begin(), f.a.begin() + static_cast<long>(len));
    for (auto& c : a) c = c.at(prec_);
    v2.push_back(eisenstein::newform_form(chars_, f.character, a, prec_));
  }
  auto e = eisenstein::build_e12_e13(chars_, T, prec_);
  v2.push_back(e.e12);
  v2.push_back(e.e13);

  // f0: the first echelon form of trivial nebentypus.
  const Index d = triv->to_eigen.rows();
  CMatrix inv = linalg::solve(triv->to_eigen, linalg::identity(d, triv->to_eigen(0, 0).precision()));
  std::vector<std::pair<Complex, const eisenstein::Form*>> terms;
  for (Index t = 0; t < d; ++t) terms.emplace_back(inv(0, t).at(prec_), &v2[triv->eigenforms[static_cast<std::size_t>(t)]]);
  const eisenstein::Form f0 = eisenstein::linear_combination(terms);

  v2_.resize(v2.size());
  for (std::size_t k = 0; k < v2.size(); ++k)
    for (const auto& c : cusps_) {
      Series s = eisenstein::expansion_at(chars_, v2[k], c);
      s.resize(std::min(s.size(), T));
      v2_[k].push_back(std::move(s));
    }
  const Real tiny = mp::two_pow(prec_ / 4, prec_);
  for (const auto& c : cusps_) {
    Series s = eisenstein::expansion_at(chars_, f0, c);
    s.resize(std::min(s.size(), T));
    if (mp::abs(s[1]) < tiny) throw NonGeneric("f0 dq/q vanishes at the cusp " + c.label());
    f0_.push_back(std::move(s));
  }

  // Evaluation grid, spread over every chart with 0.05 <= |q| <= 0.3.
  const Index N = 2 * (11 * g_ + 7);
  for (Index i = 0; i < N; ++i) {
    const double u = std::fmod(static_cast<double>(i) * 0.6180339887498949, 1.0);
    const double v = std::fmod(static_cast<double>(i) * 0.4142135623730950 + 0.1, 1.0);
    const double r = 0.05 + 0.25 * u, th = 2 * M_PI * v;
    grid_.push_back({cusps_[static_cast<std::size_t>(i) % cusps_.size()], Complex::from(r * std::cos(th), r * std::sin(th), prec_)});
  }
  const Index m2 = static_cast<Index>(v2_.size());
  CMatrix vals(N, m2), f0vals(N, 1);
  for (Index i = 0; i < N; ++i) {
    const auto& p = grid_[static_cast<std::size_t>(i)];
    for (Index k = 0; k < m2; ++k) vals(i, k) = horner(v2_[static_cast<std::size_t>(k)][cusp_slot(p.cusp)], p.q);
    f0vals(i, 0) = horner(f0_[cusp_slot(p.cusp)], p.q);
  }

  std::vector<std::array<int, 3>> all;
  for (int a = 0; a < m2; ++a)
    for (int b = a; b < m2; ++b)
      for (int c = b; c < m2; ++c) all.push_back({a, b, c});
  CMatrix tg(N, static_cast<Index>(all.size()));
  for (std::size_t t = 0; t < all.size(); ++t)
    for (Index i = 0; i < N; ++i) tg(i, static_cast<Index>(t)) = vals(i, all[t][0]) * vals(i, all[t][1]) * vals(i, all[t][2]);
  const Index dv = 5 * g_ + 4;
  auto qr = linalg::colpiv_qr(tg, Real::zero(prec_), false);
  check_gap(qr.r_diag, static_cast<std::size_t>(dv), "dim H^0(3 D0)");
  CMatrix sel(N, dv);
  for (Index k = 0; k < dv; ++k) {
    triples_.push_back(all[static_cast<std::size_t>(qr.perm[static_cast<std::size_t>(k)])]);
    sel.col(k) = tg.col(qr.perm[static_cast<std::size_t>(k)]);
  }
  vq_ = image_of_dim(sel, dv, "V basis");
  to_triples_ = linalg::solve(linalg::mul(linalg::adjoint(vq_), sel), linalg::identity(dv, prec_));

  CMatrix w0g(N, m2 * (m2 + 1) / 2), hg(N, m2);
  Index col = 0;
  for (Index a = 0; a < m2; ++a) {
    for (Index b = a; b < m2; ++b, ++col)
      for (Index i = 0; i < N; ++i) w0g(i, col) = f0vals(i, 0) * vals(i, a) * vals(i, b);
    for (Index i = 0; i < N; ++i) hg(i, a) = f0vals(i, 0) * f0vals(i, 0) * vals(i, a);
  }
  w0_ = image_in_v(w0g, 3 * g_ + 3, "dim H^0(2 D0)");
  h_ = image_in_v(hg, g_ + 2, "dim H^0(D0)");
}

bool Ambient::is_pole(const Cusp& c) const {
  for (const auto& p : poles_)
    if (p == c) return true;
  return false;
}

std::size_t Ambient::cusp_slot(const Cusp& c) const {
  for (std::size_t k = 0; k < cusps_.size(); ++k)
    if (cusps_[k] == c) return k;
  throw std::invalid_argument("unknown cusp " + c.label());
}

CMatrix Ambient::coords_of_grid(const CMatrix& y) const { return linalg::mul(linalg::adjoint(vq_), y); }

Subspace Ambient::image_in_v(const CMatrix& grid_vectors, Index expected, const char* what) const {
  return {image_of_dim(coords_of_grid(grid_vectors), expected, what)};
}

CMatrix Ambient::grid(const Subspace& W) const { return linalg::mul(vq_, W.c); }

CMatrix Ambient::taylor_v2(const ChartPoint& p, int count) const {
  const Index m2 = static_cast<Index>(v2_.size());
  CMatrix t = linalg::zeros(m2, count, prec_);
  const std::size_t slot = cusp_slot(p.cusp);
  for (Index e = 0; e < m2; ++e) {
    const Series& s = v2_[static_cast<std::size_t>(e)][slot];
    if (p.q.is_zero()) {
      for (int j = 0; j < count && static_cast<std::size_t>(j) < s.size(); ++j) t(e, j) = s[static_cast<std::size_t>(j)];
      continue;
    }
    // Repeated synthetic division by (x - q) gives the Taylor coefficients.
    Series work = s;
    for (int j = 0; j < count && !work.empty(); ++j) {
      Complex acc = Complex::zero(prec_);
      Series quot(work.size() > 1 ? work.size() - 1 : 0, Complex::zero(prec_));
      for (std::size_t n = work.size(); n-- > 0;) {
        acc *= p.q;
        acc += work[n];
        if (n > 0) quot[n - 1] = acc;
      }
      t(e, j) = acc;
      work = std::move(quot);
    }
  }
  return t;
}

int Ambient::condition_base(const ChartPoint& p) const { return p.q.is_zero() && !is_pole(p.cusp) ? 3 : 0; }

CMatrix Ambient::taylor_rows(const ChartPoint& p, int from, int count) const {
  const int K = from + count;
  const CMatrix t = taylor_v2(p, K);
  const Index dv = dim_v();
  CMatrix m = linalg::zeros(count, dv, prec_);
  for (Index i = 0; i < dv; ++i) {
    const auto& tr = triples_[static_cast<std::size_t>(i)];
    std::vector<Complex> ab(static_cast<std::size_t>(K), Complex::zero(prec_));
    for (int x = 0; x < K; ++x)
      for (int y = 0; x + y < K; ++y) ab[static_cast<std::size_t>(x + y)] += t(tr[0], x) * t(tr[1], y);
    for (int k = from; k < K; ++k) {
      Complex s = Complex::zero(prec_);
      for (int x = 0; x <= k; ++x) s += ab[static_cast<std::size_t>(x)] * t(tr[2], k - x);
      m(k - from, i) = s;
    }
  }
  return linalg::mul(m, to_triples_);
}

Subspace Ambient::impose(const Subspace& W, const std::vector<Place>& D, Index expected) const {
  Index rows = 0;
  for (const auto& pl : D) rows += pl.mult;
  CMatrix m(rows, dim_v());
  Index r = 0;
  for (const auto& pl : D) {
    m.middleRows(r, pl.mult) = taylor_rows(pl.point, condition_base(pl.point), pl.mult);
    r += pl.mult;
  }
  const CMatrix k = kernel_of_dim(linalg::mul(m, W.c), expected, "impose");
  return {linalg::mul(W.c, k)};
}

Subspace Ambient::from_places(const std::vector<Place>& D) const {
  Index deg = 0;
  for (const auto& pl : D) deg += pl.mult;
  return impose({linalg::identity(dim_v(), prec_)}, D, dim_v() - deg);
}

CVector Ambient::random_element(const Subspace& W) const {
  std::normal_distribution<double> nd;
  CVector r(W.dim());
  for (Index i = 0; i < W.dim(); ++i) r(i) = Complex::from(nd(rng_), nd(rng_), prec_);
  return linalg::mul(W.c, r);
}

Subspace Ambient::divide(const CVector& s, const Subspace& W, Index expected) const {
  const CVector sg = linalg::mul(vq_, s);
  const CMatrix sv = image_of_dim(hadamard_cols(sg, vq_), dim_v(), "s V");
  const CMatrix wg = grid(W);
  const Index N = grid_size(), dv = dim_v();
  CMatrix stack(N * W.dim(), dv);
  for (Index j = 0; j < W.dim(); ++j) stack.middleRows(j * N, N) = project_out(sv, hadamard_cols(wg.col(j), vq_));
  return {kernel_of_dim(stack, expected, "divide")};
}

Subspace Ambient::addflip(const Subspace& a, const Subspace& b) const {
  const CMatrix ga = grid(a), gb = grid(b);
  const Index N = grid_size(), dv = dim_v();
  // W_D W_D' = H^0(6 D0 - D - D'), from the products with three random
  // elements of either side.
  std::normal_distribution<double> nd;
  auto random_combos = [&](const CMatrix& g) {
    CMatrix r(g.cols(), 3);
    for (Index i = 0; i < r.rows(); ++i)
      for (Index j = 0; j < 3; ++j) r(i, j) = Complex::from(nd(rng_), nd(rng_), prec_);
    return linalg::mul(g, r);
  };
  const CMatrix ra = random_combos(ga), rb = random_combos(gb);
  CMatrix prod(N, 3 * (ga.cols() + gb.cols()));
  Index col = 0;
  for (Index t = 0; t < 3; ++t) {
    for (Index j = 0; j < gb.cols(); ++j, ++col) prod.col(col) = hadamard(ra.col(t), gb.col(j));
    for (Index j = 0; j < ga.cols(); ++j, ++col) prod.col(col) = hadamard(rb.col(t), ga.col(j));
  }
  const CMatrix u = image_of_dim(prod, 7 * g_ + 5, "W_D W_D'");

  // H^0(3 D0 - D - D') = {v : v r ∈ U} for three random r in V; W0 would
  // not do when D or D' meets the support of D0.
  const CMatrix rv = random_combos(vq_);
  CMatrix stack(N * 3, dv);
  for (Index j = 0; j < 3; ++j) stack.middleRows(j * N, N) = project_out(u, hadamard_cols(rv.col(j), vq_));
  const Subspace S{kernel_of_dim(stack, g_ + 2, "H^0(3 D0 - D - D')")};

  return divide(random_element(S), S, 3 * g_ + 3);
}

Subspace Ambient::scalar_mul(long n, const Subspace& a) const {
  if (n < 0) return negate(scalar_mul(-n, a));
  if (n == 0) return w0_;
  Subspace acc = a;
  bool started = false;
  for (int bit = 62; bit >= 0; --bit) {
    if (started) acc = add(acc, acc);
    if ((n >> bit) & 1) {
      if (started) acc = add(acc, a);
      started = true;
    }
  }
  return acc;
}

bool Ambient::is_zero(const Subspace& a) const {
  CMatrix m(dim_v(), a.dim() + h_.dim());
  m << a.c, h_.c;
  auto qr = linalg::colpiv_qr(m, Real::zero(prec_), false);
  const Gap gap(prec_);
  const Real r = qr.r_diag.back() / qr.r_diag.front();
  if (r < gap.lo) return true;
  if (r > gap.hi) return false;
  throw RankUnstable("zero test undecided: ratio " + r.to_string(4));
}

}  // namespace modgal::jacobian
