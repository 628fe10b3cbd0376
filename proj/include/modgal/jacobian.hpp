#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "modgal/eisenstein.hpp"
#include "modgal/mp.hpp"
#include "modgal/newforms.hpp"

namespace modgal::jacobian {

using eisenstein::Cusp;
using eisenstein::Series;

// A point of X_1(ell) in the chart of a cusp; q = 0 is the cusp itself.
struct ChartPoint {
  Cusp cusp;
  mp::Complex q;
};

struct Place {
  ChartPoint point;
  int mult = 1;
};

// A subspace of V = H^0(3 D0), orthonormal coordinates (dim V x k).
struct Subspace {
  mp::CMatrix c;
  Eigen::Index dim() const { return c.cols(); }
};

struct Options {
  mp::Bits prec = 512;
  std::uint64_t seed = 1;
};

// Chart expansion length giving 2^(-prec) for |q| <= 0.35.
std::size_t chart_terms(mp::Bits prec);

// The ambient data of the Khuri-Makdisi representation on X_1(ell):
// V2 = S_2(Gamma_1(ell)) + <e12, e13> (differentials with simple poles at
// the cusps c1, c2, c3), D0 = div(f0) + c1 + c2 + c3 with f0 of trivial
// nebentypus, V = V2^3 = H^0(3 D0) and W_D = H^0(3 D0 - D) for effective D of
// degree d0 = 2g + 1 standing for the class of D - D0.
class Ambient {
 public:
  // forms: the newforms of nb.eigen with at least chart_terms(prec) + ell
  // coefficients.
  Ambient(const newforms::NebentypusBasis& nb, const std::vector<newforms::Eigenform>& forms, const Options& opt);

  int ell() const { return ell_; }
  int genus() const { return g_; }
  int d0() const { return 2 * g_ + 1; }
  mp::Bits precision() const { return prec_; }
  Eigen::Index dim_v() const { return vq_.cols(); }
  Eigen::Index grid_size() const { return vq_.rows(); }
  const std::vector<Cusp>& cusps() const { return cusps_; }
  const std::vector<Cusp>& poles() const { return poles_; }
  bool is_pole(const Cusp& c) const;
  std::size_t cusp_slot(const Cusp& c) const;

  // Chart expansion of V2 element e (newforms first, then e12, e13) and of f0.
  const Series& v2(std::size_t e, const Cusp& c) const { return v2_[e][cusp_slot(c)]; }
  const Series& f0(const Cusp& c) const { return f0_[cusp_slot(c)]; }

  // Rows (count x dim V) mapping coordinates to the Taylor coefficients
  // from..from+count-1 of the weight-6 chart expansion at the point.
  mp::CMatrix taylor_rows(const ChartPoint& p, int from, int count) const;
  // Index of the first Taylor coefficient that a vanishing condition at p
  // constrains: 3 at cusps outside c1, c2, c3, otherwise 0.
  int condition_base(const ChartPoint& p) const;

  Subspace w0() const { return w0_; }
  // W_D for D = sum of places (degree d0 for a class representative).
  Subspace from_places(const std::vector<Place>& D) const;
  // Subspace of W cut out by vanishing at the places.
  Subspace impose(const Subspace& W, const std::vector<Place>& D, Eigen::Index expected) const;

  // W_{D''} with D'' ~ 3 D0 - D - D', i.e. [D''] = -[D] - [D'].
  Subspace addflip(const Subspace& a, const Subspace& b) const;
  Subspace negate(const Subspace& a) const { return addflip(a, w0_); }
  Subspace add(const Subspace& a, const Subspace& b) const { return negate(addflip(a, b)); }
  Subspace sub(const Subspace& a, const Subspace& b) const { return addflip(negate(a), b); }
  Subspace chord(const Subspace& a) const { return addflip(a, a); }  // -2[D]
  Subspace scalar_mul(long n, const Subspace& a) const;
  bool is_zero(const Subspace& a) const;
  bool same_class(const Subspace& a, const Subspace& b) const { return is_zero(sub(a, b)); }

  // {v in V : v W ⊂ s V} for an element s (coordinates) and a subspace W.
  Subspace divide(const mp::CVector& s, const Subspace& W, Eigen::Index expected) const;
  mp::CVector random_element(const Subspace& W) const;

  // Grid values of the elements of W (grid x k).
  mp::CMatrix grid(const Subspace& W) const;

 private:
  mp::CMatrix taylor_v2(const ChartPoint& p, int count) const;  // (g+2) x count
  mp::CMatrix coords_of_grid(const mp::CMatrix& y) const;
  Subspace image_in_v(const mp::CMatrix& grid_vectors, Eigen::Index expected, const char* what) const;

  int ell_ = 0, g_ = 0;
  mp::Bits prec_ = 0;
  newforms::Characters chars_;
  std::vector<Cusp> cusps_, poles_;
  std::vector<std::vector<Series>> v2_;  // [element][cusp]
  std::vector<Series> f0_;
  std::vector<ChartPoint> grid_;
  std::vector<std::array<int, 3>> triples_;  // V basis before orthonormalisation
  mp::CMatrix vq_;                           // grid x dim V, orthonormal columns
  mp::CMatrix to_triples_;                   // orthonormal coordinates -> triple coordinates
  Subspace w0_, h_;                          // H^0(2 D0) = f0 V2 V2, H^0(D0) = f0^2 V2
  mutable std::mt19937_64 rng_;
};

// Kernel of m of the expected dimension (orthonormal columns), with a
// singular-value gap check: RankUnstable if the gap is not clean.
mp::CMatrix kernel_of_dim(const mp::CMatrix& m, Eigen::Index expected, const char* what);

}  // namespace modgal::jacobian
