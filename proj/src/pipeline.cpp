#include "modgal/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include "modgal/arith.hpp"
#include "modgal/errors.hpp"
#include "modgal/linalg.hpp"
#include "modgal/modsym.hpp"
#include "modgal/newforms.hpp"
#include "modgal/periods.hpp"
#include "modgal/polyroots.hpp"
#include "modgal/qexpansion.hpp"

namespace modgal::pipeline {

namespace fs = std::filesystem;
using mp::Complex;
using mp::Real;

namespace {

std::string file_form(const TargetForm& f) {
  std::string s = f.name();
  std::replace(s.begin(), s.end(), ':', '_');
  return s;
}

void expect(std::istream& is, const std::string& word, const char* what) {
  std::string w;
  if (!(is >> w) || w != word) throw Error(std::string(what) + ": expected '" + word + "'");
}

template <class T>
T read_value(std::istream& is, const char* what) {
  T v;
  if (!(is >> v)) throw Error(std::string(what) + ": truncated");
  return v;
}

void write_matrix(std::ostream& os, const mp::CMatrix& m) {
  os << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << mp::to_hex(m(i, j).real()) << ' ' << mp::to_hex(m(i, j).imag()) << '\n';
}

mp::CMatrix read_matrix(std::istream& is, mp::Bits prec, const char* what) {
  const auto r = read_value<Eigen::Index>(is, what), c = read_value<Eigen::Index>(is, what);
  mp::CMatrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) {
      const auto re = read_value<std::string>(is, what), im = read_value<std::string>(is, what);
      m(i, j) = Complex(mp::from_hex(re, prec), mp::from_hex(im, prec));
    }
  return m;
}

template <class F>
void write_atomic(const std::string& path, F&& body) {
  fs::create_directories(fs::path(path).parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp);
    if (!os) throw Error("cannot write " + tmp);
    body(os);
    if (!os) throw Error("write failed: " + tmp);
  }
  fs::rename(tmp, path);
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("missing artifact " + path);
  return is;
}

// Everything up to the newforms, rebuilt from the expansion artifact.
struct Context {
  std::unique_ptr<modsym::Space> s;
  newforms::NebentypusBasis nb;
  periods::WindingDecomposition wd;
  std::vector<newforms::Eigenform> forms;
};

Context context(const Config& cfg, const qexp::Expansion* ex) {
  Context c;
  c.s = std::make_unique<modsym::Space>(cfg.ell);
  c.nb = newforms::nebentypus_bases(*c.s, 64, cfg.prec + 64);
  c.wd = periods::winding_decomposition(*c.s, periods::default_twists(cfg.ell));
  if (ex)
    for (std::size_t j = 0; j < c.nb.eigen.size(); ++j)
      c.forms.push_back({c.nb.eigen[j].character, ex->eigenform(c.nb, j, cfg.prec + 64)});
  return c;
}

qexp::Expansion load_qexp(const Config& cfg) {
  auto is = open_in(artifact_path(cfg, Stage::Qexp));
  return qexp::read_cache(is);
}

void stage_qexp(const Config& cfg, const std::string& path) {
  modsym::Space s(cfg.ell);
  const auto ex = qexp::expand_all(s, std::max(cfg.B, required_terms(cfg)));
  write_atomic(path, [&](std::ostream& os) { qexp::write_cache(os, ex); });
}

void stage_periods(const Config& cfg, const std::string& path) {
  const auto ex = load_qexp(cfg);
  const Context c = context(cfg, &ex);
  const auto L = periods::period_lattice(*c.s, c.forms, c.wd, cfg.prec);
  write_atomic(path, [&](std::ostream& os) { periods::write_lattice(os, L); });
}

periods::PeriodLattice load_lattice(const Config& cfg) {
  auto is = open_in(artifact_path(cfg, Stage::Periods));
  return periods::read_lattice(is);
}

void stage_torsion(const Config& cfg, const std::string& path) {
  const auto ex = load_qexp(cfg);
  const auto L = load_lattice(cfg);
  const Context c = context(cfg, &ex);
  const jacobian::Ambient A(c.nb, c.forms, {cfg.prec, cfg.seed});
  const auto es = newforms::eigen_system_mod_l(*c.s, cfg.form);
  TorsionArtifact t{cfg.form.name(), cfg.ell, cfg.prec, {}};
  t.plane = torsion::torsion_rep(A, L, periods::eigenplane_points(L, es.plane));
  write_atomic(path, [&](std::ostream& os) { write_torsion(os, t); });
}

void stage_poly(const Config& cfg, const std::string& path) {
  const auto ex = load_qexp(cfg);
  auto is = open_in(artifact_path(cfg, Stage::Torsion));
  const TorsionArtifact t = read_torsion(is);
  const Context c = context(cfg, &ex);
  const jacobian::Ambient A(c.nb, c.forms, {cfg.prec, cfg.seed});
  const auto st = evaluation::choose_setup(A);
  PolyArtifact p{cfg.form.name(), cfg.ell, cfg.prec, {}, evaluation::enumerate_plane(A, t.plane, st, true)};
  std::vector<Complex> roots;
  for (const auto& pt : p.roots) roots.push_back(pt.alpha);
  p.F = evaluation::recognize(evaluation::poly_from_roots(roots));
  if (evaluation::squarefree_primes(p.F, 5) != 5) throw PrecisionError("F is not squarefree");
  write_atomic(path, [&](std::ostream& os) { write_poly(os, p); });
}

void stage_resolvents(const Config& cfg, const std::string& path) {
  auto is = open_in(artifact_path(cfg, Stage::Poly));
  const PolyArtifact p = read_poly(is);
  ResolventArtifact a{cfg.form.name(), cfg.ell, cfg.form.weight(), cfg.prec, resolvents_from_poly(p)};
  write_atomic(path, [&](std::ostream& os) { write_resolvents(os, a); });
}

}  // namespace

Stage parse_stage(const std::string& s) {
  if (s == "qexp") return Stage::Qexp;
  if (s == "periods") return Stage::Periods;
  if (s == "torsion") return Stage::Torsion;
  if (s == "poly") return Stage::Poly;
  if (s == "resolvents") return Stage::Resolvents;
  throw std::invalid_argument("unknown stage " + s);
}

std::string stage_name(Stage s) {
  switch (s) {
    case Stage::Qexp:
      return "qexp";
    case Stage::Periods:
      return "periods";
    case Stage::Torsion:
      return "torsion";
    case Stage::Poly:
      return "poly";
    case Stage::Resolvents:
      return "resolvents";
  }
  return "";
}

std::size_t required_terms(const Config& cfg) {
  modsym::Space s(cfg.ell);
  const auto wd = periods::winding_decomposition(s, periods::default_twists(cfg.ell));
  std::size_t n = jacobian::chart_terms(cfg.prec) + static_cast<std::size_t>(cfg.ell) + 2;
  for (long p : wd.twists_used()) n = std::max(n, periods::terms_needed(cfg.ell, p, cfg.prec + 64) + 2);
  return n;
}

std::string artifact_path(const Config& cfg, Stage s) {
  const std::string l = "l" + std::to_string(cfg.ell), p = "p" + std::to_string(cfg.prec);
  std::string name;
  switch (s) {
    case Stage::Qexp:
      name = "qexp-" + l + "-B" + std::to_string(std::max(cfg.B, required_terms(cfg)));
      break;
    case Stage::Periods:
      name = "periods-" + l + "-" + p;
      break;
    default:
      name = stage_name(s) + "-" + file_form(cfg.form) + "-" + l + "-" + p;
  }
  return (fs::path(cfg.cache) / (name + ".txt")).string();
}

namespace {

// The stage and its missing prerequisites at cfg.prec, without escalation.
StageResult run_once(const Config& cfg, Stage s, std::ostream* log) {
  StageResult r{artifact_path(cfg, s), false, cfg.prec};
  if (fs::exists(r.path)) {
    r.cache_hit = true;
    return r;
  }
  if (s != Stage::Qexp) run_once(cfg, static_cast<Stage>(static_cast<int>(s) - 1), log);
  if (log) *log << "stage " << stage_name(s) << " ell " << cfg.ell << " prec " << cfg.prec << '\n';
  switch (s) {
    case Stage::Qexp:
      stage_qexp(cfg, r.path);
      break;
    case Stage::Periods:
      stage_periods(cfg, r.path);
      break;
    case Stage::Torsion:
      stage_torsion(cfg, r.path);
      break;
    case Stage::Poly:
      stage_poly(cfg, r.path);
      break;
    case Stage::Resolvents:
      stage_resolvents(cfg, r.path);
      break;
  }
  return r;
}

}  // namespace

StageResult run_stage(Config cfg, Stage s, std::ostream* log) {
  check_target(cfg.form, cfg.ell);
  for (int attempt = 0;; ++attempt) {
    try {
      return run_once(cfg, s, log);
    } catch (const PrecisionError& e) {
      if (attempt >= cfg.escalations) throw;
      if (log) *log << "precision insufficient (" << e.what() << "), retrying at " << 2 * cfg.prec << " bits\n";
      cfg.prec *= 2;
    }
  }
}

void write_torsion(std::ostream& os, const TorsionArtifact& t) {
  os << "modgal-torsion 1\n";
  os << "form " << t.form << " ell " << t.ell << " prec " << t.prec << '\n';
  os << "m " << t.plane.m1 << ' ' << t.plane.m2 << '\n';
  write_matrix(os, t.plane.d1.c);
  write_matrix(os, t.plane.d2.c);
}

TorsionArtifact read_torsion(std::istream& is) {
  const char* what = "torsion artifact";
  expect(is, "modgal-torsion", what);
  expect(is, "1", what);
  TorsionArtifact t;
  expect(is, "form", what);
  t.form = read_value<std::string>(is, what);
  expect(is, "ell", what);
  t.ell = read_value<int>(is, what);
  expect(is, "prec", what);
  t.prec = read_value<mp::Bits>(is, what);
  expect(is, "m", what);
  t.plane.m1 = read_value<int>(is, what);
  t.plane.m2 = read_value<int>(is, what);
  t.plane.d1.c = read_matrix(is, t.prec, what);
  t.plane.d2.c = read_matrix(is, t.prec, what);
  return t;
}

void write_poly(std::ostream& os, const PolyArtifact& p) {
  os << "modgal-poly 1\n";
  os << "form " << p.form << " ell " << p.ell << " prec " << p.prec << '\n';
  os << "degree " << p.F.c.size() - 1 << '\n';
  os << "denominator " << p.F.denominator << '\n';
  for (const auto& c : p.F.c) os << mpz_class(c * p.F.denominator) << '\n';
  os << "roots " << p.roots.size() << '\n';
  for (const auto& r : p.roots)
    os << r.a << ' ' << r.b << ' ' << mp::to_hex(r.alpha.real()) << ' ' << mp::to_hex(r.alpha.imag()) << '\n';
}

PolyArtifact read_poly(std::istream& is) {
  const char* what = "poly artifact";
  expect(is, "modgal-poly", what);
  expect(is, "1", what);
  PolyArtifact p;
  expect(is, "form", what);
  p.form = read_value<std::string>(is, what);
  expect(is, "ell", what);
  p.ell = read_value<int>(is, what);
  expect(is, "prec", what);
  p.prec = read_value<mp::Bits>(is, what);
  expect(is, "degree", what);
  const auto deg = read_value<std::size_t>(is, what);
  expect(is, "denominator", what);
  p.F.denominator = read_value<mpz_class>(is, what);
  for (std::size_t k = 0; k <= deg; ++k) {
    mpq_class c(read_value<mpz_class>(is, what), p.F.denominator);
    c.canonicalize();
    p.F.c.push_back(c);
  }
  expect(is, "roots", what);
  const auto n = read_value<std::size_t>(is, what);
  for (std::size_t k = 0; k < n; ++k) {
    evaluation::PlanePoint pt;
    pt.a = read_value<int>(is, what);
    pt.b = read_value<int>(is, what);
    const auto re = read_value<std::string>(is, what), im = read_value<std::string>(is, what);
    pt.alpha = Complex(mp::from_hex(re, p.prec), mp::from_hex(im, p.prec));
    p.roots.push_back(pt);
  }
  return p;
}

void write_resolvents(std::ostream& os, const ResolventArtifact& a) {
  const auto& r = a.r;
  os << "modgal-resolvents 1\n";
  os << "form " << a.form << " ell " << a.ell << " weight " << a.weight << " prec " << a.prec << '\n';
  os << "h " << r.hdeg << '\n';
  os << "denominator " << r.D << '\n';
  os << "ftilde " << r.ftilde.size() - 1 << '\n';
  for (const auto& c : r.ftilde) os << mpz_class(c * r.D) << '\n';
  os << "classes " << r.qclasses.size() << '\n';
  for (std::size_t i = 0; i < r.qclasses.size(); ++i) {
    const auto& m = r.classes[r.qclasses[i].lifts[0]].elements[0];
    os << "class " << m.a << ' ' << m.b << ' ' << m.c << ' ' << m.d << " size " << r.qclasses[i].size << " denominator "
       << r.D << "^" << (1 + r.hdeg) * static_cast<int>(r.qclasses[i].size) << '\n';
    for (const auto& c : r.G[i]) os << c << '\n';
  }
}

ResolventArtifact read_resolvents(std::istream& is) {
  const char* what = "resolvent artifact";
  expect(is, "modgal-resolvents", what);
  expect(is, "1", what);
  ResolventArtifact a;
  expect(is, "form", what);
  a.form = read_value<std::string>(is, what);
  expect(is, "ell", what);
  a.ell = read_value<int>(is, what);
  expect(is, "weight", what);
  a.weight = read_value<int>(is, what);
  expect(is, "prec", what);
  a.prec = read_value<mp::Bits>(is, what);
  auto& r = a.r;
  r.ell = a.ell;
  expect(is, "h", what);
  r.hdeg = read_value<int>(is, what);
  expect(is, "denominator", what);
  r.D = read_value<mpz_class>(is, what);
  expect(is, "ftilde", what);
  const auto deg = read_value<std::size_t>(is, what);
  for (std::size_t k = 0; k <= deg; ++k) {
    mpq_class c(read_value<mpz_class>(is, what), r.D);
    c.canonicalize();
    r.ftilde.push_back(c);
  }
  r.classes = frobenius::similarity_classes(a.ell);
  r.qclasses = frobenius::quotient_classes(r.classes, frobenius::odd_part_subgroup(a.ell), a.ell);
  expect(is, "classes", what);
  if (read_value<std::size_t>(is, what) != r.qclasses.size()) throw Error("resolvent artifact: class count mismatch");
  for (std::size_t i = 0; i < r.qclasses.size(); ++i) {
    expect(is, "class", what);
    frobenius::Mat2 m;
    m.a = read_value<int>(is, what);
    m.b = read_value<int>(is, what);
    m.c = read_value<int>(is, what);
    m.d = read_value<int>(is, what);
    const auto& e = r.classes[r.qclasses[i].lifts[0]].elements[0];
    if (m.a != e.a || m.b != e.b || m.c != e.c || m.d != e.d) throw Error("resolvent artifact: class order mismatch");
    expect(is, "size", what);
    const auto n = read_value<std::size_t>(is, what);
    expect(is, "denominator", what);
    read_value<std::string>(is, what);
    std::vector<mpz_class> g;
    for (std::size_t k = 0; k <= n; ++k) g.push_back(read_value<mpz_class>(is, what));
    r.G.push_back(std::move(g));
  }
  return a;
}

frobenius::Resolvents resolvents_from_poly(const PolyArtifact& p) {
  std::vector<Complex> fc, approx;
  for (const auto& c : p.F.c) fc.push_back(Complex(Real(c, p.prec)));
  for (const auto& r : p.roots) approx.push_back(r.alpha);
  const auto refined = refine_roots(fc, approx, p.prec);
  std::vector<evaluation::PlanePoint> pts = p.roots;
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i].alpha = refined[i];
  const auto q = frobenius::quotient_data(p.ell, pts);
  const auto ft = evaluation::recognize(evaluation::poly_from_roots(q.roots));
  return frobenius::build_resolvents(q, ft);
}

ApResult ap(const ResolventArtifact& a, const mpz_class& p) {
  if (p == a.ell) throw BadPrime("p = ell is excluded");
  if (p < 2 || mpz_probab_prime_p(p.get_mpz_t(), 30) == 0) throw BadPrime("p is not prime");
  const mpz_class det = arith::mpz_powmod(p % a.ell, a.weight - 1, a.ell);
  const auto fr = frobenius::frobenius(a.r, p, det.get_si());
  ApResult out;
  out.ell = a.ell;
  out.rep = a.r.classes[fr.cls].elements[0];
  out.det = a.r.classes[fr.cls].det;
  out.ap = fr.trace;
  return out;
}

std::string find_resolvents(const Config& cfg) {
  const std::string exact = artifact_path(cfg, Stage::Resolvents);
  if (fs::exists(exact)) return exact;
  const std::string prefix = "resolvents-" + file_form(cfg.form) + "-l" + std::to_string(cfg.ell) + "-p";
  std::string best;
  long best_prec = -1;
  if (fs::is_directory(cfg.cache))
    for (const auto& e : fs::directory_iterator(cfg.cache)) {
      const std::string name = e.path().filename().string();
      if (name.rfind(prefix, 0) != 0 || name.size() < prefix.size() + 5 || name.substr(name.size() - 4) != ".txt") continue;
      const long prec = std::atol(name.substr(prefix.size(), name.size() - prefix.size() - 4).c_str());
      if (prec > best_prec) {
        best_prec = prec;
        best = e.path().string();
      }
    }
  if (best.empty()) throw Error("no resolvent artifact for " + cfg.form.name() + " at ell " + std::to_string(cfg.ell));
  return best;
}

}  // namespace modgal::pipeline
