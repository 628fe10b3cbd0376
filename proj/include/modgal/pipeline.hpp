#pragma once

#include <gmpxx.h>

#include <iosfwd>
#include <string>
#include <vector>

#include "modgal/evaluation.hpp"
#include "modgal/frobenius.hpp"
#include "modgal/mp.hpp"
#include "modgal/targets.hpp"
#include "modgal/torsion.hpp"

namespace modgal::pipeline {

struct Config {
  TargetForm form;
  int ell = 11;
  mp::Bits prec = 512;
  std::size_t B = 0;  // expansion length; raised to what the precision needs
  std::string cache = "modgal-cache";
  unsigned long seed = 1;
  int escalations = 2;  // precision doublings tried after a PrecisionError
};

enum class Stage { Qexp, Periods, Torsion, Poly, Resolvents };
Stage parse_stage(const std::string& s);
std::string stage_name(Stage s);

// Expansion length needed by the later stages at cfg.prec.
std::size_t required_terms(const Config& cfg);
std::string artifact_path(const Config& cfg, Stage s);

struct StageResult {
  std::string path;
  bool cache_hit = false;
  mp::Bits prec = 0;  // precision finally used
};
// Computes the stage and any missing prerequisite; an existing artifact is
// reused.  On PrecisionError the precision is doubled (cfg.escalations times)
// before giving up.
StageResult run_stage(Config cfg, Stage s, std::ostream* log = nullptr);

struct TorsionArtifact {
  std::string form;
  int ell = 0;
  mp::Bits prec = 0;
  torsion::TorsionPlane plane;
};
void write_torsion(std::ostream& os, const TorsionArtifact& t);
TorsionArtifact read_torsion(std::istream& is);

// F(X) with its roots labelled by plane coordinates.
struct PolyArtifact {
  std::string form;
  int ell = 0;
  mp::Bits prec = 0;
  evaluation::RationalPoly F;
  std::vector<evaluation::PlanePoint> roots;
};
void write_poly(std::ostream& os, const PolyArtifact& p);
PolyArtifact read_poly(std::istream& is);

struct ResolventArtifact {
  std::string form;
  int ell = 0;
  int weight = 12;
  mp::Bits prec = 0;
  frobenius::Resolvents r;
};
void write_resolvents(std::ostream& os, const ResolventArtifact& a);
ResolventArtifact read_resolvents(std::istream& is);

// F~ and the resolvents from the F artifact: the roots are refined on F to
// the artifact precision before the orbit sums are taken.
frobenius::Resolvents resolvents_from_poly(const PolyArtifact& p);

struct ApResult {
  int ell = 0;
  frobenius::Mat2 rep;  // representative of the Frobenius class
  int det = 0;
  long ap = 0;  // a_p mod ell in [0, ell)
};
// Throws BadPrime for p = ell, p not a probable prime, or an unanswerable p.
ApResult ap(const ResolventArtifact& a, const mpz_class& p);
// The resolvent artifact for cfg.form at cfg.ell: cfg.prec if present,
// otherwise the highest precision in the cache.
std::string find_resolvents(const Config& cfg);

}  // namespace modgal::pipeline
