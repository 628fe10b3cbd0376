#include <CLI11.hpp>
#include <gmpxx.h>

#include <fstream>
#include <iostream>
#include <sstream>

#include "modgal/errors.hpp"
#include "modgal/pipeline.hpp"

using namespace modgal;

namespace {

enum Exit { kOk = 0, kFailure = 1, kBadPrime = 2, kPrecision = 3, kExcluded = 4 };

// Decimal integer, optionally written as a sum of terms a or a^b
// ("10^1000+453").
mpz_class parse_integer(const std::string& text) {
  mpz_class total = 0;
  std::size_t i = 0;
  int sign = 1;
  if (text.empty()) throw std::invalid_argument("empty integer");
  while (i < text.size()) {
    if (text[i] == '+' || text[i] == '-') {
      sign = text[i] == '-' ? -1 : 1;
      ++i;
    }
    const std::size_t end = text.find_first_of("+-", i);
    const std::string term = text.substr(i, end == std::string::npos ? std::string::npos : end - i);
    const std::size_t caret = term.find('^');
    mpz_class v;
    if (caret == std::string::npos) {
      if (v.set_str(term, 10) != 0) throw std::invalid_argument("bad integer " + term);
    } else {
      mpz_class base;
      unsigned long e = 0;
      if (base.set_str(term.substr(0, caret), 10) != 0) throw std::invalid_argument("bad integer " + term);
      e = std::stoul(term.substr(caret + 1));
      mpz_pow_ui(v.get_mpz_t(), base.get_mpz_t(), e);
    }
    total += sign * v;
    sign = 1;
    if (end == std::string::npos) break;
    i = end;
  }
  return total;
}

std::string matrix_text(const frobenius::Mat2& m) {
  std::ostringstream os;
  os << "[[" << m.a << ", " << m.b << "], [" << m.c << ", " << m.d << "]]";
  return os.str();
}

int report(const std::exception& e, int code) {
  std::cerr << "modgalrep: " << e.what() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mod-ell Galois representations of Delta, E4 Delta and weight-2 newforms"};
  app.require_subcommand(1);

  pipeline::Config cfg;
  std::string form = "delta";
  std::string p_text;
  std::vector<int> crt;
  bool quiet = false;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--form", form, "delta | e4delta | weight2:<index>");
    sub->add_option("--ell", cfg.ell, "prime ell >= 11");
    sub->add_option("--prec", cfg.prec, "working precision in bits");
    sub->add_option("--cache", cfg.cache, "artifact directory");
    sub->add_flag("--quiet", quiet, "no progress lines");
  };

  std::vector<CLI::App*> stages;
  for (const char* name : {"qexp", "periods", "torsion", "poly", "resolvents"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("compute the ") + name + " artifact");
    common(sub);
    sub->add_option("--B", cfg.B, "expansion length (at least what the precision needs)");
    sub->add_option("--seed", cfg.seed, "seed for the random choices in the jacobian");
    sub->add_option("--escalations", cfg.escalations, "precision doublings tried on failure");
    stages.push_back(sub);
  }
  CLI::App* ap = app.add_subcommand("ap", "a_p mod ell from the resolvent artifact");
  common(ap);
  ap->add_option("--p", p_text, "prime, decimal or a sum like 10^1000+453")->required();
  ap->add_option("--crt", crt, "levels to combine by the Chinese remainder theorem")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.form = TargetForm::parse(form);
  } catch (const std::exception& e) {
    return report(e, kFailure);
  }
  std::ostream* log = quiet ? nullptr : &std::cerr;

  try {
    for (CLI::App* sub : stages) {
      if (!sub->parsed()) continue;
      const auto r = pipeline::run_stage(cfg, pipeline::parse_stage(sub->get_name()), log);
      std::cout << sub->get_name() << ' ' << r.path << (r.cache_hit ? " (cached)" : "") << '\n';
      return kOk;
    }

    const mpz_class p = parse_integer(p_text);
    if (p < mpz_class("10000000000") && !quiet)
      std::cerr << "modgalrep: warning: for p < 10^10 the resolvents are more likely to share a root mod p, "
                   "and a_p is cheaper from the q-expansion\n";
    if (crt.empty()) {
      std::ifstream is(pipeline::find_resolvents(cfg));
      const auto a = pipeline::read_resolvents(is);
      const auto r = pipeline::ap(a, p);
      std::cout << "class " << matrix_text(r.rep) << '\n';
      std::cout << "det " << r.det << '\n';
      std::cout << "a_p " << r.ap << " mod " << r.ell << '\n';
      return kOk;
    }

    mpz_class residue = 0, modulus = 1;
    int bad = 0;
    for (int ell : crt) {
      pipeline::Config c = cfg;
      c.ell = ell;
      try {
        check_target(c.form, ell);
        std::ifstream is(pipeline::find_resolvents(c));
        const auto r = pipeline::ap(pipeline::read_resolvents(is), p);
        std::cout << "ell " << ell << " class " << matrix_text(r.rep) << " a_p " << r.ap << '\n';
        // combine residue mod modulus with r.ap mod ell
        mpz_class inv, m = modulus % ell;
        mpz_class l(ell);
        mpz_invert(inv.get_mpz_t(), m.get_mpz_t(), l.get_mpz_t());
        mpz_class t = (mpz_class(r.ap) - residue) % ell;
        if (t < 0) t += ell;
        t = t * inv % ell;
        residue += modulus * t;
        modulus *= ell;
      } catch (const BadPrime& e) {
        std::cout << "ell " << ell << " skipped: " << e.what() << '\n';
        ++bad;
      } catch (const ConfigExcluded& e) {
        std::cout << "ell " << ell << " skipped: " << e.what() << '\n';
      } catch (const Error& e) {
        std::cout << "ell " << ell << " skipped: " << e.what() << '\n';
      }
    }
    if (modulus == 1) {
      std::cerr << "modgalrep: no level answered\n";
      return bad ? kBadPrime : kFailure;
    }
    std::cout << "a_p " << residue << " mod " << modulus << '\n';
    return kOk;
  } catch (const BadPrime& e) {
    return report(e, kBadPrime);
  } catch (const PrecisionError& e) {
    return report(e, kPrecision);
  } catch (const ConfigExcluded& e) {
    return report(e, kExcluded);
  } catch (const std::exception& e) {
    return report(e, kFailure);
  }
}
