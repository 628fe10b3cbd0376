#pragma once

#include <cstdint>
#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include "modgal/arith.hpp"
#include "modgal/jacobian.hpp"
#include "modgal/newforms.hpp"
#include "modgal/ntt.hpp"
#include "modgal/periods.hpp"
#include "modgal/qexpansion.hpp"

namespace support {

using namespace modgal;

// Newforms, lattice and the Khuri-Makdisi ambient at one level.
struct Level {
  std::unique_ptr<modsym::Space> s;
  newforms::NebentypusBasis nb;
  periods::WindingDecomposition wd;
  std::vector<newforms::Eigenform> forms;
  periods::PeriodLattice L;
  std::unique_ptr<jacobian::Ambient> A;
};

inline Level make_level(int ell, mp::Bits prec, unsigned long seed = 7) {
  Level lv;
  lv.s = std::make_unique<modsym::Space>(ell);
  lv.nb = newforms::nebentypus_bases(*lv.s, 64, prec + 64);
  lv.wd = periods::winding_decomposition(*lv.s, periods::default_twists(ell));
  std::size_t n = jacobian::chart_terms(prec) + static_cast<std::size_t>(ell) + 2;
  for (long p : lv.wd.twists_used()) n = std::max(n, periods::terms_needed(ell, p, prec + 64) + 2);
  const auto ex = qexp::expand_all(*lv.s, n);
  for (std::size_t j = 0; j < lv.nb.eigen.size(); ++j)
    lv.forms.push_back({lv.nb.eigen[j].character, ex.eigenform(lv.nb, j, prec + 64)});
  lv.L = periods::period_lattice(*lv.s, lv.forms, lv.wd, prec);
  lv.A = std::make_unique<jacobian::Ambient>(lv.nb, lv.forms, jacobian::Options{prec, seed});
  return lv;
}

// tau(n) mod m for n < N, from q prod (1 - q^n)^24 with the product taken
// from Euler's pentagonal series.
inline std::vector<std::uint64_t> tau_mod(std::size_t N, std::uint64_t m) {
  std::vector<std::uint64_t> e(N, 0);
  // sum over j in Z of (-1)^j q^(j (3j - 1) / 2), taking j and -j together
  for (long j = 0; j * (3 * j - 1) / 2 < static_cast<long>(N); ++j) {
    const std::uint64_t sign = arith::reduce(j % 2 ? -1 : 1, m);
    e[static_cast<std::size_t>(j * (3 * j - 1) / 2)] = sign;
    if (j > 0 && j * (3 * j + 1) / 2 < static_cast<long>(N)) e[static_cast<std::size_t>(j * (3 * j + 1) / 2)] = sign;
  }
  auto e2 = ntt::multiply(e, e, m, N);
  auto e3 = ntt::multiply(e2, e, m, N);
  auto e6 = ntt::multiply(e3, e3, m, N);
  auto e12 = ntt::multiply(e6, e6, m, N);
  auto e24 = ntt::multiply(e12, e12, m, N);
  std::vector<std::uint64_t> tau(N, 0);
  for (std::size_t n = 1; n < N; ++n) tau[n] = e24[n - 1];
  return tau;
}

// Artifact directory of the ell = 11 pipeline run registered as a ctest
// fixture; empty when unset.
inline std::string fixture_cache() {
  const char* c = std::getenv("MODGAL_CACHE");
  return c ? c : "";
}

}  // namespace support
