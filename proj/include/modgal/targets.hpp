#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

namespace modgal {

enum class FormKind { Delta, E4Delta, Weight2 };

struct TargetForm {
  FormKind kind = FormKind::Delta;
  int index = 0;  // weight 2: position among the rational newforms of level ell

  int weight() const { return kind == FormKind::Delta ? 12 : kind == FormKind::E4Delta ? 16 : 2; }
  std::string name() const;
  // "delta", "e4delta", "weight2:<index>"
  static TargetForm parse(const std::string& s);
};

// Throws ConfigExcluded for (form, ell) pairs whose representation is not
// computed: ell < 11 or composite, projectively non-surjective or reducible
// cases, and weight-2 targets at levels other than their own.
void check_target(const TargetForm& f, int ell);

// q-expansions of Delta and E4 Delta, a_0..a_{B-1}.
std::vector<mpz_class> level_one_qexp(FormKind kind, std::size_t B);
std::vector<std::uint64_t> level_one_qexp_mod(FormKind kind, std::size_t B, std::uint64_t m);

}  // namespace modgal
