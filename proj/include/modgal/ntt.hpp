#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace modgal::ntt {

inline constexpr std::size_t kDefaultCrossover = 64;

// Product of two polynomials with coefficients in [0, p), truncated to n_out
// terms.  Multi-prime NTT with Garner reconstruction above the crossover.
std::vector<std::uint64_t> multiply(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b,
                                    std::uint64_t p, std::size_t n_out,
                                    std::size_t crossover = kDefaultCrossover);

std::vector<std::uint64_t> schoolbook(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b,
                                      std::uint64_t p, std::size_t n_out);

}  // namespace modgal::ntt
