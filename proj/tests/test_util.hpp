#pragma once

// Shared test helpers: independent reference oracles (naive reimplementations
// kept deliberately separate from the library code paths) and small
// statistics utilities.

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "ringmpc/ring.hpp"

namespace testutil {

// Schoolbook dim x dim matrix product over Z_m, triple loop on plain ints.
inline std::vector<uint64_t> naive_mat_mul(const std::vector<uint64_t>& a, const std::vector<uint64_t>& b,
                                           int dim, uint64_t m) {
  std::vector<uint64_t> c(dim * dim, 0);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      unsigned __int128 acc = 0;
      for (int l = 0; l < dim; ++l)
        acc += static_cast<unsigned __int128>(a[i * dim + l]) * b[l * dim + j] % m;
      c[i * dim + j] = static_cast<uint64_t>(acc % m);
    }
  return c;
}

// Polynomial evaluation mod p over plain ints, low-to-high coefficients.
inline uint64_t naive_poly_eval(const std::vector<uint64_t>& coeffs, uint64_t x, uint64_t p) {
  unsigned __int128 acc = 0;
  for (size_t i = coeffs.size(); i-- > 0;) acc = (acc * x + coeffs[i]) % p;
  return static_cast<uint64_t>(acc);
}

// Chi-square statistic against a uniform expectation.
inline double chi_square_uniform(const std::vector<uint64_t>& counts, uint64_t total) {
  double expect = static_cast<double>(total) / counts.size();
  double stat = 0;
  for (uint64_t c : counts) {
    double d = c - expect;
    stat += d * d / expect;
  }
  return stat;
}

// 99.9% chi-square quantile by the Wilson-Hilferty approximation; plenty for
// a pass/fail gate on seeded (deterministic) draws.
inline double chi_square_bound(int dof) {
  double z = 3.0902;  // N(0,1) 99.9% quantile
  double a = 2.0 / (9.0 * dof);
  double v = 1.0 - a + z * std::sqrt(a);
  return dof * v * v * v;
}

// Number of u64 entries needed / label decode convenience.
inline uint64_t scalar_of(const ringmpc::RingOracle& oracle, const ringmpc::Label& l) {
  auto e = oracle.entries(l);
  REQUIRE(e.has_value());
  return (*e)[0];
}

inline ringmpc::Label scalar_label(const ringmpc::RingOracle& oracle, uint64_t v) {
  return oracle.from_entries(std::vector<uint64_t>{v % oracle.modulus()});
}

}  // namespace testutil
