#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "ringmpc/rng.hpp"

namespace ringmpc {

/// Plain value-level arithmetic mod a prime, for the server-side protocol
/// machinery where the field is concrete and speed matters (the black-box
/// oracle stays the interface everywhere else).
class PrimeField {
 public:
  explicit PrimeField(uint64_t p);

  uint64_t p() const { return p_; }
  uint64_t add(uint64_t a, uint64_t b) const { return b == 0 ? a : (a >= p_ - b ? a - (p_ - b) : a + b); }
  uint64_t sub(uint64_t a, uint64_t b) const { return a >= b ? a - b : a + (p_ - b); }
  uint64_t neg(uint64_t a) const { return a == 0 ? 0 : p_ - a; }
  uint64_t mul(uint64_t a, uint64_t b) const {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % p_);
  }
  uint64_t pow(uint64_t a, uint64_t e) const;
  uint64_t inv(uint64_t a) const;  // throws on zero
  uint64_t from_int(int64_t v) const {
    int64_t m = v % static_cast<int64_t>(p_);
    return static_cast<uint64_t>(m < 0 ? m + static_cast<int64_t>(p_) : m);
  }
  uint64_t rand_elem(Rng& rng) const { return rng.below(p_); }

  // -- dense polynomial helpers (coefficient order: low to high) -------------
  uint64_t eval(std::span<const uint64_t> coeffs, uint64_t x) const;
  /// Coefficients of the unique interpolant through (xs[i], ys[i]).
  std::vector<uint64_t> interpolate(std::span<const uint64_t> xs, std::span<const uint64_t> ys) const;
  /// Value at x of the interpolant, without materializing coefficients.
  uint64_t interpolate_at(std::span<const uint64_t> xs, std::span<const uint64_t> ys, uint64_t x) const;

 private:
  uint64_t p_;
};

}  // namespace ringmpc
