#include "ringmpc/prime_field.hpp"

#include "ringmpc/ring.hpp"

namespace ringmpc {

PrimeField::PrimeField(uint64_t p) : p_(p) {
  if (!is_prime_u64(p)) throw std::invalid_argument("PrimeField: modulus must be prime");
}

uint64_t PrimeField::pow(uint64_t a, uint64_t e) const { return powmod_u64(a, e, p_); }

uint64_t PrimeField::inv(uint64_t a) const {
  if (a % p_ == 0) throw std::invalid_argument("PrimeField::inv of zero");
  return pow(a % p_, p_ - 2);
}

uint64_t PrimeField::eval(std::span<const uint64_t> coeffs, uint64_t x) const {
  uint64_t acc = 0;
  for (size_t i = coeffs.size(); i-- > 0;) acc = add(mul(acc, x), coeffs[i]);
  return acc;
}

std::vector<uint64_t> PrimeField::interpolate(std::span<const uint64_t> xs,
                                              std::span<const uint64_t> ys) const {
  const size_t n = xs.size();
  if (ys.size() != n) throw std::invalid_argument("interpolate: point/value mismatch");
  // Newton form, expanded to dense coefficients.
  std::vector<uint64_t> divided(ys.begin(), ys.end());
  for (int level = 1; level < static_cast<int>(n); ++level) {
    for (int i = static_cast<int>(n) - 1; i >= level; --i) {
      uint64_t num = sub(divided[i], divided[i - 1]);
      uint64_t den = sub(xs[i], xs[i - level]);
      divided[i] = mul(num, inv(den));
    }
  }
  std::vector<uint64_t> coeffs(n, 0);
  std::vector<uint64_t> basis{1};  // prod_{j < i} (x - xs[j])
  for (size_t i = 0; i < n; ++i) {
    for (size_t d = 0; d < basis.size(); ++d) coeffs[d] = add(coeffs[d], mul(divided[i], basis[d]));
    if (i + 1 < n) {
      basis.push_back(0);
      for (size_t d = basis.size() - 1; d > 0; --d) basis[d] = sub(basis[d - 1], mul(basis[d], xs[i]));
      basis[0] = mul(basis[0], neg(xs[i]));
    }
  }
  return coeffs;
}

uint64_t PrimeField::interpolate_at(std::span<const uint64_t> xs, std::span<const uint64_t> ys,
                                    uint64_t x) const {
  const size_t n = xs.size();
  if (ys.size() != n) throw std::invalid_argument("interpolate_at: point/value mismatch");
  uint64_t acc = 0;
  for (size_t j = 0; j < n; ++j) {
    uint64_t num = 1, den = 1;
    for (size_t l = 0; l < n; ++l) {
      if (l == j) continue;
      num = mul(num, sub(x, xs[l]));
      den = mul(den, sub(xs[j], xs[l]));
    }
    acc = add(acc, mul(ys[j], mul(num, inv(den))));
  }
  return acc;
}

}  // namespace ringmpc
