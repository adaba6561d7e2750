#include "ringmpc/stat_encoding.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ringmpc {

std::string rational_to_string(const Rational& r) {
  std::ostringstream os;
  os << r.numerator() << "/" << r.denominator() << " ("
     << static_cast<double>(r.numerator()) / static_cast<double>(r.denominator()) << ")";
  return os.str();
}

StatEncoding stat_encode(RingCtx ring, const Label& x, int n) {
  if (n < 1) throw std::invalid_argument("stat_encode: n must be >= 1");
  StatEncoding enc;
  enc.v0.resize(n);
  enc.v1.resize(n);
  enc.selector.resize(n);
  if (x.is_bottom()) {
    return enc;  // all bottom
  }
  // Random summands conditioned on their sum being x.
  std::vector<Label> u(n);
  Label acc = ring.zero();
  for (int i = 0; i + 1 < n; ++i) {
    u[i] = ring.sample();
    acc = ring.add(acc, u[i]);
  }
  u[n - 1] = ring.sub(x, acc);
  for (int i = 0; i < n; ++i) {
    enc.selector[i] = static_cast<uint8_t>(ring.rng().bit());
    Label filler = ring.sample();
    if (enc.selector[i] == 0) {
      enc.v0[i] = u[i];
      enc.v1[i] = filler;
    } else {
      enc.v0[i] = filler;
      enc.v1[i] = u[i];
    }
  }
  return enc;
}

Label stat_reconstruct(RingCtx ring, const StatEncoding& enc) {
  if (enc.v0.size() != enc.v1.size() || enc.v0.size() != enc.selector.size())
    throw std::invalid_argument("stat_reconstruct: length mismatch");
  Label acc = ring.zero();
  for (size_t i = 0; i < enc.v0.size(); ++i) {
    acc = ring.add(acc, enc.selector[i] ? enc.v1[i] : enc.v0[i]);
  }
  return acc;
}

Rational stat_distance_bruteforce(const RingOracle& oracle, int n, const Label& x) {
  auto ord = oracle.order();
  if (!ord || *ord > 4 || n < 1 || n > 5)
    throw std::invalid_argument("stat_distance_bruteforce: need |R| <= 4 and 1 <= n <= 5");
  auto xi = oracle.to_index(x);
  if (!xi) throw std::invalid_argument("stat_distance_bruteforce: invalid element");
  int r = static_cast<int>(*ord);

  // Addition table over element indices.
  std::vector<int> add(r * r);
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) {
      auto s = oracle.to_index(oracle.add(oracle.from_index(a), oracle.from_index(b)));
      add[a * r + b] = static_cast<int>(*s);
    }

  // For each pair of vectors, the probability mass is proportional to the
  // number of selector patterns whose selected sum hits x. Enumerate all
  // |R|^(2n) pairs and all 2^n patterns.
  uint64_t pairs = 1;
  for (int i = 0; i < 2 * n; ++i) pairs *= static_cast<uint64_t>(r);
  const int patterns = 1 << n;
  long long sum_abs = 0;  // sum over pairs of |cnt * |R| - 2^n|
  std::vector<int> digits(2 * n, 0);
  for (uint64_t p = 0; p < pairs; ++p) {
    // digits[0..n) = v0, digits[n..2n) = v1
    int cnt = 0;
    for (int sigma = 0; sigma < patterns; ++sigma) {
      int acc = 0;
      for (int i = 0; i < n; ++i) {
        int v = (sigma >> i) & 1 ? digits[n + i] : digits[i];
        acc = add[acc * r + v];
      }
      if (acc == static_cast<int>(*xi)) ++cnt;
    }
    sum_abs += std::llabs(static_cast<long long>(cnt) * r - patterns);
    // next mixed-radix pair
    for (int i = 0; i < 2 * n; ++i) {
      if (++digits[i] < r) break;
      digits[i] = 0;
    }
  }
  // distance = sum_abs / (2^(n+1) * |R|^(2n))
  Rational denom(static_cast<long long>(patterns) * 2 * static_cast<long long>(pairs));
  return Rational(sum_abs) / denom;
}

}  // namespace ringmpc
