#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "ringmpc/stat_encoding.hpp"
#include "test_util.hpp"

using namespace ringmpc;

namespace {

RingCtx ctx_of(const RingOracle& r, Rng& rng, CommCounter& cnt) { return RingCtx(r, rng, cnt); }

}  // namespace

TEST_CASE("encode/reconstruct round trip") {
  auto r5 = RingOracle::make_zm(5);
  CommCounter cnt;
  for (uint64_t x = 0; x < 5; ++x) {
    for (uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng(seed);
      auto ctx = ctx_of(r5, rng, cnt);
      auto enc = stat_encode(ctx, r5.from_index(x), 4);
      CHECK(stat_reconstruct(ctx, enc) == r5.from_index(x));
    }
  }
}

TEST_CASE("n=1 encodes the element itself") {
  auto r2 = RingOracle::make_zm(2);
  CommCounter cnt;
  Rng rng(3);
  auto ctx = ctx_of(r2, rng, cnt);
  auto enc = stat_encode(ctx, r2.from_index(0), 1);
  Label selected = enc.selector[0] ? enc.v1[0] : enc.v0[0];
  CHECK(selected == r2.from_index(0));
}

TEST_CASE("hand-built reconstruction") {
  auto r7 = RingOracle::make_zm(7);
  StatEncoding enc;
  enc.v0 = {r7.from_index(1), r7.from_index(0), r7.from_index(4)};
  enc.v1 = {r7.from_index(6), r7.from_index(2), r7.from_index(5)};
  enc.selector = {0, 1, 0};  // selected: 1, 2, 4 -> sums to 0 mod 7
  CommCounter cnt;
  Rng rng(0);
  auto ctx = ctx_of(r7, rng, cnt);
  CHECK(stat_reconstruct(ctx, enc) == r7.from_index(0));

  StatEncoding zeros;
  zeros.v0 = {r7.from_index(0), r7.from_index(0)};
  zeros.v1 = {r7.from_index(0), r7.from_index(0)};
  zeros.selector = {1, 0};
  CHECK(stat_reconstruct(ctx, zeros) == r7.from_index(0));
}

TEST_CASE("exact pair distribution matches a direct enumeration of the procedure") {
  // Z_2, n=3. Enumerate every (selector, summands, filler) choice of the
  // encoding procedure and tally the resulting pairs; then recompute each
  // pair's mass by counting selector patterns. The two routes must agree
  // exactly.
  const int n = 3, R = 2;
  const int x = 1;
  const int pair_count = 1 << (2 * n);  // (v0, v1) over bits
  std::vector<long long> direct(pair_count, 0);
  for (int sigma = 0; sigma < (1 << n); ++sigma)
    for (int u = 0; u < (1 << n); ++u) {
      int usum = 0;
      for (int i = 0; i < n; ++i) usum ^= (u >> i) & 1;
      if (usum != x) continue;
      for (int fill = 0; fill < (1 << n); ++fill) {
        int v0 = 0, v1 = 0;
        for (int i = 0; i < n; ++i) {
          int ui = (u >> i) & 1;
          int fi = (fill >> i) & 1;
          if ((sigma >> i) & 1) {
            v1 |= ui << i;
            v0 |= fi << i;
          } else {
            v0 |= ui << i;
            v1 |= fi << i;
          }
        }
        direct[(v1 << n) | v0] += 1;
      }
    }
  long long direct_total = 0;
  for (auto c : direct) direct_total += c;

  for (int pair = 0; pair < pair_count; ++pair) {
    int v0 = pair & ((1 << n) - 1), v1 = pair >> n;
    int cnt = 0;
    for (int sigma = 0; sigma < (1 << n); ++sigma) {
      int acc = 0;
      for (int i = 0; i < n; ++i) acc ^= ((sigma >> i) & 1) ? (v1 >> i) & 1 : (v0 >> i) & 1;
      if (acc == x) ++cnt;
    }
    // direct[pair] / direct_total == cnt / (2^n * R^(2n-1))
    long long lhs = direct[pair] * (1LL << n) * (1LL << (2 * n - 1));
    long long rhs = static_cast<long long>(cnt) * direct_total;
    CHECK(lhs == rhs);
  }
}

TEST_CASE("statistical distance: exact values for the binary ring") {
  auto r2 = RingOracle::make_zm(2);
  // Frozen from the enumeration oracle: distance is 2^-(n+1), independent
  // of the encoded element.
  std::map<int, Rational> expect = {
      {2, Rational(1, 8)}, {3, Rational(1, 16)}, {4, Rational(1, 32)}, {5, Rational(1, 64)}};
  for (auto [n, want] : expect) {
    Rational d0 = stat_distance_bruteforce(r2, n, r2.from_index(0));
    Rational d1 = stat_distance_bruteforce(r2, n, r2.from_index(1));
    CHECK(d0 == want);
    CHECK(d0 == d1);
  }
}

TEST_CASE("statistical distance: element independence and decay") {
  for (uint64_t m : {2ull, 3ull, 4ull}) {
    auto r = RingOracle::make_zm(m);
    int nmax = m == 2 ? 5 : 4;
    Rational prev(1);
    for (int n = 2; n <= nmax; ++n) {
      Rational d = stat_distance_bruteforce(r, n, r.from_index(0));
      for (uint64_t x = 1; x < m; ++x) {
        CHECK(stat_distance_bruteforce(r, n, r.from_index(x)) == d);
      }
      CHECK(d < prev);
      prev = d;
    }
  }
}

TEST_CASE("statistical distance: bound shape") {
  auto r2 = RingOracle::make_zm(2);
  for (int n = 2; n <= 5; ++n) {
    Rational d = stat_distance_bruteforce(r2, n, r2.from_index(0));
    // d <= 2^(-(n-1)/2), compared in squares to stay in rationals
    CHECK(d * d <= Rational(1, 1LL << (n - 1)));
  }
}

TEST_CASE("statistical distance: parameter gate") {
  auto r5 = RingOracle::make_zm(5);
  CHECK_THROWS_AS(stat_distance_bruteforce(r5, 3, r5.from_index(0)), std::invalid_argument);
  auto r2 = RingOracle::make_zm(2);
  CHECK_THROWS_AS(stat_distance_bruteforce(r2, 0, r2.from_index(0)), std::invalid_argument);
  CHECK_THROWS_AS(stat_distance_bruteforce(r2, 6, r2.from_index(0)), std::invalid_argument);
}

TEST_CASE("bottom input propagates") {
  auto r5 = RingOracle::make_zm(5);
  CommCounter cnt;
  Rng rng(1);
  auto ctx = ctx_of(r5, rng, cnt);
  auto enc = stat_encode(ctx, Label::bottom(), 3);
  CHECK(stat_reconstruct(ctx, enc).is_bottom());
}

TEST_CASE("selected entries hide in uniform slots") {
  // Non-selected coordinates are uniform: chi-square over many encodings.
  auto r5 = RingOracle::make_zm(5);
  CommCounter cnt;
  Rng rng(12);
  auto ctx = ctx_of(r5, rng, cnt);
  std::vector<uint64_t> counts(5, 0);
  const int iters = 20000;
  for (int i = 0; i < iters; ++i) {
    auto enc = stat_encode(ctx, r5.from_index(2), 3);
    for (int j = 0; j < 3; ++j) {
      const Label& unsel = enc.selector[j] ? enc.v0[j] : enc.v1[j];
      counts[*r5.to_index(unsel)]++;
    }
  }
  CHECK(testutil::chi_square_uniform(counts, 3 * iters) < testutil::chi_square_bound(4));
}
