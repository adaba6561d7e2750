#include "ringmpc/rng.hpp"

namespace ringmpc {

uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {
uint64_t hash_tag(std::string_view tag) {
  // FNV-1a
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}
}  // namespace

Rng::Rng(uint64_t seed) : seed_(seed), gen_(mix64(seed)) {}

uint64_t Rng::next_u64() { return gen_(); }

uint64_t Rng::below(uint64_t n) {
  // Rejection sampling; unbiased and identical on every platform.
  if (n == 0) return 0;
  uint64_t limit = ~uint64_t{0} - (~uint64_t{0} % n);
  uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % n;
}

Rng Rng::fork(std::string_view tag, uint64_t index) const {
  return Rng(mix64(seed_ ^ mix64(hash_tag(tag) + index)));
}

}  // namespace ringmpc
