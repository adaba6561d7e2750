#include "ringmpc/ring.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>

namespace ringmpc {

namespace {

uint64_t addmod(uint64_t a, uint64_t b, uint64_t m) {
  // Inputs reduced; safe for any m < 2^64.
  if (b == 0) return a;
  return a >= m - b ? a - (m - b) : a + b;
}

uint64_t submod(uint64_t a, uint64_t b, uint64_t m) { return a >= b ? a - b : a + (m - b); }

// Extended gcd inverse; nullopt when gcd(a, m) != 1.
std::optional<uint64_t> invmod(uint64_t a, uint64_t m) {
  int64_t t = 0, newt = 1;
  uint64_t r = m, newr = a % m;
  while (newr != 0) {
    uint64_t q = r / newr;
    int64_t tmpt = t - static_cast<int64_t>(q) * newt;
    t = newt;
    newt = tmpt;
    uint64_t tmpr = r - q * newr;
    r = newr;
    newr = tmpr;
  }
  if (r != 1) return std::nullopt;
  if (t < 0) t += static_cast<int64_t>(m);
  return static_cast<uint64_t>(t);
}

// Inverse of an odd a modulo 2^64 (Newton iteration), then masked by caller.
uint64_t inv_pow2_64(uint64_t a) {
  uint64_t x = a;  // correct mod 2^3
  for (int i = 0; i < 5; ++i) x *= 2 - a * x;
  return x;
}

void write_bits(std::vector<uint8_t>& out, int& bitpos, uint64_t v, int nbits) {
  for (int i = 0; i < nbits; ++i, ++bitpos) {
    if ((v >> i) & 1) out[bitpos >> 3] |= static_cast<uint8_t>(1u << (bitpos & 7));
  }
}

uint64_t read_bits(const std::vector<uint8_t>& in, int& bitpos, int nbits) {
  uint64_t v = 0;
  for (int i = 0; i < nbits; ++i, ++bitpos) {
    v |= static_cast<uint64_t>((in[bitpos >> 3] >> (bitpos & 7)) & 1) << i;
  }
  return v;
}

}  // namespace

std::string Label::hex() const {
  if (is_bottom()) return "<bottom>";
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve(bytes_.size() * 2);
  for (uint8_t b : bytes_) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 0xf]);
  }
  return s;
}

const char* ring_cmd_name(RingCmd cmd) {
  switch (cmd) {
    case RingCmd::add: return "add";
    case RingCmd::subtract: return "subtract";
    case RingCmd::multiply: return "multiply";
    case RingCmd::sample: return "sample";
    case RingCmd::one: return "one";
    case RingCmd::invert: return "invert";
  }
  return "?";
}

uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) {
  return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

uint64_t powmod_u64(uint64_t a, uint64_t e, uint64_t m) {
  uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod_u64(r, a, m);
    a = mulmod_u64(a, a, m);
    e >>= 1;
  }
  return r;
}

bool is_prime_u64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    uint64_t x = powmod_u64(a % n, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

namespace {

uint64_t pollard_rho(uint64_t n, Rng& rng) {
  if ((n & 1) == 0) return 2;
  while (true) {
    uint64_t x = rng.below(n - 2) + 2;
    uint64_t c = rng.below(n - 1) + 1;
    uint64_t y = x, d = 1;
    while (d == 1) {
      x = addmod(mulmod_u64(x, x, n), c, n);
      y = addmod(mulmod_u64(y, y, n), c, n);
      y = addmod(mulmod_u64(y, y, n), c, n);
      d = std::gcd(x > y ? x - y : y - x, n);
    }
    if (d != n) return d;
  }
}

void factor_rec(uint64_t n, Rng& rng, std::vector<uint64_t>& out) {
  if (n == 1) return;
  if (is_prime_u64(n)) {
    out.push_back(n);
    return;
  }
  uint64_t d = pollard_rho(n, rng);
  factor_rec(d, rng, out);
  factor_rec(n / d, rng, out);
}

}  // namespace

std::vector<std::pair<uint64_t, int>> factorize_u64(uint64_t n) {
  std::vector<uint64_t> primes;
  Rng rng(0x5eedf00d ^ n);
  for (uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL}) {
    while (n % p == 0) {
      primes.push_back(p);
      n /= p;
    }
  }
  if (n > 1) factor_rec(n, rng, primes);
  std::sort(primes.begin(), primes.end());
  std::vector<std::pair<uint64_t, int>> out;
  for (uint64_t p : primes) {
    if (!out.empty() && out.back().first == p)
      out.back().second++;
    else
      out.push_back({p, 1});
  }
  return out;
}

// ---------------------------------------------------------------------------
// RingOracle construction

void RingOracle::finish_setup(FamilyOptions opts) {
  entry_bits_ = std::max(1, static_cast<int>(std::bit_width(m_ - 1)));
  int total_bits = entry_bits_ * dim_ * dim_;
  id_.bit_length = total_bits;
  label_bytes_ = (total_bits + 7) / 8;
  entry_mask_ = entry_bits_ == 64 ? ~uint64_t{0} : ((uint64_t{1} << entry_bits_) - 1);

  if (opts.perm_key != 0) {
    perm_mul_ = (mix64(opts.perm_key) | 1) & entry_mask_;
    perm_xor_ = mix64(opts.perm_key ^ 0xabcdef) & entry_mask_;
    perm_mul_inv_ = inv_pow2_64(perm_mul_ | 1) & entry_mask_;
    id_.text += ";perm=" + std::to_string(opts.perm_key);
  }

  // |R| = m^(dim^2) when it fits.
  unsigned __int128 ord = 1;
  bool fits = true;
  for (int i = 0; i < dim_ * dim_ && fits; ++i) {
    ord *= m_;
    if (ord > ~uint64_t{0}) fits = false;
  }
  if (fits) order_ = static_cast<uint64_t>(ord);

  // Exact unit fraction from the factorization of m: for each prime p | m
  // the invertible fraction is prod_{i=1..dim} (1 - p^-i).
  auto fac = factorize_u64(m_);
  unsigned __int128 num = 1, den = 1;
  auto gcd128 = [](unsigned __int128 a, unsigned __int128 b) {
    while (b) {
      auto t = a % b;
      a = b;
      b = t;
    }
    return a;
  };
  for (auto [p, e] : fac) {
    (void)e;
    unsigned __int128 pi = 1;
    for (int i = 1; i <= dim_; ++i) {
      pi *= p;
      num *= pi - 1;
      den *= pi;
      auto g = gcd128(num, den);
      num /= g;
      den /= g;
    }
  }
  pseudo_field_ = (den - num) * 65536 <= den;
  while (den > ~uint64_t{0} || num > ~uint64_t{0}) {  // reporting only
    num >>= 1;
    den >>= 1;
  }
  unit_fraction_ = {static_cast<uint64_t>(num), static_cast<uint64_t>(den)};

  field_ = dim_ == 1 && is_prime_u64(m_);
  // Concrete pseudo-field gate: unit fraction >= 1 - 2^-16, applied above.
  pseudo_field_ = pseudo_field_ || field_ || opts.force_pseudo_field;
  has_inverse_ = dim_ <= 4;  // matrix inverse via adjugate, small dims only
}

RingOracle RingOracle::make_zm(uint64_t m, FamilyOptions opts) {
  if (m < 2) throw std::invalid_argument("ring modulus must be >= 2");
  RingOracle r;
  r.kind_ = Kind::zm;
  r.m_ = m;
  r.dim_ = 1;
  r.id_.text = "zm:" + std::to_string(m);
  r.finish_setup(opts);
  return r;
}

RingOracle RingOracle::make_prime_field(uint64_t p, FamilyOptions opts) {
  if (!is_prime_u64(p)) throw std::invalid_argument("gf modulus must be prime");
  RingOracle r;
  r.kind_ = Kind::prime_field;
  r.m_ = p;
  r.dim_ = 1;
  r.id_.text = "gf:" + std::to_string(p);
  r.finish_setup(opts);
  return r;
}

RingOracle RingOracle::make_matrix(uint64_t m, int dim, FamilyOptions opts) {
  if (m < 2) throw std::invalid_argument("ring modulus must be >= 2");
  if (dim < 1) throw std::invalid_argument("matrix dimension must be >= 1");
  if (dim > 8) throw std::invalid_argument("matrix dimension too large");
  RingOracle r;
  r.kind_ = Kind::matrix;
  r.m_ = m;
  r.dim_ = dim;
  r.id_.text = "mat:" + std::to_string(m) + ":" + std::to_string(dim);
  r.finish_setup(opts);
  return r;
}

RingOracle RingOracle::parse_spec(const std::string& spec, FamilyOptions opts) {
  auto split = [](const std::string& s, char sep) {
    std::vector<std::string> parts;
    size_t start = 0;
    while (true) {
      size_t pos = s.find(sep, start);
      parts.push_back(s.substr(start, pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    return parts;
  };
  auto parts = split(spec, ':');
  auto to_u64 = [&](const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
      throw std::invalid_argument("bad ring spec: " + spec);
    return std::stoull(s);
  };
  if (parts.size() == 2 && parts[0] == "zm") return make_zm(to_u64(parts[1]), opts);
  if (parts.size() == 2 && parts[0] == "gf") return make_prime_field(to_u64(parts[1]), opts);
  if (parts.size() == 3 && parts[0] == "mat")
    return make_matrix(to_u64(parts[1]), static_cast<int>(to_u64(parts[2])), opts);
  throw std::invalid_argument("bad ring spec: " + spec + " (expected zm:<m>, gf:<p> or mat:<m>:<dim>)");
}

// ---------------------------------------------------------------------------
// Label codec

uint64_t RingOracle::perm_fwd(uint64_t x) const { return ((x * perm_mul_) ^ perm_xor_) & entry_mask_; }

uint64_t RingOracle::perm_inv(uint64_t y) const { return ((y ^ perm_xor_) * perm_mul_inv_) & entry_mask_; }

Label RingOracle::encode(std::span<const uint64_t> vals) const {
  std::vector<uint8_t> bytes(label_bytes_, 0);
  int bitpos = 0;
  for (uint64_t v : vals) write_bits(bytes, bitpos, perm_fwd(v), entry_bits_);
  return Label(std::move(bytes));
}

std::optional<std::vector<uint64_t>> RingOracle::decode(const Label& l) const {
  if (l.is_bottom()) return std::nullopt;
  if (static_cast<int>(l.bytes().size()) != label_bytes_) return std::nullopt;
  int n = dim_ * dim_;
  std::vector<uint64_t> vals(n);
  int bitpos = 0;
  for (int i = 0; i < n; ++i) {
    uint64_t raw = read_bits(l.bytes(), bitpos, entry_bits_);
    uint64_t v = perm_inv(raw);
    if (v >= m_) return std::nullopt;
    vals[i] = v;
  }
  // Padding bits beyond bit_length must be zero so the map stays one-to-one.
  for (int b = bitpos; b < label_bytes_ * 8; ++b) {
    if ((l.bytes()[b >> 3] >> (b & 7)) & 1) return std::nullopt;
  }
  return vals;
}

std::optional<uint64_t> RingOracle::to_index(const Label& l) const {
  if (!order_) return std::nullopt;
  auto vals = decode(l);
  if (!vals) return std::nullopt;
  uint64_t idx = 0;
  for (int i = dim_ * dim_ - 1; i >= 0; --i) idx = idx * m_ + (*vals)[i];
  return idx;
}

Label RingOracle::from_index(uint64_t v) const {
  int n = dim_ * dim_;
  std::vector<uint64_t> vals(n);
  for (int i = 0; i < n; ++i) {
    vals[i] = v % m_;
    v /= m_;
  }
  return encode(vals);
}

Label RingOracle::from_entries(std::span<const uint64_t> vals) const {
  if (static_cast<int>(vals.size()) != dim_ * dim_) return Label::bottom();
  for (uint64_t v : vals)
    if (v >= m_) return Label::bottom();
  return encode(vals);
}

std::optional<Label> RingOracle::invalid_label() const {
  if (!std::has_single_bit(m_)) {
    std::vector<uint8_t> bytes(label_bytes_, 0);
    int bitpos = 0;
    write_bits(bytes, bitpos, perm_fwd(m_), entry_bits_);  // entry decoding to m, out of range
    for (int i = 1; i < dim_ * dim_; ++i) write_bits(bytes, bitpos, perm_fwd(0), entry_bits_);
    return Label(std::move(bytes));
  }
  if (id_.bit_length % 8 != 0) {
    std::vector<uint64_t> vals(dim_ * dim_, 0);
    Label l = encode(vals);
    std::vector<uint8_t> bytes = l.bytes();
    bytes[id_.bit_length / 8] |= static_cast<uint8_t>(1u << (id_.bit_length % 8));
    return Label(std::move(bytes));
  }
  return std::nullopt;  // every bit pattern names an element
}

// ---------------------------------------------------------------------------
// Arithmetic

Label RingOracle::binop(RingCmd cmd, const Label& a, const Label& b) const {
  auto va = decode(a);
  auto vb = decode(b);
  if (!va || !vb) return Label::bottom();
  int n = dim_;
  std::vector<uint64_t> out(n * n);
  switch (cmd) {
    case RingCmd::add:
      for (int i = 0; i < n * n; ++i) out[i] = addmod((*va)[i], (*vb)[i], m_);
      break;
    case RingCmd::subtract:
      for (int i = 0; i < n * n; ++i) out[i] = submod((*va)[i], (*vb)[i], m_);
      break;
    case RingCmd::multiply:
      if (n == 1) {
        out[0] = mulmod_u64((*va)[0], (*vb)[0], m_);
      } else {
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            uint64_t acc = 0;
            for (int l = 0; l < n; ++l) acc = addmod(acc, mulmod_u64((*va)[i * n + l], (*vb)[l * n + j], m_), m_);
            out[i * n + j] = acc;
          }
      }
      break;
    default:
      return Label::bottom();
  }
  return encode(out);
}

Label RingOracle::sample(Rng& rng) const {
  std::vector<uint64_t> vals(dim_ * dim_);
  for (auto& v : vals) v = rng.below(m_);
  return encode(vals);
}

Label RingOracle::one() const {
  std::vector<uint64_t> vals(dim_ * dim_, 0);
  for (int i = 0; i < dim_; ++i) vals[i * dim_ + i] = 1 % m_;
  return encode(vals);
}

Label RingOracle::zero() const { return encode(std::vector<uint64_t>(dim_ * dim_, 0)); }

namespace {

// Determinant over Z_m by cofactor expansion; fine for the small dims the
// matrix family supports.
uint64_t det_mod(const std::vector<uint64_t>& a, int n, uint64_t m) {
  if (n == 1) return a[0] % m;
  uint64_t det = 0;
  bool neg = false;
  std::vector<uint64_t> minor((n - 1) * (n - 1));
  for (int c = 0; c < n; ++c) {
    for (int i = 1; i < n; ++i) {
      int k = 0;
      for (int j = 0; j < n; ++j) {
        if (j == c) continue;
        minor[(i - 1) * (n - 1) + k++] = a[i * n + j];
      }
    }
    uint64_t term = mulmod_u64(a[c], det_mod(minor, n - 1, m), m);
    det = neg ? submod(det, term, m) : addmod(det, term, m);
    neg = !neg;
  }
  return det;
}

}  // namespace

Label RingOracle::invert(const Label& a) const {
  if (!has_inverse_) return Label::bottom();
  auto va = decode(a);
  if (!va) return Label::bottom();
  if (dim_ == 1) {
    auto inv = invmod((*va)[0], m_);
    if (!inv) return Label::bottom();
    return encode(std::vector<uint64_t>{*inv});
  }
  int n = dim_;
  uint64_t det = det_mod(*va, n, m_);
  auto det_inv = invmod(det, m_);
  if (!det_inv) return Label::bottom();
  std::vector<uint64_t> inv(n * n);
  std::vector<uint64_t> minor((n - 1) * (n - 1));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int k = 0;
      for (int r = 0; r < n; ++r) {
        if (r == i) continue;
        for (int c = 0; c < n; ++c) {
          if (c == j) continue;
          minor[k++] = (*va)[r * n + c];
        }
      }
      uint64_t cof = n == 1 ? 1 : det_mod(minor, n - 1, m_);
      if ((i + j) & 1) cof = submod(0, cof, m_);
      inv[j * n + i] = mulmod_u64(cof, *det_inv, m_);  // adjugate transpose
    }
  return encode(inv);
}

Label RingOracle::call(RingCmd cmd, std::span<const Label> args, Rng* rng) const {
  switch (cmd) {
    case RingCmd::add:
    case RingCmd::subtract:
    case RingCmd::multiply:
      if (args.size() != 2) return Label::bottom();
      return binop(cmd, args[0], args[1]);
    case RingCmd::sample:
      if (!args.empty() || rng == nullptr) return Label::bottom();
      return sample(*rng);
    case RingCmd::one:
      if (!args.empty()) return Label::bottom();
      return one();
    case RingCmd::invert:
      if (args.size() != 1) return Label::bottom();
      return invert(args[0]);
  }
  return Label::bottom();
}

double unit_fraction_estimate(const RingOracle& oracle, int trials, Rng& rng) {
  if (trials <= 0) return 0.0;
  int units = 0;
  for (int i = 0; i < trials; ++i) {
    Label x = oracle.sample(rng);
    if (!oracle.invert(x).is_bottom()) ++units;
  }
  return static_cast<double>(units) / trials;
}

}  // namespace ringmpc
