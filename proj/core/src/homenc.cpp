#include "ringmpc/homenc.hpp"

#include <map>
#include <sstream>
#include <stdexcept>

namespace ringmpc {

BigInt bigint_below(Rng& rng, const BigInt& bound) {
  if (bound <= 0) throw std::invalid_argument("bigint_below: bound must be positive");
  size_t bits = msb(bound) + 1;
  size_t words = (bits + 63) / 64;
  while (true) {
    BigInt v = 0;
    for (size_t i = 0; i < words; ++i) {
      v <<= 64;
      v |= BigInt(rng.next_u64());
    }
    v &= (BigInt(1) << bits) - 1;
    if (v < bound) return v;
  }
}

// ---------------------------------------------------------------------------
// Mock controlled-ring backend

namespace {

class MockControlledHe final : public ControlledHe {
 public:
  std::string name() const override { return "mock-insecure"; }

  void keygen(const RingOracle& oracle, int security_k, Rng& rng) override {
    oracle_ = &oracle;
    key_nonce_ = rng.next_u64();
    (void)security_k;
  }
  bool ready() const override { return oracle_ != nullptr; }

  HeCiphertext encrypt(const Label& x, Rng& rng) const override {
    require_ready();
    if (!oracle_->is_valid(x)) throw ProtocolAbort({"he-encrypt", "invalid plaintext label", {}});
    HeCiphertext ct;
    ct.blob = x.bytes();
    uint64_t nonce = rng.next_u64();
    for (int i = 0; i < 8; ++i) ct.blob.push_back(static_cast<uint8_t>(nonce >> (8 * i)));
    return ct;
  }

  Label decrypt(const HeCiphertext& ct) const override {
    require_ready();
    if (ct.blob.size() != static_cast<size_t>(oracle_->label_bytes()) + 8)
      throw ProtocolAbort({"he-decrypt", "malformed ciphertext", {}});
    Label x(std::vector<uint8_t>(ct.blob.begin(), ct.blob.end() - 8));
    if (!oracle_->is_valid(x)) throw ProtocolAbort({"he-decrypt", "invalid plaintext label", {}});
    return x;
  }

  HeCiphertext add(const HeCiphertext& c1, const HeCiphertext& c2, Rng& rng) const override {
    return encrypt(oracle_->add(decrypt(c1), decrypt(c2)), rng);
  }

  HeCiphertext scale(const HeCiphertext& c, const Label& alpha, Rng& rng) const override {
    return encrypt(oracle_->multiply(decrypt(c), alpha), rng);
  }

  std::string key_json() const override {
    std::ostringstream os;
    os << "{\"scheme\":\"mock-insecure\",\"ring\":\"" << (oracle_ ? oracle_->id().text : "") << "\",\"nonce\":\""
       << key_nonce_ << "\"}";
    return os.str();
  }

 private:
  void require_ready() const {
    if (!ready()) throw std::logic_error("mock he: keygen not run");
  }
  const RingOracle* oracle_ = nullptr;
  uint64_t key_nonce_ = 0;
};

}  // namespace

std::unique_ptr<ControlledHe> make_mock_controlled_he() { return std::make_unique<MockControlledHe>(); }

// ---------------------------------------------------------------------------
// Protocols

ShareOutcome theta_protocol(Session& s, int left, int right, ControlledHe& he, const Label& a,
                            const Label& b) {
  if (!he.ready()) throw std::invalid_argument("theta: keygen must run first");
  auto ringR = s.ring(right);

  HeCiphertext c = he.encrypt(a, s.party(left).rng());
  auto c_wire = s.send_ciphertext(left, right, c.blob, "enc-a");

  Label r = ringR.sample();
  HeCiphertext c_prime = he.encrypt(r, s.party(right).rng());
  HeCiphertext c_ab = he.scale(HeCiphertext{c_wire}, b, s.party(right).rng());
  HeCiphertext c_out = he.add(c_ab, c_prime, s.party(right).rng());
  auto c_out_wire = s.send_ciphertext(right, left, c_out.blob, "enc-ab-plus-r");

  ShareOutcome out;
  out.zA = he.decrypt(HeCiphertext{c_out_wire});
  out.zB = ringR.neg(r);
  s.party(left).store("z", out.zA);
  s.party(right).store("z", out.zB);
  return out;
}

int psi_kprime(uint64_t M, int stat_k) {
  int log2M_times2 = 0;
  // ceil(2 * log2(M)) = ceil(log2(M^2))
  unsigned __int128 m2 = static_cast<unsigned __int128>(M) * M;
  while ((static_cast<unsigned __int128>(1) << log2M_times2) < m2) ++log2M_times2;
  return log2M_times2 + 2 + stat_k;
}

int psi_matrix_kprime(uint64_t M, int dim, int stat_k) {
  int extra = 0;
  while ((1u << extra) < static_cast<unsigned>(dim)) ++extra;
  return psi_kprime(M, stat_k) + extra;
}

namespace {

BigInt pow2(int e) { return BigInt(1) << e; }

Label label_from_residue(const RingOracle& oracle, const BigInt& v, uint64_t M) {
  BigInt r = v % M;
  if (r < 0) r += M;
  uint64_t rv = r.convert_to<uint64_t>();
  return oracle.from_entries(std::vector<uint64_t>{rv});
}

}  // namespace

ShareOutcome psi_protocol(Session& s, int left, int right, UncontrolledHe& he, const Label& a,
                          const Label& b, int stat_k) {
  const RingOracle& oracle = s.ring_oracle();
  if (oracle.kind() == RingOracle::Kind::matrix)
    return psi_matrix(s, left, right, he, a, b, stat_k);
  const uint64_t M = oracle.modulus();
  if (!he.ready()) throw std::invalid_argument("psi: keygen must run first");
  BigInt N = he.plaintext_modulus();
  if (N <= BigInt(4) * pow2(stat_k) * M * M)
    throw std::invalid_argument("psi: plaintext modulus too small for M and k");

  auto ea = oracle.entries(a);
  auto eb = oracle.entries(b);
  if (!ea || !eb) throw ProtocolAbort({"psi-input", "invalid input label", {}});
  BigInt av = (*ea)[0], bv = (*eb)[0];

  HeCiphertext c = he.encrypt(av, s.party(left).rng());
  auto c_wire = s.send_ciphertext(left, right, c.blob, "enc-a");

  // Right side: blind with r mod M plus a lift s*M wide enough to hide the
  // integer value of a*b + r.
  auto ringR = s.ring(right);
  Label r_label = ringR.sample();
  BigInt r = (*oracle.entries(r_label))[0];
  BigInt s_lift = bigint_below(s.party(right).rng(), BigInt(2) * pow2(stat_k) * M);
  HeCiphertext c_ab = he.scale(HeCiphertext{c_wire}, bv, s.party(right).rng());
  HeCiphertext c_r = he.encrypt(r, s.party(right).rng());
  HeCiphertext c_sM = he.encrypt(s_lift * M, s.party(right).rng());
  HeCiphertext c_out = he.add(he.add(c_ab, c_r, s.party(right).rng()), c_sM, s.party(right).rng());
  auto c_out_wire = s.send_ciphertext(right, left, c_out.blob, "enc-blinded");

  ShareOutcome out;
  BigInt v = he.decrypt(HeCiphertext{c_out_wire});
  out.zA = label_from_residue(oracle, v, M);
  out.zB = ringR.neg(r_label);
  s.party(left).store("z", out.zA);
  s.party(right).store("z", out.zB);
  return out;
}

ShareOutcome psi_matrix(Session& s, int left, int right, UncontrolledHe& he, const Label& a,
                        const Label& b, int stat_k) {
  const RingOracle& oracle = s.ring_oracle();
  if (oracle.kind() != RingOracle::Kind::matrix)
    throw std::invalid_argument("psi_matrix: needs a matrix ring family");
  const uint64_t M = oracle.modulus();
  const int d = oracle.dim();
  if (!he.ready()) throw std::invalid_argument("psi: keygen must run first");
  BigInt N = he.plaintext_modulus();
  if (N <= BigInt(4) * pow2(stat_k) * M * M * d)
    throw std::invalid_argument("psi_matrix: plaintext modulus too small for M, dim and k");

  auto ea = oracle.entries(a);
  auto eb = oracle.entries(b);
  if (!ea || !eb) throw ProtocolAbort({"psi-input", "invalid input label", {}});

  // Left encrypts all of its entries.
  std::vector<HeCiphertext> enc_a(d * d);
  for (int i = 0; i < d * d; ++i) {
    enc_a[i] = he.encrypt(BigInt((*ea)[i]), s.party(left).rng());
    auto wire = s.send_ciphertext(left, right, enc_a[i].blob, "enc-a");
    enc_a[i].blob = wire;
  }

  // Right combines row-by-column, blinds every product entry, returns them.
  auto& rngR = s.party(right).rng();
  std::vector<uint64_t> r_entries(d * d);
  std::vector<HeCiphertext> enc_out(d * d);
  const BigInt s_range = BigInt(2) * pow2(stat_k) * M * d;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      HeCiphertext acc = he.scale(enc_a[i * d + 0], BigInt((*eb)[0 * d + j]), rngR);
      for (int l = 1; l < d; ++l)
        acc = he.add(acc, he.scale(enc_a[i * d + l], BigInt((*eb)[l * d + j]), rngR), rngR);
      uint64_t r = rngR.below(M);
      r_entries[i * d + j] = r;
      BigInt lift = bigint_below(rngR, s_range);
      acc = he.add(acc, he.encrypt(BigInt(r) + lift * M, rngR), rngR);
      enc_out[i * d + j] = acc;
    }
  for (int i = 0; i < d * d; ++i) {
    auto wire = s.send_ciphertext(right, left, enc_out[i].blob, "enc-blinded");
    enc_out[i].blob = wire;
  }

  std::vector<uint64_t> v_entries(d * d);
  for (int i = 0; i < d * d; ++i) {
    BigInt v = he.decrypt(enc_out[i]) % M;
    v_entries[i] = v.convert_to<uint64_t>();
  }
  std::vector<uint64_t> neg_r(d * d);
  for (int i = 0; i < d * d; ++i) neg_r[i] = (M - r_entries[i]) % M;

  ShareOutcome out;
  out.zA = oracle.from_entries(v_entries);
  out.zB = oracle.from_entries(neg_r);
  s.party(left).store("z", out.zA);
  s.party(right).store("z", out.zB);
  return out;
}

Rational blinding_distance_bruteforce(uint64_t M, int stat_k, uint64_t a, uint64_t b, uint64_t r) {
  if (M < 2 || M > 8 || stat_k < 0 || stat_k > 6)
    throw std::invalid_argument("blinding_distance_bruteforce: need 2 <= M <= 8 and k <= 6");
  if (a >= M || b >= M || r >= M) throw std::invalid_argument("blinding_distance_bruteforce: inputs mod M");
  const uint64_t S = 2 * (uint64_t{1} << stat_k) * M;
  const uint64_t exact = a * b + r;
  const uint64_t reduced = exact % M;
  std::map<uint64_t, int64_t> diff;
  for (uint64_t s = 0; s < S; ++s) {
    diff[exact + s * M] += 1;
    diff[reduced + s * M] -= 1;
  }
  int64_t abs_sum = 0;
  for (auto& [v, d] : diff) abs_sum += d < 0 ? -d : d;
  return Rational(abs_sum, 2 * static_cast<long long>(S));
}

Rational blinding_distance_worstcase(uint64_t M, int stat_k) {
  Rational worst(0);
  for (uint64_t a = 0; a < M; ++a)
    for (uint64_t b = 0; b < M; ++b)
      for (uint64_t r = 0; r < M; ++r) worst = std::max(worst, blinding_distance_bruteforce(M, stat_k, a, b, r));
  return worst;
}

}  // namespace ringmpc
