#include <boost/multiprecision/miller_rabin.hpp>
#include <sstream>

#include "ringmpc/homenc.hpp"

namespace ringmpc {

namespace {

const uint32_t kSmallPrimes[] = {3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                                 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113};

BigInt gen_prime(int bits, Rng& rng) {
  std::mt19937_64 mr_gen(rng.next_u64());
  while (true) {
    BigInt cand = bigint_below(rng, BigInt(1) << (bits - 1)) | (BigInt(1) << (bits - 1)) | 1;
    bool ok = true;
    for (uint32_t p : kSmallPrimes) {
      if (cand % p == 0 && cand != p) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    if (boost::multiprecision::miller_rabin_test(cand, 64, mr_gen)) return cand;
  }
}

BigInt bytes_to_bigint(const std::vector<uint8_t>& b) {
  BigInt v = 0;
  import_bits(v, b.begin(), b.end());
  return v;
}

std::vector<uint8_t> bigint_to_bytes(const BigInt& v) {
  std::vector<uint8_t> b;
  export_bits(v, std::back_inserter(b), 8);
  return b;
}

class ToyPaillier final : public UncontrolledHe {
 public:
  std::string name() const override { return "paillier-toy"; }

  void keygen(int k_prime, Rng& rng, uint64_t prime_bits_override) override {
    int bits = prime_bits_override ? static_cast<int>(prime_bits_override)
                                   : std::max(64, k_prime / 2 + 2);
    p_ = gen_prime(bits, rng);
    do {
      q_ = gen_prime(bits, rng);
    } while (q_ == p_);
    n_ = p_ * q_;
    n2_ = n_ * n_;
    lambda_ = lcm(p_ - 1, q_ - 1);
    // With generator 1 + n, decryption scales by lambda^-1 mod n.
    mu_ = inverse_mod(lambda_ % n_, n_);
    if (n_ <= (BigInt(1) << k_prime))
      throw std::invalid_argument("paillier keygen: modulus too small for k'");
  }

  bool ready() const override { return n_ != 0; }
  BigInt plaintext_modulus() const override { return n_; }

  HeCiphertext encrypt(const BigInt& x, Rng& rng) const override {
    require_ready();
    if (x < 0 || x >= n_) throw ProtocolAbort({"he-encrypt", "plaintext out of range", {}});
    BigInt r = sample_unit(rng);
    // (1 + n)^x = 1 + x*n (mod n^2)
    BigInt rn = powm(r, n_, n2_);
    BigInt ct = ((1 + x * n_) % n2_) * rn % n2_;
    return HeCiphertext{bigint_to_bytes(ct)};
  }

  BigInt decrypt(const HeCiphertext& ct) const override {
    require_ready();
    BigInt c = bytes_to_bigint(ct.blob);
    if (c <= 0 || c >= n2_ || gcd(c, n_) != 1) throw ProtocolAbort({"he-decrypt", "malformed ciphertext", {}});
    BigInt u = BigInt(powm(c, lambda_, n2_));
    BigInt l = (u - 1) / n_;
    return l * mu_ % n_;
  }

  HeCiphertext add(const HeCiphertext& c1, const HeCiphertext& c2, Rng& rng) const override {
    require_ready();
    BigInt a = bytes_to_bigint(c1.blob), b = bytes_to_bigint(c2.blob);
    BigInt ct = a * b % n2_;
    BigInt rn = powm(sample_unit(rng), n_, n2_);
    ct = ct * rn % n2_;  // re-randomize
    return HeCiphertext{bigint_to_bytes(ct)};
  }

  HeCiphertext scale(const HeCiphertext& c, const BigInt& alpha, Rng& rng) const override {
    require_ready();
    BigInt a = bytes_to_bigint(c.blob);
    BigInt e = alpha % n_;
    if (e < 0) e += n_;
    BigInt ct = BigInt(powm(a, e, n2_));
    BigInt rn = powm(sample_unit(rng), n_, n2_);
    ct = ct * rn % n2_;
    return HeCiphertext{bigint_to_bytes(ct)};
  }

  std::string key_json() const override {
    std::ostringstream os;
    os << "{\"scheme\":\"paillier-toy\",\"insecure_test_fixture\":true,\"n\":\"" << n_.str() << "\",\"p\":\""
       << p_.str() << "\",\"q\":\"" << q_.str() << "\",\"lambda\":\"" << lambda_.str() << "\"}";
    return os.str();
  }

 private:
  void require_ready() const {
    if (!ready()) throw std::logic_error("paillier: keygen not run");
  }

  BigInt sample_unit(Rng& rng) const {
    while (true) {
      BigInt r = bigint_below(rng, n_);
      if (r != 0 && gcd(r, n_) == 1) return r;
    }
  }

  static BigInt inverse_mod(const BigInt& a, const BigInt& m) {
    BigInt t = 0, newt = 1, r = m, newr = a % m;
    while (newr != 0) {
      BigInt quot = r / newr;
      BigInt tmp = t - quot * newt;
      t = newt;
      newt = tmp;
      tmp = r - quot * newr;
      r = newr;
      newr = tmp;
    }
    if (r != 1) throw std::invalid_argument("inverse_mod: not invertible");
    if (t < 0) t += m;
    return t;
  }

  BigInt p_, q_, n_ = 0, n2_, lambda_, mu_;
};

}  // namespace

std::unique_ptr<UncontrolledHe> make_toy_paillier() { return std::make_unique<ToyPaillier>(); }

}  // namespace ringmpc
