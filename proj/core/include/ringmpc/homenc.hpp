#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <memory>
#include <string>
#include <vector>

#include "ringmpc/pdtshr.hpp"
#include "ringmpc/session.hpp"
#include "ringmpc/stat_encoding.hpp"

namespace ringmpc {

using BigInt = boost::multiprecision::cpp_int;

struct HeCiphertext {
  std::vector<uint8_t> blob;
};

/// Additively homomorphic encryption whose plaintext ring is chosen by the
/// caller at key generation. Protocol code sees nothing but these four
/// operations plus keygen.
class ControlledHe {
 public:
  virtual ~ControlledHe() = default;
  virtual std::string name() const = 0;
  virtual void keygen(const RingOracle& oracle, int security_k, Rng& rng) = 0;
  virtual bool ready() const = 0;
  virtual HeCiphertext encrypt(const Label& x, Rng& rng) const = 0;
  virtual Label decrypt(const HeCiphertext& ct) const = 0;
  /// Ciphertext combination: decrypts to x1 + x2.
  virtual HeCiphertext add(const HeCiphertext& c1, const HeCiphertext& c2, Rng& rng) const = 0;
  /// Scalar combination: decrypts to x * alpha.
  virtual HeCiphertext scale(const HeCiphertext& c, const Label& alpha, Rng& rng) const = 0;
  /// Key material as JSON (insecure test fixture format).
  virtual std::string key_json() const = 0;
};

/// INSECURE stand-in backend: ciphertexts carry the plaintext label next to
/// a random nonce. It exists to validate protocol logic over arbitrary ring
/// families, nothing more.
std::unique_ptr<ControlledHe> make_mock_controlled_he();

/// Additively homomorphic encryption whose plaintext modulus N is an output
/// of key generation (keygen guarantees N > 2^k').
class UncontrolledHe {
 public:
  virtual ~UncontrolledHe() = default;
  virtual std::string name() const = 0;
  /// prime_bits_override = 0 derives the prime size from k'.
  virtual void keygen(int k_prime, Rng& rng, uint64_t prime_bits_override = 0) = 0;
  virtual bool ready() const = 0;
  virtual BigInt plaintext_modulus() const = 0;  // N
  virtual HeCiphertext encrypt(const BigInt& x, Rng& rng) const = 0;
  virtual BigInt decrypt(const HeCiphertext& ct) const = 0;
  virtual HeCiphertext add(const HeCiphertext& c1, const HeCiphertext& c2, Rng& rng) const = 0;
  virtual HeCiphertext scale(const HeCiphertext& c, const BigInt& alpha, Rng& rng) const = 0;
  virtual std::string key_json() const = 0;
};

/// Toy Paillier instance over N = p*q with deterministic test primes drawn
/// from the seeded stream (trial division plus 64 Miller-Rabin rounds).
/// Combinations re-randomize, so combined ciphertexts are distributed
/// exactly like fresh encryptions.
std::unique_ptr<UncontrolledHe> make_toy_paillier();

/// Uniform value in [0, bound) from the seeded stream.
BigInt bigint_below(Rng& rng, const BigInt& bound);

// -- protocols ---------------------------------------------------------------

/// Product sharing from controlled-ring HE: the left party sends an
/// encryption of a, the right party returns an encryption of a*b + r built
/// with two combine calls and outputs -r. Two ciphertexts cross the wire.
/// he must have keys for the session's ring family.
ShareOutcome theta_protocol(Session& s, int left, int right, ControlledHe& he, const Label& a,
                            const Label& b);

/// Security parameter for the uncontrolled-ring protocol at modulus M:
/// ceil(2 log2 M) + 2 + k.
int psi_kprime(uint64_t M, int stat_k);

/// Product sharing over Z_M (standard representation) from uncontrolled-ring
/// HE at plaintext modulus N > 4 * 2^k * M^2: the right party blinds a*b with
/// r + s*M where s ranges over Z_{2 * 2^k * M}, so the decrypted value mod M
/// is a*b + r while the integer itself statistically hides a*b mod M's
/// overflow pattern. Session ring must be a zm family.
ShareOutcome psi_protocol(Session& s, int left, int right, UncontrolledHe& he, const Label& a,
                          const Label& b, int stat_k);

/// Entrywise extension to dim x dim matrices over Z_M: left encrypts its
/// dim^2 entries, right returns dim^2 blinded product entries. Session ring
/// must be a matrix family.
ShareOutcome psi_matrix(Session& s, int left, int right, UncontrolledHe& he, const Label& a,
                        const Label& b, int stat_k);

int psi_matrix_kprime(uint64_t M, int dim, int stat_k);

/// Exact statistical distance between (a*b + r + s*M) and ((a*b + r mod M)
/// + s*M) for uniform s in [0, 2 * 2^k * M), by enumeration over s.
/// Restricted to M <= 8 and k <= 6.
Rational blinding_distance_bruteforce(uint64_t M, int stat_k, uint64_t a, uint64_t b, uint64_t r);

/// Worst case of the above over all (a, b, r) in Z_M^3.
Rational blinding_distance_worstcase(uint64_t M, int stat_k);

}  // namespace ringmpc
