#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ringmpc/rng.hpp"

namespace ringmpc {

/// Opaque element identifier. A default-constructed Label is the bottom
/// value, which every operation propagates; protocols treat a bottom output
/// as an abort condition.
class Label {
 public:
  Label() = default;
  explicit Label(std::vector<uint8_t> bytes) : bytes_(std::move(bytes)), valid_(true) {}

  static Label bottom() { return Label(); }
  bool is_bottom() const { return !valid_; }

  const std::vector<uint8_t>& bytes() const { return bytes_; }

  bool operator==(const Label& o) const { return valid_ == o.valid_ && bytes_ == o.bytes_; }
  bool operator!=(const Label& o) const { return !(*this == o); }

  std::string hex() const;

 private:
  std::vector<uint8_t> bytes_;
  bool valid_ = false;
};

enum class RingCmd { add, subtract, multiply, sample, one, invert };

const char* ring_cmd_name(RingCmd cmd);

/// Per-party tally of oracle usage, one slot per command.
struct CommCounter {
  std::array<uint64_t, 6> by_cmd{};

  void bump(RingCmd cmd) { by_cmd[static_cast<size_t>(cmd)]++; }
  uint64_t calls(RingCmd cmd) const { return by_cmd[static_cast<size_t>(cmd)]; }
  uint64_t total() const {
    uint64_t t = 0;
    for (auto v : by_cmd) t += v;
    return t;
  }
  void reset() { by_cmd.fill(0); }
};

struct RingId {
  std::string text;  // e.g. "zm:97", "mat:5:2"
  int bit_length;    // every element label is exactly this many bits
};

struct FamilyOptions {
  // Nonzero key replaces the canonical label map with a keyed bijection on
  // the label space; the ring is unchanged, only its representation.
  uint64_t perm_key = 0;
  // Test hook: pretend the family passed the pseudo-field gate.
  bool force_pseudo_field = false;
};

/// Black-box ring family oracle. All arithmetic runs behind fixed-width
/// element labels; an input outside the image of the label map yields bottom.
/// Immutable after construction; sampling draws from a caller-supplied Rng so
/// concurrent parties can keep independent streams.
class RingOracle {
 public:
  enum class Kind { zm, prime_field, matrix };

  /// Integers mod m, m >= 2. Little-endian fixed-width labels.
  static RingOracle make_zm(uint64_t m, FamilyOptions opts = {});
  /// Prime field; rejects composite p.
  static RingOracle make_prime_field(uint64_t p, FamilyOptions opts = {});
  /// dim x dim matrices over Z_m, entrywise labels concatenated row-major.
  static RingOracle make_matrix(uint64_t m, int dim, FamilyOptions opts = {});
  /// Parse "zm:<m>", "gf:<p>" or "mat:<m>:<dim>".
  static RingOracle parse_spec(const std::string& spec, FamilyOptions opts = {});

  const RingId& id() const { return id_; }
  Kind kind() const { return kind_; }
  uint64_t modulus() const { return m_; }
  int dim() const { return dim_; }
  int label_bytes() const { return label_bytes_; }
  int label_bits() const { return id_.bit_length; }

  bool is_field() const { return field_; }
  bool is_pseudo_field() const { return pseudo_field_; }
  bool has_inverse() const { return has_inverse_; }
  bool commutative() const { return dim_ == 1; }
  /// |R| when it fits in 64 bits.
  std::optional<uint64_t> order() const { return order_; }
  /// Exact fraction of units, as (numerator, denominator).
  std::pair<uint64_t, uint64_t> unit_fraction() const { return unit_fraction_; }

  Label add(const Label& a, const Label& b) const { return binop(RingCmd::add, a, b); }
  Label subtract(const Label& a, const Label& b) const { return binop(RingCmd::subtract, a, b); }
  Label multiply(const Label& a, const Label& b) const { return binop(RingCmd::multiply, a, b); }
  Label sample(Rng& rng) const;
  Label one() const;
  Label zero() const;
  Label invert(const Label& a) const;
  Label negate(const Label& a) const { return subtract(zero(), a); }

  /// Generic command dispatcher; arity must match the command. sample needs
  /// an Rng. Unknown labels and unsupported commands yield bottom.
  Label call(RingCmd cmd, std::span<const Label> args, Rng* rng = nullptr) const;

  bool is_valid(const Label& l) const { return decode(l).has_value(); }

  /// Canonical index of an element (mixed-radix over entries). Bottom or
  /// invalid labels give nullopt.
  std::optional<uint64_t> to_index(const Label& l) const;
  Label from_index(uint64_t v) const;

  /// Standard representation view: entry values row-major (a single value
  /// for scalar rings). Only meaningful for protocols that are explicitly
  /// tied to the standard representation.
  std::optional<std::vector<uint64_t>> entries(const Label& l) const { return decode(l); }
  Label from_entries(std::span<const uint64_t> vals) const;

  /// A bit pattern that decodes to no element, when one exists.
  std::optional<Label> invalid_label() const;

 private:
  RingOracle() = default;
  Label binop(RingCmd cmd, const Label& a, const Label& b) const;
  std::optional<std::vector<uint64_t>> decode(const Label& l) const;
  Label encode(std::span<const uint64_t> vals) const;
  uint64_t perm_fwd(uint64_t x) const;
  uint64_t perm_inv(uint64_t y) const;
  void finish_setup(FamilyOptions opts);

  Kind kind_ = Kind::zm;
  uint64_t m_ = 2;
  int dim_ = 1;
  RingId id_;
  int entry_bits_ = 1;
  int label_bytes_ = 1;
  bool field_ = false;
  bool pseudo_field_ = false;
  bool has_inverse_ = false;
  std::optional<uint64_t> order_;
  std::pair<uint64_t, uint64_t> unit_fraction_{0, 1};
  // Keyed affine bijection on [0, 2^entry_bits), identity when key is 0.
  uint64_t perm_mul_ = 1, perm_xor_ = 0, perm_mul_inv_ = 1;
  uint64_t entry_mask_ = 1;
};

/// Receives a copy of every sampled element; parties use this to keep their
/// random tape capturable and erasable.
struct SampleObserver {
  virtual ~SampleObserver() = default;
  virtual void on_sample(const Label& value) = 0;
};

/// Counted, seeded handle onto an oracle: the view of one logical party.
/// Bumps the party's CommCounter on every call and draws sampling randomness
/// from the party's stream.
class RingCtx {
 public:
  RingCtx(const RingOracle& oracle, Rng& rng, CommCounter& counter, SampleObserver* observer = nullptr)
      : oracle_(&oracle), rng_(&rng), counter_(&counter), observer_(observer) {}

  const RingOracle& oracle() const { return *oracle_; }
  Rng& rng() { return *rng_; }
  CommCounter& counter() { return *counter_; }

  Label add(const Label& a, const Label& b) {
    counter_->bump(RingCmd::add);
    return oracle_->add(a, b);
  }
  Label sub(const Label& a, const Label& b) {
    counter_->bump(RingCmd::subtract);
    return oracle_->subtract(a, b);
  }
  Label mul(const Label& a, const Label& b) {
    counter_->bump(RingCmd::multiply);
    return oracle_->multiply(a, b);
  }
  Label sample() {
    counter_->bump(RingCmd::sample);
    Label x = oracle_->sample(*rng_);
    if (observer_) observer_->on_sample(x);
    return x;
  }
  Label one() {
    counter_->bump(RingCmd::one);
    return oracle_->one();
  }
  Label invert(const Label& a) {
    counter_->bump(RingCmd::invert);
    return oracle_->invert(a);
  }
  Label zero() { return sub(one(), one()); }
  Label neg(const Label& a) { return sub(zero(), a); }

 private:
  const RingOracle* oracle_;
  Rng* rng_;
  CommCounter* counter_;
  SampleObserver* observer_;
};

/// Fraction of `trials` sampled elements that turned out to be units.
/// Requires the invert command.
double unit_fraction_estimate(const RingOracle& oracle, int trials, Rng& rng);

// u64 modular helpers shared across the library.
uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m);
uint64_t powmod_u64(uint64_t a, uint64_t e, uint64_t m);
bool is_prime_u64(uint64_t n);
/// Prime factorization of n (pairs of prime, exponent), n >= 1.
std::vector<std::pair<uint64_t, int>> factorize_u64(uint64_t n);

}  // namespace ringmpc
