#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ringmpc/ring.hpp"

namespace ringmpc {

enum class PayloadKind { ring_elems, ot, bits, ciphertexts };

const char* payload_kind_name(PayloadKind k);

struct TranscriptEntry {
  int round = 0;
  int from = -1, to = -1;
  PayloadKind kind = PayloadKind::ring_elems;
  int count = 0;  // ring elements / offered OT strings / bits / ciphertexts
  std::string tag;
};

struct Transcript {
  std::vector<TranscriptEntry> entries;

  /// One JSON object per line: {"round":..,"from":..,"to":..,"kind":..,"count":..,"tag":..}
  std::string to_jsonl() const;
};

/// Per-party communication figures. OT payloads are tallied separately from
/// direct ring-element messages; k-of-n OTs are logged both as one invocation
/// and as their width in sub-invocations, since either accounting convention
/// is defensible.
struct CommStats {
  CommCounter oracle;
  uint64_t elements_sent = 0;
  uint64_t setup_elements_sent = 0;  // code/public-parameter payloads
  uint64_t bits_sent = 0;
  uint64_t ciphertexts_sent = 0;
  uint64_t ot_invocations = 0;       // as sender
  uint64_t ot_sub_invocations = 0;   // k-of-n counted as n
  uint64_t ot_elements_offered = 0;  // strings handed to the OT oracle
  uint64_t ot_elements_delivered = 0;  // as receiver
};

struct AbortInfo {
  std::string stage;
  std::string reason;
  std::vector<int> parties;

  std::string to_json() const;
};

/// Distinguished protocol abort; the harness converts it into an Abort
/// outcome rather than crashing.
class ProtocolAbort : public std::runtime_error {
 public:
  explicit ProtocolAbort(AbortInfo info) : std::runtime_error(info.stage + ": " + info.reason), info_(std::move(info)) {}
  const AbortInfo& info() const { return info_; }

 private:
  AbortInfo info_;
};

struct ViewItem {
  std::string scope;
  std::string name;
  std::vector<uint8_t> data;
};

/// Everything a passively corrupted party could report: its inputs, random
/// tape, received messages, and whatever memory survived erasure.
struct View {
  std::vector<ViewItem> inputs;
  std::vector<ViewItem> rand_tape;
  std::vector<ViewItem> received;
  std::vector<ViewItem> locals;

  bool mentions(std::string_view name) const;
  size_t total_items() const { return inputs.size() + rand_tape.size() + received.size() + locals.size(); }
};

/// One logical party: its own randomness stream, oracle-call counter, and an
/// erasable scoped memory. Erasing a scope overwrites the bytes, so a later
/// snapshot cannot recover them.
class Party : public SampleObserver {
 public:
  Party(int id, std::string role, Rng rng) : id_(id), role_(std::move(role)), rng_(std::move(rng)) {}

  void on_sample(const Label& value) override { note_rand(value.bytes()); }

  int id() const { return id_; }
  const std::string& role() const { return role_; }
  Rng& rng() { return rng_; }
  CommStats& stats() { return stats_; }
  const CommStats& stats() const { return stats_; }

  void push_scope(const std::string& name) { scopes_.push_back(name); }
  void pop_scope() {
    if (scopes_.empty()) throw std::logic_error("pop_scope on empty stack");
    scopes_.pop_back();
  }
  const std::string& scope() const;
  /// Overwrite and drop every record made under `name`.
  void erase_scope(const std::string& name);

  void note_input(const std::string& name, std::span<const uint8_t> data);
  void note_rand(std::span<const uint8_t> data);
  void note_received(const std::string& name, std::span<const uint8_t> data);
  void store(const std::string& name, const Label& value);
  void store_bytes(const std::string& name, std::span<const uint8_t> data);

  View view() const;

 private:
  friend class Session;
  enum class ItemKind { input, rand, received, local };
  struct Item {
    ItemKind kind;
    std::string scope, name;
    std::vector<uint8_t> data;
    bool erased = false;
  };

  int id_;
  std::string role_;
  Rng rng_;
  CommStats stats_;
  std::vector<std::string> scopes_;
  std::vector<Item> items_;
};

struct OtLogEntry {
  enum class Type { one_of_two, k_of_n };
  Type type;
  int n = 0;  // offered strings
  int k = 0;  // delivered strings
};

/// In-process deterministic protocol harness over a black-box ring family.
/// Parties exchange messages and invoke an ideal OT through the session so
/// every payload is logged, counted, and (for tests) corruptible in flight.
/// Scheduling is synchronous; the round counter advances when the sending
/// direction changes.
class Session {
 public:
  Session(const RingOracle& ring, uint64_t seed, int num_parties = 2);

  const RingOracle& ring_oracle() const { return *ring_; }
  int num_parties() const { return static_cast<int>(parties_.size()); }
  Party& party(int i) { return *parties_.at(i); }

  /// Counted oracle handle for one party; samples drawn through it land on
  /// the party's random tape.
  RingCtx ring(int party);

  // -- direct messages ------------------------------------------------------
  Label send_label(int from, int to, const Label& x, const std::string& tag = "elem");
  std::vector<Label> send_labels(int from, int to, std::span<const Label> xs, const std::string& tag = "elems");
  /// Public parameters (generator matrices, evaluation points): logged but
  /// tallied apart from the protocol's per-instance element traffic.
  std::vector<Label> send_setup_labels(int from, int to, std::span<const Label> xs,
                                       const std::string& tag = "setup");
  void send_bits(int from, int to, std::span<const uint8_t> payload, const std::string& tag = "bits");
  std::vector<uint8_t> send_ciphertext(int from, int to, std::span<const uint8_t> blob,
                                       const std::string& tag = "ct");

  // -- ideal oblivious transfer --------------------------------------------
  Label ot_1of2(int sender, const Label& m0, const Label& m1, int receiver, int choice);
  /// chosen must hold distinct in-range indices; returns messages in the
  /// order of `chosen`. When decompose is set the transfer runs as n
  /// parallel 1-of-2 instances instead of one monolithic call.
  std::vector<Label> ot_kofn(int sender, std::span<const Label> msgs, int receiver,
                             const std::vector<int>& chosen, bool decompose = false);

  const std::vector<OtLogEntry>& ot_log() const { return ot_log_; }
  const Transcript& transcript() const { return transcript_; }
  int rounds() const { return round_; }

  CommStats total_stats() const;

  View capture_view(int party) const { return parties_.at(party)->view(); }

  /// Test hook: mutate the next label sent with send_label(s).
  void corrupt_next_label(std::function<Label(const Label&)> fn) { corrupt_ = std::move(fn); }

 private:
  void log(int from, int to, PayloadKind kind, int count, const std::string& tag);

  const RingOracle* ring_;
  std::vector<std::unique_ptr<Party>> parties_;
  Transcript transcript_;
  std::vector<OtLogEntry> ot_log_;
  std::function<Label(const Label&)> corrupt_;
  int round_ = 0;
  int last_from_ = -1;
};

// -- standalone ideal OT (string flavoured, with its own log) ---------------

class OtOracle {
 public:
  std::string ot_1of2(const std::string& m0, const std::string& m1, int choice);
  std::vector<std::string> ot_kofn(std::span<const std::string> msgs, const std::vector<int>& chosen,
                                   bool decompose = false);
  const std::vector<OtLogEntry>& log() const { return log_; }

 private:
  std::vector<OtLogEntry> log_;
};

}  // namespace ringmpc
