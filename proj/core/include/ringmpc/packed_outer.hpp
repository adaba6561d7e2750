#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "ringmpc/circuit.hpp"
#include "ringmpc/packed.hpp"

namespace ringmpc {
namespace packed {

/// Where to inject a single corrupted share (test hook).
struct CorruptSpec {
  enum class Stage { none, open, reshare, output };
  Stage stage = Stage::none;
  int server = 0;

  static CorruptSpec parse(const std::string& text);  // "none" | "open:3" | ...
};

struct OuterOptions {
  ReplicationMode proof_mode = ReplicationMode::typewise;
  /// Draw proof challenges from the opposite client's stream instead of the
  /// shared public-coin stream.
  bool challenge_by_other_client = false;
  /// Reveal a*(1-a) for every input block and abort unless it is all zero.
  bool boolean_input_check = false;
  CorruptSpec corrupt;
};

struct OuterResult {
  std::map<int, Fe> outputs;  // wire id -> value, for all annotated outputs
  std::optional<AbortInfo> abort;
  uint64_t elements = 0;  // field elements moved between parties
  int layers = 0;

  std::string abort_json() const;
};

/// Two clients evaluate a circuit through n simulated servers on packed
/// shares: inputs are dealt in blocks, every layer is computed entrywise on
/// block pairs (products locally raise the degree and are blinded before one
/// client reconstructs, rearranges and reshares them), and outputs are
/// delivered to their annotated client after a degree check. Every dealt
/// vector travels with a blinded-combination proof; any failed check aborts
/// the run.
OuterResult run_outer_protocol(const ArithCircuit& circuit, const std::map<int, Fe>& inputs,
                               const PackedParams& pp, uint64_t seed, const OuterOptions& opts = {});

}  // namespace packed
}  // namespace ringmpc
