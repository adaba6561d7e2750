#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ringmpc/pdtshr.hpp"
#include "ringmpc/session.hpp"

namespace ringmpc {

struct CircuitParseError : std::runtime_error {
  CircuitParseError(int line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line(line) {}
  int line;
};

/// Arithmetic circuit over an abstract ring: a DAG of add/sub/mul gates plus
/// an optional constant-one gate, with party-annotated inputs and outputs.
///
/// Text format, one statement per line ('#' starts a comment):
///   RING <spec>            optional header
///   INPUT <party> <wire>
///   ONE <wire>
///   ADD|SUB|MUL <out> <in1> <in2>
///   OUTPUT <party> <wire>
/// Parties are A and B (or 0 and 1). Wires are named; every wire must be
/// defined before use, which also rules out cycles.
struct ArithCircuit {
  enum class Op { add, sub, mul, one };
  struct Gate {
    Op op;
    int out, in1 = -1, in2 = -1;
  };
  struct Port {
    int wire;
    int party;
  };

  int num_wires = 0;
  std::vector<std::string> wire_names;
  std::vector<Gate> gates;  // topological order
  std::vector<Port> inputs;
  std::vector<Port> outputs;
  std::optional<std::string> ring_spec;

  /// Multiplication gates on the deepest input-to-output path.
  int mult_depth = 0;
  /// Per-wire multiplicative level (0 for inputs).
  std::vector<int> wire_level;

  static ArithCircuit parse(const std::string& text);
  std::string to_text() const;
};

/// Reference evaluation through the oracle. If any input label is invalid
/// the whole mapping is bottom; bottom also propagates through gates.
std::map<int, Label> eval_plain(const ArithCircuit& c, const std::map<int, Label>& inputs, RingCtx ring);

/// Groups 2 * mul_count product instances into batches of width t, padding
/// the tail with -1 slots. Instances 2g and 2g+1 belong to mul gate g.
std::vector<std::vector<int>> batch_scheduler(int mul_count, int t);

struct SharedEvalResult {
  std::map<int, Label> outputs;  // wire -> opened value (at the annotated party)
  std::optional<AbortInfo> abort;
  uint64_t backend_runs = 0;      // protocol invocations (batches for batched backends)
  uint64_t gate_elements = 0;     // ring elements sent during gate evaluation
  uint64_t open_elements = 0;     // ring elements sent while opening outputs
  uint64_t input_elements = 0;    // ring elements sent while sharing inputs
  int rounds = 0;
};

/// Two-party evaluation over additive shares: inputs are shared by their
/// owners, linear gates are local, each multiplication costs two backend
/// product-sharings (batched per multiplicative layer when the backend packs
/// several instances per run), outputs are opened only to the annotated
/// receiver.
SharedEvalResult eval_shared(const ArithCircuit& c, const std::map<int, Label>& inputs_a,
                             const std::map<int, Label>& inputs_b, Session& s,
                             ProductShareBackend& backend);

}  // namespace ringmpc
