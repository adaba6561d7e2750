#include "ringmpc/circuit.hpp"

#include <algorithm>
#include <sstream>

namespace ringmpc {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream is(line);
  std::string t;
  while (is >> t) {
    if (t[0] == '#') break;
    toks.push_back(t);
  }
  return toks;
}

int parse_party(const std::string& s, int line_no) {
  if (s == "A" || s == "a" || s == "0") return 0;
  if (s == "B" || s == "b" || s == "1") return 1;
  throw CircuitParseError(line_no, "unknown party '" + s + "'");
}

}  // namespace

ArithCircuit ArithCircuit::parse(const std::string& text) {
  ArithCircuit c;
  std::map<std::string, int> wire_of;
  std::map<int, int> def_line;

  auto define_wire = [&](const std::string& name, int line_no) {
    if (wire_of.count(name)) throw CircuitParseError(line_no, "wire '" + name + "' defined twice");
    int id = c.num_wires++;
    wire_of[name] = id;
    c.wire_names.push_back(name);
    def_line[id] = line_no;
    return id;
  };
  auto use_wire = [&](const std::string& name, int line_no) {
    auto it = wire_of.find(name);
    if (it == wire_of.end())
      throw CircuitParseError(line_no, "wire '" + name + "' used before definition");
    return it->second;
  };

  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  std::vector<int> out_wires;
  while (std::getline(is, line)) {
    ++line_no;
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    const std::string& kw = toks[0];
    if (kw == "RING") {
      if (toks.size() != 2) throw CircuitParseError(line_no, "RING takes one argument");
      c.ring_spec = toks[1];
    } else if (kw == "INPUT") {
      if (toks.size() != 3) throw CircuitParseError(line_no, "INPUT takes <party> <wire>");
      int party = parse_party(toks[1], line_no);
      c.inputs.push_back({define_wire(toks[2], line_no), party});
    } else if (kw == "ONE") {
      if (toks.size() != 2) throw CircuitParseError(line_no, "ONE takes <wire>");
      c.gates.push_back({Op::one, define_wire(toks[1], line_no)});
    } else if (kw == "ADD" || kw == "SUB" || kw == "MUL") {
      if (toks.size() != 4) throw CircuitParseError(line_no, kw + " takes <out> <in1> <in2>");
      int in1 = use_wire(toks[2], line_no);
      int in2 = use_wire(toks[3], line_no);
      int out = define_wire(toks[1], line_no);
      Op op = kw == "ADD" ? Op::add : kw == "SUB" ? Op::sub : Op::mul;
      c.gates.push_back({op, out, in1, in2});
    } else if (kw == "OUTPUT") {
      if (toks.size() != 3) throw CircuitParseError(line_no, "OUTPUT takes <party> <wire>");
      int party = parse_party(toks[1], line_no);
      c.outputs.push_back({use_wire(toks[2], line_no), party});
    } else {
      throw CircuitParseError(line_no, "unknown statement '" + kw + "'");
    }
  }
  if (c.outputs.empty()) throw CircuitParseError(line_no, "circuit has no outputs");

  c.wire_level.assign(c.num_wires, 0);
  for (const auto& g : c.gates) {
    if (g.op == Op::one) continue;
    int lvl = std::max(c.wire_level[g.in1], c.wire_level[g.in2]);
    c.wire_level[g.out] = g.op == Op::mul ? lvl + 1 : lvl;
  }
  c.mult_depth = 0;
  for (const auto& o : c.outputs) c.mult_depth = std::max(c.mult_depth, c.wire_level[o.wire]);
  return c;
}

std::string ArithCircuit::to_text() const {
  std::ostringstream os;
  if (ring_spec) os << "RING " << *ring_spec << "\n";
  for (const auto& p : inputs) os << "INPUT " << (p.party == 0 ? "A" : "B") << " " << wire_names[p.wire] << "\n";
  for (const auto& g : gates) {
    switch (g.op) {
      case Op::one: os << "ONE " << wire_names[g.out] << "\n"; break;
      case Op::add: os << "ADD " << wire_names[g.out] << " " << wire_names[g.in1] << " " << wire_names[g.in2] << "\n"; break;
      case Op::sub: os << "SUB " << wire_names[g.out] << " " << wire_names[g.in1] << " " << wire_names[g.in2] << "\n"; break;
      case Op::mul: os << "MUL " << wire_names[g.out] << " " << wire_names[g.in1] << " " << wire_names[g.in2] << "\n"; break;
    }
  }
  for (const auto& p : outputs) os << "OUTPUT " << (p.party == 0 ? "A" : "B") << " " << wire_names[p.wire] << "\n";
  return os.str();
}

std::map<int, Label> eval_plain(const ArithCircuit& c, const std::map<int, Label>& inputs, RingCtx ring) {
  std::vector<Label> values(c.num_wires);
  bool poisoned = false;
  for (const auto& p : c.inputs) {
    auto it = inputs.find(p.wire);
    if (it == inputs.end() || !ring.oracle().is_valid(it->second)) {
      poisoned = true;  // whole mapping is bottom on an invalid input
      continue;
    }
    values[p.wire] = it->second;
  }
  std::map<int, Label> out;
  if (poisoned) {
    for (const auto& o : c.outputs) out[o.wire] = Label::bottom();
    return out;
  }
  for (const auto& g : c.gates) {
    switch (g.op) {
      case ArithCircuit::Op::one: values[g.out] = ring.one(); break;
      case ArithCircuit::Op::add: values[g.out] = ring.add(values[g.in1], values[g.in2]); break;
      case ArithCircuit::Op::sub: values[g.out] = ring.sub(values[g.in1], values[g.in2]); break;
      case ArithCircuit::Op::mul: values[g.out] = ring.mul(values[g.in1], values[g.in2]); break;
    }
  }
  for (const auto& o : c.outputs) out[o.wire] = values[o.wire];
  return out;
}

std::vector<std::vector<int>> batch_scheduler(int mul_count, int t) {
  if (t < 1) throw std::invalid_argument("batch_scheduler: t must be positive");
  const int instances = 2 * mul_count;
  const int batches = (instances + t - 1) / t;
  std::vector<std::vector<int>> out;
  out.reserve(batches);
  int next = 0;
  for (int b = 0; b < batches; ++b) {
    std::vector<int> batch(t, -1);
    for (int i = 0; i < t && next < instances; ++i) batch[i] = next++;
    out.push_back(std::move(batch));
  }
  return out;
}

SharedEvalResult eval_shared(const ArithCircuit& c, const std::map<int, Label>& inputs_a,
                             const std::map<int, Label>& inputs_b, Session& s,
                             ProductShareBackend& backend) {
  SharedEvalResult res;
  auto ringA = s.ring(0);
  auto ringB = s.ring(1);
  const uint64_t backend_runs_before = backend.invocations();

  auto sent_elements = [&] { return s.party(0).stats().elements_sent + s.party(1).stats().elements_sent; };

  std::vector<Label> shareA(c.num_wires), shareB(c.num_wires);

  try {
    // Input sharing: the owner samples the counterpart's share and keeps the
    // difference.
    uint64_t mark = sent_elements();
    for (const auto& p : c.inputs) {
      const auto& pool = p.party == 0 ? inputs_a : inputs_b;
      auto it = pool.find(p.wire);
      if (it == pool.end()) throw std::invalid_argument("eval_shared: missing input for wire " + c.wire_names[p.wire]);
      if (p.party == 0) {
        Label other = ringA.sample();
        shareB[p.wire] = s.send_label(0, 1, other, "input-share");
        shareA[p.wire] = ringA.sub(it->second, other);
      } else {
        Label other = ringB.sample();
        shareA[p.wire] = s.send_label(1, 0, other, "input-share");
        shareB[p.wire] = ringB.sub(it->second, other);
      }
      if (shareA[p.wire].is_bottom() || shareB[p.wire].is_bottom())
        throw ProtocolAbort({"input-share", "invalid input label", {p.party}});
    }
    res.input_elements = sent_elements() - mark;

    // Gates run in multiplicative phases: the linear gates at level r are
    // local; the mul gates producing level r+1 all have ready inputs and can
    // be handed to the backend as one batch of product instances.
    mark = sent_elements();
    const bool comm = s.ring_oracle().commutative();
    auto run_linear = [&](const ArithCircuit::Gate& g) {
      switch (g.op) {
        case ArithCircuit::Op::one:
          shareA[g.out] = ringA.one();
          shareB[g.out] = ringB.zero();
          break;
        case ArithCircuit::Op::add:
          shareA[g.out] = ringA.add(shareA[g.in1], shareA[g.in2]);
          shareB[g.out] = ringB.add(shareB[g.in1], shareB[g.in2]);
          break;
        case ArithCircuit::Op::sub:
          shareA[g.out] = ringA.sub(shareA[g.in1], shareA[g.in2]);
          shareB[g.out] = ringB.sub(shareB[g.in1], shareB[g.in2]);
          break;
        default: break;
      }
    };

    for (int level = 0; level <= c.mult_depth; ++level) {
      for (const auto& g : c.gates) {
        if (g.op != ArithCircuit::Op::mul && c.wire_level[g.out] == level) run_linear(g);
      }
      std::vector<const ArithCircuit::Gate*> layer;
      for (const auto& g : c.gates) {
        if (g.op == ArithCircuit::Op::mul && c.wire_level[g.out] == level + 1) layer.push_back(&g);
      }
      if (layer.empty()) continue;

      // Two product instances per gate, covering the cross terms. On a
      // noncommutative ring the second instance runs with roles swapped so
      // the left operand stays on the left.
      std::vector<Label> left_in, right_in;
      std::vector<Label> left_in_sw, right_in_sw;
      for (const auto* g : layer) {
        left_in.push_back(shareA[g->in1]);
        right_in.push_back(shareB[g->in2]);
        if (comm) {
          left_in.push_back(shareA[g->in2]);
          right_in.push_back(shareB[g->in1]);
        } else {
          left_in_sw.push_back(shareB[g->in1]);
          right_in_sw.push_back(shareA[g->in2]);
        }
      }
      PackedShareOutcome fwd = backend.share_products(s, 0, 1, left_in, right_in);
      PackedShareOutcome swd;
      if (!comm) swd = backend.share_products(s, 1, 0, left_in_sw, right_in_sw);
      for (size_t i = 0; i < layer.size(); ++i) {
        const auto& g = *layer[i];
        Label alphaA, alphaB, betaA, betaB;
        if (comm) {
          alphaA = fwd.zA[2 * i];
          alphaB = fwd.zB[2 * i];
          betaA = fwd.zA[2 * i + 1];
          betaB = fwd.zB[2 * i + 1];
        } else {
          alphaA = fwd.zA[i];
          alphaB = fwd.zB[i];
          betaA = swd.zB[i];  // swapped run: zA lives at party B
          betaB = swd.zA[i];
        }
        shareA[g.out] = ringA.add(ringA.add(ringA.mul(shareA[g.in1], shareA[g.in2]), alphaA), betaA);
        shareB[g.out] = ringB.add(ringB.add(ringB.mul(shareB[g.in1], shareB[g.in2]), alphaB), betaB);
      }
    }
    res.gate_elements = sent_elements() - mark;

    // Output opening: the non-receiving party sends its share.
    mark = sent_elements();
    for (const auto& o : c.outputs) {
      if (o.party == 0) {
        Label other = s.send_label(1, 0, shareB[o.wire], "open");
        res.outputs[o.wire] = ringA.add(shareA[o.wire], other);
      } else {
        Label other = s.send_label(0, 1, shareA[o.wire], "open");
        res.outputs[o.wire] = ringB.add(shareB[o.wire], other);
      }
      if (res.outputs[o.wire].is_bottom())
        throw ProtocolAbort({"open", "bottom label in opened output", {o.party}});
    }
    res.open_elements = sent_elements() - mark;
  } catch (const ProtocolAbort& abort) {
    res.abort = abort.info();
  }
  res.backend_runs = backend.invocations() - backend_runs_before;
  res.rounds = s.rounds();
  return res;
}

}  // namespace ringmpc
