#include "ringmpc/packed_outer.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ringmpc {
namespace packed {

CorruptSpec CorruptSpec::parse(const std::string& text) {
  CorruptSpec spec;
  if (text.empty() || text == "none") return spec;
  auto colon = text.find(':');
  std::string stage = text.substr(0, colon);
  if (stage == "open") spec.stage = Stage::open;
  else if (stage == "reshare") spec.stage = Stage::reshare;
  else if (stage == "output") spec.stage = Stage::output;
  else throw std::invalid_argument("corrupt spec: unknown stage '" + stage + "'");
  if (colon != std::string::npos) spec.server = std::stoi(text.substr(colon + 1));
  return spec;
}

std::string OuterResult::abort_json() const {
  if (!abort) return "{}";
  return abort->to_json();
}

namespace {

enum class BlockKind { add, sub, mul, pass };

struct PlannedOp {
  BlockKind kind;
  std::vector<int> a_wires, b_wires;  // ell entries, -1 padding
  std::vector<int> out_wires;         // ell entries, -1 padding
};

struct LayerPlan {
  std::vector<PlannedOp> ops;
};

/// Layered schedule: every gate sits one layer after the latest of its
/// inputs; values needed later ride along in pass-through slots so each
/// layer only ever touches the previous layer's blocks.
struct CompiledCircuit {
  int depth = 0;
  std::vector<int> gate_layer;
  std::vector<LayerPlan> layers;             // index 1..depth
  std::vector<std::vector<int>> value_sets;  // wires alive entering layer h (index 0..depth)
};

CompiledCircuit compile(const ArithCircuit& c, const PackedParams& pp) {
  CompiledCircuit cc;
  const int ell = pp.ell;
  std::vector<int> wire_layer(c.num_wires, 0);
  cc.gate_layer.resize(c.gates.size(), 1);
  for (size_t gi = 0; gi < c.gates.size(); ++gi) {
    const auto& g = c.gates[gi];
    int lvl = 1;
    if (g.op != ArithCircuit::Op::one)
      lvl = 1 + std::max(wire_layer[g.in1], wire_layer[g.in2]);
    cc.gate_layer[gi] = lvl;
    wire_layer[g.out] = lvl;
    cc.depth = std::max(cc.depth, lvl);
  }
  if (cc.depth == 0) cc.depth = 1;  // wire-through circuits still take one pass

  // Last layer at which each wire is consumed (outputs live to the end).
  std::vector<int> last_use(c.num_wires, 0);
  for (size_t gi = 0; gi < c.gates.size(); ++gi) {
    const auto& g = c.gates[gi];
    if (g.op == ArithCircuit::Op::one) continue;
    last_use[g.in1] = std::max(last_use[g.in1], cc.gate_layer[gi]);
    last_use[g.in2] = std::max(last_use[g.in2], cc.gate_layer[gi]);
  }
  for (const auto& o : c.outputs) last_use[o.wire] = std::max(last_use[o.wire], cc.depth + 1);

  cc.value_sets.resize(cc.depth + 1);
  for (const auto& in : c.inputs) cc.value_sets[0].push_back(in.wire);

  cc.layers.resize(cc.depth + 1);
  for (int h = 1; h <= cc.depth; ++h) {
    LayerPlan& plan = cc.layers[h];
    std::vector<std::pair<BlockKind, const ArithCircuit::Gate*>> kinds[3];
    std::vector<const ArithCircuit::Gate*> ones;
    for (size_t gi = 0; gi < c.gates.size(); ++gi) {
      if (cc.gate_layer[gi] != h) continue;
      const auto& g = c.gates[gi];
      switch (g.op) {
        case ArithCircuit::Op::add: kinds[0].push_back({BlockKind::add, &g}); break;
        case ArithCircuit::Op::sub: kinds[1].push_back({BlockKind::sub, &g}); break;
        case ArithCircuit::Op::mul: kinds[2].push_back({BlockKind::mul, &g}); break;
        case ArithCircuit::Op::one: ones.push_back(&g); break;
      }
    }
    if (!ones.empty())
      throw std::invalid_argument("outer protocol: ONE gates are not supported, feed constants as inputs");

    auto pack = [&](const std::vector<std::pair<BlockKind, const ArithCircuit::Gate*>>& gs, BlockKind kind) {
      for (size_t base = 0; base < gs.size(); base += ell) {
        PlannedOp op;
        op.kind = kind;
        for (int e = 0; e < ell; ++e) {
          if (base + e < gs.size()) {
            const auto* g = gs[base + e].second;
            op.a_wires.push_back(g->in1);
            op.b_wires.push_back(g->in2);
            op.out_wires.push_back(g->out);
          } else {
            op.a_wires.push_back(-1);
            op.b_wires.push_back(-1);
            op.out_wires.push_back(-1);
          }
        }
        plan.ops.push_back(std::move(op));
      }
    };
    pack(kinds[0], BlockKind::add);
    pack(kinds[1], BlockKind::sub);
    pack(kinds[2], BlockKind::mul);

    // Pass-through slots for everything still needed after this layer.
    std::vector<int> passing;
    for (int w : cc.value_sets[h - 1]) {
      if (last_use[w] > h) passing.push_back(w);
    }
    for (size_t base = 0; base < passing.size(); base += ell) {
      PlannedOp op;
      op.kind = BlockKind::pass;
      for (int e = 0; e < ell; ++e) {
        int w = base + e < passing.size() ? passing[base + e] : -1;
        op.a_wires.push_back(w);
        op.b_wires.push_back(-1);
        op.out_wires.push_back(w);
      }
      plan.ops.push_back(std::move(op));
    }

    for (const auto& op : plan.ops)
      for (int w : op.out_wires)
        if (w >= 0) cc.value_sets[h].push_back(w);
  }
  return cc;
}

struct Location {
  int block;
  int entry;
};

/// Simulated run state; all "messages" tick the element tally.
struct OuterRun {
  const PackedParams& pp;
  const OuterOptions& opts;
  Rng alice_rng, bob_rng, coins;
  CommTally tally;
  bool corrupt_pending_open, corrupt_pending_reshare, corrupt_pending_output;

  OuterRun(const PackedParams& p, const OuterOptions& o, uint64_t seed)
      : pp(p),
        opts(o),
        alice_rng(Rng(seed).fork("alice")),
        bob_rng(Rng(seed).fork("bob")),
        coins(Rng(seed).fork("coins")),
        corrupt_pending_open(o.corrupt.stage == CorruptSpec::Stage::open),
        corrupt_pending_reshare(o.corrupt.stage == CorruptSpec::Stage::reshare),
        corrupt_pending_output(o.corrupt.stage == CorruptSpec::Stage::output) {}

  Rng& challenge_stream(bool dealer_is_alice) {
    if (!opts.challenge_by_other_client) return coins;
    return dealer_is_alice ? bob_rng : alice_rng;
  }
};

[[noreturn]] void abort_run(const AbortInfo& info) { throw ProtocolAbort(info); }

/// Degree-membership proof for freshly dealt vectors (dealer knows them).
void prove_dealt_degrees(OuterRun& run, const std::vector<const ShareVec*>& vecs, bool dealer_is_alice,
                         const std::string& stage) {
  if (vecs.empty()) return;
  // One proof per degree class.
  std::map<int, std::vector<std::vector<Fe>>> by_degree;
  for (const auto* v : vecs) by_degree[v->degree].push_back(v->shares);
  Rng& dealer_rng = dealer_is_alice ? run.alice_rng : run.bob_rng;
  for (auto& [deg, group] : by_degree) {
    VectorSpaceSpec space;
    space.comps = {{deg}};
    std::vector<Fe> blind = space.sample(run.pp, dealer_rng);
    run.tally.elements += static_cast<uint64_t>(run.pp.n);  // blinding vector dealt
    CheckResult r = prove_membership(run.pp, space, group, blind, group, blind,
                                     run.challenge_stream(dealer_is_alice), &run.tally);
    if (!r.accepted) {
      r.abort.stage = stage;
      abort_run(r.abort);
    }
  }
}

/// Consistency proof between already-shared source vectors and freshly dealt
/// target vectors: entry (src, f) must equal entry (dst, e).
struct EntryLink {
  const ShareVec* src;
  int src_entry;
  const ShareVec* dst;
  int dst_entry;
};

void prove_entry_links(OuterRun& run, const std::vector<EntryLink>& links, bool dealer_is_alice,
                       const std::string& stage) {
  std::map<std::tuple<int, int, int, int>, std::vector<const EntryLink*>> types;
  for (const auto& l : links)
    types[{l.src_entry, l.dst_entry, l.src->degree, l.dst->degree}].push_back(&l);
  Rng& dealer_rng = dealer_is_alice ? run.alice_rng : run.bob_rng;
  for (auto& [key, group] : types) {
    auto [fe, te, ds, dt] = key;
    VectorSpaceSpec space;
    space.comps = {{ds}, {dt}};
    space.eqs = {{0, run.pp.secret_point(fe), 1, run.pp.secret_point(te)}};
    std::vector<std::vector<Fe>> vecs;
    for (const auto* l : group) {
      std::vector<Fe> v = l->src->shares;
      v.insert(v.end(), l->dst->shares.begin(), l->dst->shares.end());
      vecs.push_back(std::move(v));
    }
    std::vector<Fe> blind = space.sample(run.pp, dealer_rng);
    run.tally.elements += static_cast<uint64_t>(run.pp.n) * 2;
    CheckResult r = prove_membership(run.pp, space, vecs, blind, vecs, blind,
                                     run.challenge_stream(dealer_is_alice), &run.tally);
    if (!r.accepted) {
      r.abort.stage = stage;
      abort_run(r.abort);
    }
  }
}

}  // namespace

OuterResult run_outer_protocol(const ArithCircuit& circuit, const std::map<int, Fe>& inputs,
                               const PackedParams& pp, uint64_t seed, const OuterOptions& opts) {
  OuterResult res;
  OuterRun run(pp, opts, seed);
  const PrimeField& F = pp.field;
  const int ell = pp.ell;
  const int delta = pp.delta;

  try {
    CompiledCircuit cc = compile(circuit, pp);
    res.layers = cc.depth;

    // -- input sharing -------------------------------------------------------
    std::vector<ShareVec> blocks;              // current value blocks (degree delta)
    std::map<int, Location> loc;               // wire -> (block, entry)
    std::vector<std::vector<int>> block_wires;  // entry wires per block

    for (int party = 0; party < 2; ++party) {
      std::vector<int> wires;
      for (const auto& in : circuit.inputs)
        if (in.party == party) wires.push_back(in.wire);
      Rng& rng = party == 0 ? run.alice_rng : run.bob_rng;
      for (size_t base = 0; base < wires.size(); base += ell) {
        Block b(ell, 0);
        std::vector<int> entry_wires(ell, -1);
        for (int e = 0; e < ell && base + e < wires.size(); ++e) {
          int w = wires[base + e];
          auto it = inputs.find(w);
          if (it == inputs.end())
            throw std::invalid_argument("outer protocol: missing input for wire " + circuit.wire_names[w]);
          b[e] = it->second % F.p();
          entry_wires[e] = w;
        }
        ShareVec sv = share_block(pp, rng, b, delta);
        run.tally.elements += static_cast<uint64_t>(pp.n);
        blocks.push_back(std::move(sv));
        block_wires.push_back(entry_wires);
        for (int e = 0; e < ell; ++e)
          if (entry_wires[e] >= 0) loc[entry_wires[e]] = {static_cast<int>(blocks.size()) - 1, e};
      }
      std::vector<const ShareVec*> ptrs;
      for (size_t i = blocks.size() - (wires.size() + ell - 1) / ell; i < blocks.size(); ++i)
        ptrs.push_back(&blocks[i]);
      prove_dealt_degrees(run, ptrs, party == 0, "input-share");
    }

    if (opts.boolean_input_check) {
      // Reveal a*(1 - a) entrywise for every input block; all-zero blocks
      // certify boolean inputs.
      for (size_t bi = 0; bi < blocks.size(); ++bi) {
        ShareVec prod;
        prod.degree = 2 * delta;
        prod.shares.resize(pp.n);
        for (int j = 0; j < pp.n; ++j) {
          Fe a = blocks[bi].shares[j];
          prod.shares[j] = F.mul(a, F.sub(1 % F.p(), a));
        }
        run.tally.elements += static_cast<uint64_t>(pp.n);
        AbortInfo abort_info;
        auto blk = reconstruct_block(pp, prod, 2 * delta, &abort_info);
        if (!blk) abort_run({"boolean-check", abort_info.reason, abort_info.parties});
        for (int e = 0; e < ell; ++e) {
          if (block_wires[bi][e] >= 0 && (*blk)[e] != 0)
            abort_run({"boolean-check", "input entry is not boolean", {}});
        }
      }
    }

    // -- layered evaluation ---------------------------------------------------
    // Per layer: arrange operand blocks out of the current blocks (blinded
    // reveal, projection, reshare, unblind), compute the layer locally on
    // the servers, and let the results become the current blocks.
    for (int h = 1; h <= cc.depth + 1; ++h) {
      const bool delivery = h == cc.depth + 1;

      // Target arrangement: operand blocks for layer h, or output blocks.
      struct Target {
        std::vector<int> wires;
      };
      std::vector<Target> targets;
      if (!delivery) {
        for (const auto& op : cc.layers[h].ops) {
          targets.push_back({op.a_wires});
          if (op.kind != BlockKind::pass) targets.push_back({op.b_wires});
        }
      } else {
        for (int party = 0; party < 2; ++party) {
          std::vector<int> wires;
          for (const auto& o : circuit.outputs)
            if (o.party == party) wires.push_back(o.wire);
          for (size_t base = 0; base < wires.size(); base += ell) {
            Target t;
            for (int e = 0; e < ell; ++e) t.wires.push_back(base + e < wires.size() ? wires[base + e] : -1);
            targets.push_back(std::move(t));
          }
        }
      }

      // Step 1: Bob deals blinding for every current block at its degree.
      std::vector<ShareVec> blind(blocks.size());
      std::vector<std::vector<Fe>> blind_values(blocks.size());  // Bob-side plaintext blocks
      std::vector<const ShareVec*> blind_ptrs;
      for (size_t i = 0; i < blocks.size(); ++i) {
        Block rb(ell);
        for (auto& e : rb) e = F.rand_elem(run.bob_rng);
        blind_values[i] = rb;
        blind[i] = share_block(pp, run.bob_rng, rb, blocks[i].degree);
        run.tally.elements += static_cast<uint64_t>(pp.n);
        blind_ptrs.push_back(&blind[i]);
      }
      prove_dealt_degrees(run, blind_ptrs, /*dealer_is_alice=*/false, "blinding-share");

      // Step 2: servers open the blinded blocks to Alice.
      std::vector<ShareVec> opened(blocks.size());
      for (size_t i = 0; i < blocks.size(); ++i) {
        opened[i] = add_shares(pp, blocks[i], blind[i]);
        run.tally.elements += static_cast<uint64_t>(pp.n);
      }
      if (run.corrupt_pending_open && !opened.empty()) {
        int j = opts.corrupt.server % pp.n;
        opened[0].shares[j] = F.add(opened[0].shares[j], 1);
        run.corrupt_pending_open = false;
      }

      // Step 3: Alice checks degrees and recovers the blinded blocks.
      std::vector<Block> blinded(blocks.size());
      for (size_t i = 0; i < blocks.size(); ++i) {
        AbortInfo info;
        auto blk = reconstruct_block(pp, opened[i], opened[i].degree, &info);
        if (!blk) abort_run({"blinded-open", info.reason, info.parties});
        blinded[i] = *blk;
      }

      // Step 4: Alice projects entries into the target arrangement and
      // reshares at the base degree.
      std::vector<ShareVec> new_blocks;
      std::vector<std::vector<int>> new_block_wires;
      std::vector<EntryLink> alice_links;
      for (const auto& t : targets) {
        Block b(ell, 0);
        for (int e = 0; e < ell; ++e) {
          int w = t.wires[e];
          if (w < 0) continue;
          auto l = loc.at(w);
          b[e] = blinded[l.block][l.entry];
        }
        ShareVec sv = share_block(pp, run.alice_rng, b, delta);
        run.tally.elements += static_cast<uint64_t>(pp.n);
        new_blocks.push_back(std::move(sv));
        new_block_wires.push_back(t.wires);
      }
      if (run.corrupt_pending_reshare && !new_blocks.empty()) {
        int j = opts.corrupt.server % pp.n;
        new_blocks[0].shares[j] = F.add(new_blocks[0].shares[j], 1);
        run.corrupt_pending_reshare = false;
      }
      for (size_t ti = 0; ti < targets.size(); ++ti) {
        for (int e = 0; e < ell; ++e) {
          int w = targets[ti].wires[e];
          if (w < 0) continue;
          auto l = loc.at(w);
          alice_links.push_back({&opened[l.block], l.entry, &new_blocks[ti], e});
        }
      }
      prove_entry_links(run, alice_links, /*dealer_is_alice=*/true, "reshare-consistency");

      // Step 5: Bob deals matching unblinding blocks and the servers peel
      // the blinding off locally.
      std::vector<ShareVec> unblind(targets.size());
      std::vector<EntryLink> bob_links;
      for (size_t ti = 0; ti < targets.size(); ++ti) {
        Block rb(ell, 0);
        for (int e = 0; e < ell; ++e) {
          int w = targets[ti].wires[e];
          if (w < 0) continue;
          auto l = loc.at(w);
          rb[e] = blind_values[l.block][l.entry];
        }
        unblind[ti] = share_block(pp, run.bob_rng, rb, delta);
        run.tally.elements += static_cast<uint64_t>(pp.n);
      }
      for (size_t ti = 0; ti < targets.size(); ++ti) {
        for (int e = 0; e < ell; ++e) {
          int w = targets[ti].wires[e];
          if (w < 0) continue;
          auto l = loc.at(w);
          bob_links.push_back({&blind[l.block], l.entry, &unblind[ti], e});
        }
      }
      prove_entry_links(run, bob_links, /*dealer_is_alice=*/false, "unblind-consistency");

      std::vector<ShareVec> arranged(targets.size());
      for (size_t ti = 0; ti < targets.size(); ++ti) arranged[ti] = sub_shares(pp, new_blocks[ti], unblind[ti]);
      for (auto& sv : arranged) sv.degree = delta;

      if (delivery) {
        // Servers hand the output shares to the annotated client, which
        // re-checks the degree before reconstructing.
        if (run.corrupt_pending_output && !arranged.empty()) {
          int j = opts.corrupt.server % pp.n;
          arranged[0].shares[j] = F.add(arranged[0].shares[j], 1);
          run.corrupt_pending_output = false;
        }
        for (size_t ti = 0; ti < arranged.size(); ++ti) {
          run.tally.elements += static_cast<uint64_t>(pp.n);
          AbortInfo info;
          auto blk = reconstruct_block(pp, arranged[ti], delta, &info);
          if (!blk) abort_run({"output-delivery", info.reason, info.parties});
          for (int e = 0; e < ell; ++e) {
            int w = new_block_wires[ti][e];
            if (w >= 0) res.outputs[w] = (*blk)[e];
          }
        }
        break;
      }

      // Step 6: the servers compute the layer locally on the arranged blocks.
      std::vector<ShareVec> results;
      std::vector<std::vector<int>> result_wires;
      size_t cursor = 0;
      for (const auto& op : cc.layers[h].ops) {
        if (op.kind == BlockKind::pass) {
          results.push_back(arranged[cursor]);
          result_wires.push_back(op.out_wires);
          cursor += 1;
          continue;
        }
        const ShareVec& a = arranged[cursor];
        const ShareVec& b = arranged[cursor + 1];
        cursor += 2;
        ShareVec out;
        switch (op.kind) {
          case BlockKind::add: out = add_shares(pp, a, b); break;
          case BlockKind::sub: out = sub_shares(pp, a, b); break;
          case BlockKind::mul: out = mul_shares_local(pp, a, b); break;
          default: break;
        }
        results.push_back(std::move(out));
        result_wires.push_back(op.out_wires);
      }

      blocks = std::move(results);
      block_wires = std::move(result_wires);
      loc.clear();
      for (size_t bi = 0; bi < blocks.size(); ++bi)
        for (int e = 0; e < ell; ++e)
          if (block_wires[bi][e] >= 0) loc[block_wires[bi][e]] = {static_cast<int>(bi), e};
    }
  } catch (const ProtocolAbort& abort) {
    res.abort = abort.info();
  }
  res.elements = run.tally.elements;
  return res;
}

}  // namespace packed
}  // namespace ringmpc
