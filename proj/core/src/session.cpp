#include "ringmpc/session.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <sstream>

namespace ringmpc {

const char* payload_kind_name(PayloadKind k) {
  switch (k) {
    case PayloadKind::ring_elems: return "ring_elems";
    case PayloadKind::ot: return "ot";
    case PayloadKind::bits: return "bits";
    case PayloadKind::ciphertexts: return "ciphertexts";
  }
  return "?";
}

std::string Transcript::to_jsonl() const {
  std::ostringstream os;
  for (const auto& e : entries) {
    os << "{\"round\":" << e.round << ",\"from\":" << e.from << ",\"to\":" << e.to << ",\"kind\":\""
       << payload_kind_name(e.kind) << "\",\"count\":" << e.count << ",\"tag\":\"" << e.tag << "\"}\n";
  }
  return os.str();
}

std::string AbortInfo::to_json() const {
  std::ostringstream os;
  os << "{\"stage\":\"" << stage << "\",\"reason\":\"" << reason << "\",\"parties\":[";
  for (size_t i = 0; i < parties.size(); ++i) os << (i ? "," : "") << parties[i];
  os << "]}";
  return os.str();
}

bool View::mentions(std::string_view name) const {
  auto in = [&](const std::vector<ViewItem>& v) {
    return std::any_of(v.begin(), v.end(), [&](const ViewItem& i) { return i.name == name; });
  };
  return in(inputs) || in(rand_tape) || in(received) || in(locals);
}

// ---------------------------------------------------------------------------
// Party

const std::string& Party::scope() const {
  static const std::string kMain = "main";
  return scopes_.empty() ? kMain : scopes_.back();
}

void Party::erase_scope(const std::string& name) {
  for (auto& item : items_) {
    if (item.scope == name && !item.erased) {
      std::fill(item.data.begin(), item.data.end(), uint8_t{0});
      item.data.clear();
      item.data.shrink_to_fit();
      item.erased = true;
    }
  }
}

void Party::note_input(const std::string& name, std::span<const uint8_t> data) {
  items_.push_back({ItemKind::input, scope(), name, {data.begin(), data.end()}, false});
}

void Party::note_rand(std::span<const uint8_t> data) {
  items_.push_back({ItemKind::rand, scope(), "rand", {data.begin(), data.end()}, false});
}

void Party::note_received(const std::string& name, std::span<const uint8_t> data) {
  items_.push_back({ItemKind::received, scope(), name, {data.begin(), data.end()}, false});
}

void Party::store(const std::string& name, const Label& value) { store_bytes(name, value.bytes()); }

void Party::store_bytes(const std::string& name, std::span<const uint8_t> data) {
  items_.push_back({ItemKind::local, scope(), name, {data.begin(), data.end()}, false});
}

View Party::view() const {
  View v;
  for (const auto& item : items_) {
    if (item.erased) continue;
    ViewItem vi{item.scope, item.name, item.data};
    switch (item.kind) {
      case ItemKind::input: v.inputs.push_back(std::move(vi)); break;
      case ItemKind::rand: v.rand_tape.push_back(std::move(vi)); break;
      case ItemKind::received: v.received.push_back(std::move(vi)); break;
      case ItemKind::local: v.locals.push_back(std::move(vi)); break;
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// Session

Session::Session(const RingOracle& ring, uint64_t seed, int num_parties) : ring_(&ring) {
  if (num_parties < 2) throw std::invalid_argument("session needs at least two parties");
  Rng root(seed);
  for (int i = 0; i < num_parties; ++i) {
    std::string role = num_parties == 2 ? (i == 0 ? "A" : "B") : "P" + std::to_string(i);
    parties_.push_back(std::make_unique<Party>(i, role, root.fork("party", static_cast<uint64_t>(i))));
  }
}

RingCtx Session::ring(int party) {
  Party& p = *parties_.at(party);
  return RingCtx(*ring_, p.rng(), p.stats().oracle, &p);
}

void Session::log(int from, int to, PayloadKind kind, int count, const std::string& tag) {
  if (from != last_from_) {
    ++round_;
    last_from_ = from;
  }
  transcript_.entries.push_back({round_, from, to, kind, count, tag});
}

Label Session::send_label(int from, int to, const Label& x, const std::string& tag) {
  std::array<Label, 1> one{x};
  return send_labels(from, to, one, tag)[0];
}

std::vector<Label> Session::send_labels(int from, int to, std::span<const Label> xs, const std::string& tag) {
  log(from, to, PayloadKind::ring_elems, static_cast<int>(xs.size()), tag);
  parties_.at(from)->stats().elements_sent += xs.size();
  std::vector<Label> delivered(xs.begin(), xs.end());
  if (corrupt_ && !delivered.empty()) {
    delivered[0] = corrupt_(delivered[0]);
    corrupt_ = nullptr;
  }
  std::vector<uint8_t> flat;
  for (const auto& l : delivered) flat.insert(flat.end(), l.bytes().begin(), l.bytes().end());
  parties_.at(to)->note_received(tag, flat);
  return delivered;
}

std::vector<Label> Session::send_setup_labels(int from, int to, std::span<const Label> xs,
                                              const std::string& tag) {
  log(from, to, PayloadKind::ring_elems, static_cast<int>(xs.size()), "setup:" + tag);
  parties_.at(from)->stats().setup_elements_sent += xs.size();
  std::vector<uint8_t> flat;
  for (const auto& l : xs) flat.insert(flat.end(), l.bytes().begin(), l.bytes().end());
  parties_.at(to)->note_received("setup:" + tag, flat);
  return {xs.begin(), xs.end()};
}

void Session::send_bits(int from, int to, std::span<const uint8_t> payload, const std::string& tag) {
  log(from, to, PayloadKind::bits, static_cast<int>(payload.size()) * 8, tag);
  parties_.at(from)->stats().bits_sent += payload.size() * 8;
  parties_.at(to)->note_received(tag, payload);
}

std::vector<uint8_t> Session::send_ciphertext(int from, int to, std::span<const uint8_t> blob,
                                              const std::string& tag) {
  log(from, to, PayloadKind::ciphertexts, 1, tag);
  parties_.at(from)->stats().ciphertexts_sent += 1;
  parties_.at(to)->note_received(tag, blob);
  return {blob.begin(), blob.end()};
}

Label Session::ot_1of2(int sender, const Label& m0, const Label& m1, int receiver, int choice) {
  if (choice != 0 && choice != 1) throw std::invalid_argument("ot_1of2: choice must be a bit");
  log(sender, receiver, PayloadKind::ot, 2, "1of2");
  ot_log_.push_back({OtLogEntry::Type::one_of_two, 2, 1});
  auto& ss = parties_.at(sender)->stats();
  ss.ot_invocations += 1;
  ss.ot_sub_invocations += 1;
  ss.ot_elements_offered += 2;
  auto& rs = parties_.at(receiver)->stats();
  rs.ot_elements_delivered += 1;
  const Label& chosen = choice ? m1 : m0;
  parties_.at(receiver)->note_received("ot", chosen.bytes());
  return chosen;
}

std::vector<Label> Session::ot_kofn(int sender, std::span<const Label> msgs, int receiver,
                                    const std::vector<int>& chosen, bool decompose) {
  std::set<int> seen;
  for (int i : chosen) {
    if (i < 0 || i >= static_cast<int>(msgs.size())) throw std::invalid_argument("ot_kofn: index out of range");
    if (!seen.insert(i).second) throw std::invalid_argument("ot_kofn: duplicate index");
  }
  if (decompose) {
    // n parallel 1-of-2 transfers: one slot per index, the unchosen slot a
    // fixed dummy string.
    Label dummy = ring_->zero();
    std::vector<Label> out;
    std::vector<Label> all(msgs.size());
    for (size_t i = 0; i < msgs.size(); ++i) {
      bool want = seen.count(static_cast<int>(i)) != 0;
      all[i] = ot_1of2(sender, dummy, msgs[i], receiver, want ? 1 : 0);
    }
    for (int i : chosen) out.push_back(all[i]);
    return out;
  }
  log(sender, receiver, PayloadKind::ot, static_cast<int>(msgs.size()),
      "kofn:" + std::to_string(chosen.size()));
  ot_log_.push_back({OtLogEntry::Type::k_of_n, static_cast<int>(msgs.size()), static_cast<int>(chosen.size())});
  auto& ss = parties_.at(sender)->stats();
  ss.ot_invocations += 1;
  ss.ot_sub_invocations += msgs.size();
  ss.ot_elements_offered += msgs.size();
  auto& rs = parties_.at(receiver)->stats();
  rs.ot_elements_delivered += chosen.size();
  std::vector<Label> out;
  out.reserve(chosen.size());
  std::vector<uint8_t> flat;
  for (int i : chosen) {
    out.push_back(msgs[i]);
    flat.insert(flat.end(), msgs[i].bytes().begin(), msgs[i].bytes().end());
  }
  parties_.at(receiver)->note_received("ot", flat);
  return out;
}

CommStats Session::total_stats() const {
  CommStats t;
  for (const auto& p : parties_) {
    const CommStats& s = p->stats();
    for (size_t i = 0; i < t.oracle.by_cmd.size(); ++i) t.oracle.by_cmd[i] += s.oracle.by_cmd[i];
    t.elements_sent += s.elements_sent;
    t.setup_elements_sent += s.setup_elements_sent;
    t.bits_sent += s.bits_sent;
    t.ciphertexts_sent += s.ciphertexts_sent;
    t.ot_invocations += s.ot_invocations;
    t.ot_sub_invocations += s.ot_sub_invocations;
    t.ot_elements_offered += s.ot_elements_offered;
    t.ot_elements_delivered += s.ot_elements_delivered;
  }
  return t;
}

// ---------------------------------------------------------------------------
// Standalone string OT

std::string OtOracle::ot_1of2(const std::string& m0, const std::string& m1, int choice) {
  if (choice != 0 && choice != 1) throw std::invalid_argument("ot_1of2: choice must be a bit");
  log_.push_back({OtLogEntry::Type::one_of_two, 2, 1});
  return choice ? m1 : m0;
}

std::vector<std::string> OtOracle::ot_kofn(std::span<const std::string> msgs, const std::vector<int>& chosen,
                                           bool decompose) {
  std::set<int> seen;
  for (int i : chosen) {
    if (i < 0 || i >= static_cast<int>(msgs.size())) throw std::invalid_argument("ot_kofn: index out of range");
    if (!seen.insert(i).second) throw std::invalid_argument("ot_kofn: duplicate index");
  }
  std::vector<std::string> out;
  if (decompose) {
    std::vector<std::string> all(msgs.size());
    for (size_t i = 0; i < msgs.size(); ++i) {
      bool want = seen.count(static_cast<int>(i)) != 0;
      all[i] = ot_1of2(std::string(msgs[i].size(), '\0'), msgs[i], want ? 1 : 0);
    }
    for (int i : chosen) out.push_back(all[i]);
    return out;
  }
  log_.push_back({OtLogEntry::Type::k_of_n, static_cast<int>(msgs.size()), static_cast<int>(chosen.size())});
  for (int i : chosen) out.push_back(msgs[i]);
  return out;
}

}  // namespace ringmpc
