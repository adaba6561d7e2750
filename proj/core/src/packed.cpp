#include "ringmpc/packed.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace ringmpc {
namespace packed {

PackedParams::PackedParams(PrimeField f, int n_, int ell_, int delta_)
    : field(f), n(n_), ell(ell_), delta(delta_) {
  if (n < 2 || ell < 1 || delta < 1) throw std::invalid_argument("packed params: bad sizes");
  if (delta < ell - 1) throw std::invalid_argument("packed params: degree too small for the block");
  if (delta >= n) throw std::invalid_argument("packed params: need delta < n");
  if (2 * delta >= n) throw std::invalid_argument("packed params: need 2*delta < n");
  if (field.p() < static_cast<uint64_t>(n + ell))
    throw std::invalid_argument("packed params: field too small for n + ell distinct points");
}

PackedParams PackedParams::with_defaults(PrimeField f, int n_) {
  return PackedParams(f, n_, std::max(1, n_ / 4), std::max(1, n_ / 3));
}

std::vector<Fe> PackedParams::share_points() const {
  std::vector<Fe> pts(n);
  for (int j = 0; j < n; ++j) pts[j] = share_point(j);
  return pts;
}

std::vector<Fe> PackedParams::secret_points() const {
  std::vector<Fe> pts(ell);
  for (int i = 0; i < ell; ++i) pts[i] = secret_point(i);
  return pts;
}

ShareVec share_block(const PackedParams& pp, Rng& rng, const Block& block, int degree) {
  if (static_cast<int>(block.size()) != pp.ell) throw std::invalid_argument("share_block: block length");
  if (degree < pp.ell - 1 || degree >= pp.n) throw std::invalid_argument("share_block: bad degree");
  const PrimeField& F = pp.field;
  // Anchor the polynomial at the secret points plus degree+1-ell free points;
  // interpolation through random values there is a bijection onto the
  // conditioned polynomial set.
  std::vector<Fe> xs = pp.secret_points();
  std::vector<Fe> ys = block;
  for (int j = 0; j < degree + 1 - pp.ell; ++j) {
    xs.push_back(pp.share_point(j));
    ys.push_back(F.rand_elem(rng));
  }
  std::vector<Fe> coeffs = F.interpolate(xs, ys);
  ShareVec sv;
  sv.degree = degree;
  sv.shares.resize(pp.n);
  for (int j = 0; j < pp.n; ++j) sv.shares[j] = F.eval(coeffs, pp.share_point(j));
  return sv;
}

std::optional<Block> reconstruct_block(const PackedParams& pp, const ShareVec& sv, int degree,
                                       AbortInfo* abort) {
  const PrimeField& F = pp.field;
  if (static_cast<int>(sv.shares.size()) != pp.n) throw std::invalid_argument("reconstruct: share count");
  if (degree + 1 > pp.n) throw std::invalid_argument("reconstruct: degree too high for n shares");
  std::vector<Fe> xs(pp.share_points());
  std::vector<Fe> head_x(xs.begin(), xs.begin() + degree + 1);
  std::vector<Fe> head_y(sv.shares.begin(), sv.shares.begin() + degree + 1);
  std::vector<Fe> coeffs = F.interpolate(head_x, head_y);
  std::vector<int> complainers;
  for (int j = degree + 1; j < pp.n; ++j) {
    if (F.eval(coeffs, pp.share_point(j)) != sv.shares[j]) complainers.push_back(j);
  }
  if (!complainers.empty()) {
    if (abort) *abort = {"degree-check", "shares exceed the stated degree", complainers};
    return std::nullopt;
  }
  Block b(pp.ell);
  for (int i = 0; i < pp.ell; ++i) b[i] = F.eval(coeffs, pp.secret_point(i));
  return b;
}

Block reconstruct_from_subset(const PackedParams& pp, std::span<const int> servers,
                              std::span<const Fe> values, int degree) {
  if (servers.size() != values.size() || static_cast<int>(servers.size()) != degree + 1)
    throw std::invalid_argument("reconstruct_from_subset: need exactly degree+1 shares");
  const PrimeField& F = pp.field;
  std::vector<Fe> xs(servers.size()), ys(values.begin(), values.end());
  for (size_t i = 0; i < servers.size(); ++i) xs[i] = pp.share_point(servers[i]);
  Block b(pp.ell);
  for (int i = 0; i < pp.ell; ++i) b[i] = F.interpolate_at(xs, ys, pp.secret_point(i));
  return b;
}

ShareVec add_shares(const PackedParams& pp, const ShareVec& a, const ShareVec& b) {
  ShareVec out;
  out.degree = std::max(a.degree, b.degree);
  out.shares.resize(pp.n);
  for (int j = 0; j < pp.n; ++j) out.shares[j] = pp.field.add(a.shares[j], b.shares[j]);
  return out;
}

ShareVec sub_shares(const PackedParams& pp, const ShareVec& a, const ShareVec& b) {
  ShareVec out;
  out.degree = std::max(a.degree, b.degree);
  out.shares.resize(pp.n);
  for (int j = 0; j < pp.n; ++j) out.shares[j] = pp.field.sub(a.shares[j], b.shares[j]);
  return out;
}

ShareVec mul_shares_local(const PackedParams& pp, const ShareVec& a, const ShareVec& b) {
  ShareVec out;
  out.degree = a.degree + b.degree;
  out.shares.resize(pp.n);
  for (int j = 0; j < pp.n; ++j) out.shares[j] = pp.field.mul(a.shares[j], b.shares[j]);
  return out;
}

std::vector<Fe> public_block_evals(const PackedParams& pp, const Block& b) {
  if (static_cast<int>(b.size()) != pp.ell) throw std::invalid_argument("public_block_evals: block length");
  const PrimeField& F = pp.field;
  std::vector<Fe> xs = pp.secret_points();
  std::vector<Fe> out(pp.n);
  for (int j = 0; j < pp.n; ++j) out[j] = F.interpolate_at(xs, b, pp.share_point(j));
  return out;
}

// ---------------------------------------------------------------------------
// Linear spaces

bool VectorSpaceSpec::contains(const PackedParams& pp, std::span<const Fe> vec) const {
  const PrimeField& F = pp.field;
  if (static_cast<int>(vec.size()) != vec_len(pp)) return false;
  std::vector<std::vector<Fe>> coeffs(comps.size());
  auto xs = pp.share_points();
  for (size_t ci = 0; ci < comps.size(); ++ci) {
    std::span<const Fe> comp = vec.subspan(ci * pp.n, pp.n);
    int d = comps[ci].degree;
    if (d + 1 > pp.n) return false;
    std::vector<Fe> head_x(xs.begin(), xs.begin() + d + 1);
    std::vector<Fe> head_y(comp.begin(), comp.begin() + d + 1);
    coeffs[ci] = F.interpolate(head_x, head_y);
    for (int j = d + 1; j < pp.n; ++j) {
      if (F.eval(coeffs[ci], xs[j]) != comp[j]) return false;
    }
  }
  for (const auto& eq : eqs) {
    if (F.eval(coeffs[eq.comp_a], eq.pt_a) != F.eval(coeffs[eq.comp_b], eq.pt_b)) return false;
  }
  return true;
}

std::vector<Fe> VectorSpaceSpec::sample(const PackedParams& pp, Rng& rng) const {
  const PrimeField& F = pp.field;
  std::vector<Fe> out;
  out.reserve(vec_len(pp));
  std::vector<std::vector<Fe>> coeffs(comps.size());
  for (size_t ci = 0; ci < comps.size(); ++ci) {
    int d = comps[ci].degree;
    // Pinned values forced by constraints pointing at this component.
    std::vector<Fe> xs, ys;
    for (const auto& eq : eqs) {
      if (eq.comp_b == static_cast<int>(ci)) {
        if (eq.comp_a >= static_cast<int>(ci)) throw std::invalid_argument("space: constraints must point forward");
        xs.push_back(eq.pt_b);
        ys.push_back(F.eval(coeffs[eq.comp_a], eq.pt_a));
      }
    }
    int free = d + 1 - static_cast<int>(xs.size());
    if (free < 0) throw std::invalid_argument("space: over-constrained component");
    for (int j = 0; static_cast<int>(xs.size()) < d + 1; ++j) {
      Fe cand = pp.share_point(pp.n - 1 - j);  // anchor points away from low share points
      if (std::find(xs.begin(), xs.end(), cand) != xs.end()) continue;
      xs.push_back(cand);
      ys.push_back(F.rand_elem(rng));
    }
    coeffs[ci] = F.interpolate(xs, ys);
    for (int j = 0; j < pp.n; ++j) out.push_back(F.eval(coeffs[ci], pp.share_point(j)));
  }
  return out;
}

CheckResult prove_membership(const PackedParams& pp, const VectorSpaceSpec& space,
                             std::span<const std::vector<Fe>> dealer_vecs,
                             const std::vector<Fe>& dealer_blind,
                             std::span<const std::vector<Fe>> server_vecs,
                             const std::vector<Fe>& server_blind, Rng& coin, CommTally* tally) {
  const PrimeField& F = pp.field;
  const int len = space.vec_len(pp);
  const size_t q = dealer_vecs.size();
  if (server_vecs.size() != q) throw std::invalid_argument("prove_membership: vector count mismatch");

  // Public challenge: one coefficient per claimed vector.
  std::vector<Fe> coeff(q);
  for (auto& c : coeff) c = F.rand_elem(coin);

  // Dealer broadcasts its blinded combination.
  std::vector<Fe> broadcast(len, 0);
  for (size_t i = 0; i < q; ++i)
    for (int j = 0; j < len; ++j) broadcast[j] = F.add(broadcast[j], F.mul(coeff[i], dealer_vecs[i][j]));
  for (int j = 0; j < len; ++j) broadcast[j] = F.add(broadcast[j], dealer_blind[j]);
  if (tally) tally->elements += static_cast<uint64_t>(len);

  CheckResult res;
  if (!space.contains(pp, broadcast)) {
    res.accepted = false;
    res.abort = {"membership-broadcast", "broadcast combination is not in the claimed space", {}};
    return res;
  }

  // Every server recomputes the combination on its own coordinates. A
  // coordinate of a share vector belongs to server (index mod n).
  std::vector<int> complainers;
  for (int j = 0; j < len; ++j) {
    Fe mine = server_blind[j];
    for (size_t i = 0; i < q; ++i) mine = F.add(mine, F.mul(coeff[i], server_vecs[i][j]));
    if (mine != broadcast[j]) complainers.push_back(j % pp.n);
  }
  if (!complainers.empty()) {
    std::sort(complainers.begin(), complainers.end());
    complainers.erase(std::unique(complainers.begin(), complainers.end()), complainers.end());
    res.accepted = false;
    res.abort = {"membership-complaint", "server coordinates disagree with the broadcast", complainers};
  }
  return res;
}

// ---------------------------------------------------------------------------
// Replication

namespace {

CheckResult verify_replication_typewise(const PackedParams& pp, std::span<const ShareVec> blocks,
                                        const ReplicationPattern& pattern, Rng& coin, Rng& dealer_rng,
                                        CommTally* tally) {
  // Group atoms into types by (entry, entry', degree, degree'); each type is
  // one membership proof over stacked vector pairs.
  std::map<std::tuple<int, int, int, int>, std::vector<const ReplicationPattern::Atom*>> types;
  for (const auto& a : pattern.atoms) {
    types[{a.entry_a, a.entry_b, blocks[a.block_a].degree, blocks[a.block_b].degree}].push_back(&a);
  }
  for (const auto& [key, atoms] : types) {
    auto [entry_a, entry_b, deg_a, deg_b] = key;
    VectorSpaceSpec space;
    space.comps = {{deg_a}, {deg_b}};
    space.eqs = {{0, pp.secret_point(entry_a), 1, pp.secret_point(entry_b)}};
    std::vector<std::vector<Fe>> vecs;
    for (const auto* a : atoms) {
      std::vector<Fe> v = blocks[a->block_a].shares;
      v.insert(v.end(), blocks[a->block_b].shares.begin(), blocks[a->block_b].shares.end());
      vecs.push_back(std::move(v));
    }
    std::vector<Fe> blind = space.sample(pp, dealer_rng);
    CheckResult r = prove_membership(pp, space, vecs, blind, vecs, blind, coin, tally);
    if (!r.accepted) {
      r.abort.stage = "replication-typewise";
      return r;
    }
  }
  return {};
}

CheckResult verify_replication_inner_product(const PackedParams& pp, std::span<const ShareVec> blocks,
                                             const ReplicationPattern& pattern, Rng& coin,
                                             Rng& dealer_rng, CommTally* tally) {
  const PrimeField& F = pp.field;
  const size_t m = blocks.size();

  // Cycles of positions that must agree, from the atom list.
  std::map<std::pair<int, int>, int> pos_class;
  std::vector<std::vector<std::pair<int, int>>> classes;
  auto class_of = [&](std::pair<int, int> pos) {
    auto it = pos_class.find(pos);
    if (it != pos_class.end()) return it->second;
    int id = static_cast<int>(classes.size());
    pos_class[pos] = id;
    classes.push_back({pos});
    return id;
  };
  for (const auto& a : pattern.atoms) {
    int ca = class_of({a.block_a, a.entry_a});
    int cb = class_of({a.block_b, a.entry_b});
    if (ca == cb) continue;
    for (auto& pos : classes[cb]) pos_class[pos] = ca;
    classes[ca].insert(classes[ca].end(), classes[cb].begin(), classes[cb].end());
    classes[cb].clear();
  }

  // Public random blocks r_i and their cyclic shifts along the classes.
  std::vector<Block> r(m, Block(pp.ell, 0));
  for (auto& blk : r)
    for (auto& e : blk) e = F.rand_elem(coin);
  std::vector<Block> r_shift = r;
  for (const auto& cls : classes) {
    if (cls.size() < 2) continue;
    for (size_t i = 0; i < cls.size(); ++i) {
      auto [blk_dst, ent_dst] = cls[i];
      auto [blk_src, ent_src] = cls[(i + 1) % cls.size()];
      r_shift[blk_dst][ent_dst] = r[blk_src][ent_src];
    }
  }

  // Servers fold the public difference blocks into their shares; the masked
  // sum opens to a block whose entries add to zero iff the inner products
  // agree.
  int max_deg = 0;
  for (const auto& b : blocks) max_deg = std::max(max_deg, b.degree);
  int open_deg = max_deg + pp.ell - 1;
  if (open_deg + 1 > pp.n)
    throw std::invalid_argument("inner-product check: degree too high for the server count");

  // Zero-sum masking block, dealt at the opening degree.
  Block mask(pp.ell, 0);
  Fe acc = 0;
  for (int i = 0; i + 1 < pp.ell; ++i) {
    mask[i] = F.rand_elem(dealer_rng);
    acc = F.add(acc, mask[i]);
  }
  mask[pp.ell - 1] = F.neg(acc);
  ShareVec mask_shares = share_block(pp, dealer_rng, mask, open_deg);
  if (tally) tally->elements += static_cast<uint64_t>(pp.n);

  std::vector<Fe> opened(pp.n, 0);
  for (int j = 0; j < pp.n; ++j) {
    Fe sum = mask_shares.shares[j];
    for (size_t i = 0; i < m; ++i) {
      Block diff(pp.ell);
      for (int e = 0; e < pp.ell; ++e) diff[e] = F.sub(r[i][e], r_shift[i][e]);
      Fe qij = F.interpolate_at(pp.secret_points(), diff, pp.share_point(j));
      sum = F.add(sum, F.mul(blocks[i].shares[j], qij));
    }
    opened[j] = sum;
  }
  if (tally) tally->elements += static_cast<uint64_t>(pp.n);

  ShareVec opened_sv{opened, open_deg};
  AbortInfo abort;
  auto blk = reconstruct_block(pp, opened_sv, open_deg, &abort);
  if (!blk) {
    return {false, {"replication-inner-product", abort.reason, abort.parties}};
  }
  Fe total = 0;
  for (Fe e : *blk) total = F.add(total, e);
  if (total != 0) {
    return {false, {"replication-inner-product", "masked inner products disagree", {}}};
  }
  return {};
}

}  // namespace

CheckResult verify_replication(const PackedParams& pp, std::span<const ShareVec> blocks,
                               const ReplicationPattern& pattern, ReplicationMode mode, Rng& coin,
                               Rng& dealer_rng, CommTally* tally) {
  for (const auto& a : pattern.atoms) {
    bool ok = a.block_a >= 0 && a.block_a < static_cast<int>(blocks.size()) && a.block_b >= 0 &&
              a.block_b < static_cast<int>(blocks.size()) && a.entry_a >= 0 && a.entry_a < pp.ell &&
              a.entry_b >= 0 && a.entry_b < pp.ell;
    if (!ok) throw std::invalid_argument("verify_replication: atom indices out of range");
  }
  if (mode == ReplicationMode::typewise)
    return verify_replication_typewise(pp, blocks, pattern, coin, dealer_rng, tally);
  return verify_replication_inner_product(pp, blocks, pattern, coin, dealer_rng, tally);
}

}  // namespace packed
}  // namespace ringmpc
