#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ringmpc/prime_field.hpp"
#include "ringmpc/session.hpp"  // AbortInfo

namespace ringmpc {
namespace packed {

using Fe = uint64_t;
using Block = std::vector<Fe>;  // exactly ell secrets

/// Block secret sharing parameters: a block of ell secrets sits at the
/// points 0, -1, ..., 1-ell of one degree-delta polynomial whose values at
/// 1..n are the server shares. Privacy threshold t = delta - ell + 1;
/// degree-2*delta products still reconstruct because 2*delta < n.
struct PackedParams {
  PrimeField field;
  int n;      // servers
  int ell;    // block length
  int delta;  // sharing degree

  PackedParams(PrimeField f, int n_, int ell_, int delta_);
  /// delta = n/3 and ell = n/4 defaults.
  static PackedParams with_defaults(PrimeField f, int n_);

  int t() const { return delta - ell + 1; }
  Fe share_point(int j) const { return field.from_int(j + 1); }        // j in [0, n)
  Fe secret_point(int i) const { return field.from_int(-i); }          // i in [0, ell)
  std::vector<Fe> share_points() const;
  std::vector<Fe> secret_points() const;
};

struct ShareVec {
  std::vector<Fe> shares;  // size n
  int degree;
};

/// Shares of a random degree-`degree` polynomial through the block values.
ShareVec share_block(const PackedParams& pp, Rng& rng, const Block& block, int degree);

/// Reconstruct from all n shares, verifying they are consistent with the
/// stated degree; inconsistency reports an abort instead of a block.
std::optional<Block> reconstruct_block(const PackedParams& pp, const ShareVec& sv, int degree,
                                       AbortInfo* abort = nullptr);

/// Reconstruct from any degree+1 shares given by (server index, value).
Block reconstruct_from_subset(const PackedParams& pp, std::span<const int> servers,
                              std::span<const Fe> values, int degree);

ShareVec add_shares(const PackedParams& pp, const ShareVec& a, const ShareVec& b);
ShareVec sub_shares(const PackedParams& pp, const ShareVec& a, const ShareVec& b);
/// Pointwise product: a valid degree-(da+db) sharing of the coordinatewise
/// block product.
ShareVec mul_shares_local(const PackedParams& pp, const ShareVec& a, const ShareVec& b);

/// Evaluations at the share points of the lowest-degree polynomial through
/// the block (public data, used to fold public blocks into shared ones).
std::vector<Fe> public_block_evals(const PackedParams& pp, const Block& b);

// ---------------------------------------------------------------------------
// Linear spaces of share vectors and the blinded-combination membership test

/// A linear space of concatenated share vectors: `comps` polynomial
/// components of length n each (degree-bounded evaluations at the share
/// points), optionally tied by point-equality constraints
/// comp_a(pt_a) == comp_b(pt_b). Constraints must point forward
/// (comp_a < comp_b) so sampling can satisfy them left to right.
struct VectorSpaceSpec {
  struct Comp {
    int degree;
  };
  struct Eq {
    int comp_a;
    Fe pt_a;
    int comp_b;
    Fe pt_b;
  };
  std::vector<Comp> comps;
  std::vector<Eq> eqs;

  int vec_len(const PackedParams& pp) const { return static_cast<int>(comps.size()) * pp.n; }
  bool contains(const PackedParams& pp, std::span<const Fe> vec) const;
  std::vector<Fe> sample(const PackedParams& pp, Rng& rng) const;
};

struct CheckResult {
  bool accepted = true;
  AbortInfo abort;
};

/// Tally of field elements moved by the desk-scale protocols (shares dealt,
/// opened values, broadcasts; challenge coins are free).
struct CommTally {
  uint64_t elements = 0;
};

/// Blinded random-combination membership proof. The dealer holds q vectors
/// it claims lie in L plus a blinding vector r in L; the servers hold their
/// coordinates of each (possibly corrupted in flight). The dealer broadcasts
/// sum_i c_i v_i + r for public random coefficients c; every server checks
/// its own coordinates and the referee checks the broadcast lies in L.
/// With an honest dealer the broadcast equals the blinded combination, so
/// the verifier learns nothing beyond membership.
CheckResult prove_membership(const PackedParams& pp, const VectorSpaceSpec& space,
                             std::span<const std::vector<Fe>> dealer_vecs,
                             const std::vector<Fe>& dealer_blind,
                             std::span<const std::vector<Fe>> server_vecs,
                             const std::vector<Fe>& server_blind, Rng& coin, CommTally* tally = nullptr);

// ---------------------------------------------------------------------------
// Replication patterns

/// Equality constraints between block entries: entry i of block a must equal
/// entry i' of block b. Grouped into ell^2 types by (i, i') for the
/// typewise check.
struct ReplicationPattern {
  struct Atom {
    int block_a, entry_a;
    int block_b, entry_b;
  };
  std::vector<Atom> atoms;
};

enum class ReplicationMode { typewise, inner_product };

/// Verify that shared blocks satisfy the pattern. typewise runs one
/// membership proof per (entry, entry') type over pairs of stacked share
/// vectors; inner_product compares sum_i <v_i, r_i> with the cyclically
/// shifted sum under a zero-sum masking block. Both use one public
/// challenge; a violated constraint survives with probability about 1/|F|.
/// The dealer is assumed to know the shared polynomials (it dealt them).
CheckResult verify_replication(const PackedParams& pp, std::span<const ShareVec> blocks,
                               const ReplicationPattern& pattern, ReplicationMode mode, Rng& coin,
                               Rng& dealer_rng, CommTally* tally = nullptr);

}  // namespace packed
}  // namespace ringmpc
