#pragma once

#include <boost/rational.hpp>
#include <string>
#include <vector>

#include "ringmpc/ring.hpp"

namespace ringmpc {

using Rational = boost::rational<long long>;

std::string rational_to_string(const Rational& r);

/// Additive sum-sharing of an element hidden inside a pair of vectors: the
/// selector bit of each coordinate says which of the two vectors carries the
/// real summand; the other slot is uniform.
struct StatEncoding {
  std::vector<Label> v0, v1;
  std::vector<uint8_t> selector;  // one bit per coordinate
};

/// Encode x as (v0, v1, selector) with sum_i v[selector_i]_i = x. The
/// selector is uniform, non-selected entries are uniform.
/// Bottom x yields an encoding full of bottoms.
StatEncoding stat_encode(RingCtx ring, const Label& x, int n);

/// Inverse of stat_encode: sum of the selected coordinates.
Label stat_reconstruct(RingCtx ring, const StatEncoding& enc);

/// Exact statistical distance between the public part (v0, v1) of the
/// encoding of x and the uniform distribution over R^n x R^n, by full
/// enumeration. Restricted to tiny parameters: |R| <= 4 and n <= 5.
Rational stat_distance_bruteforce(const RingOracle& oracle, int n, const Label& x);

}  // namespace ringmpc
