#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ringmpc/codes.hpp"
#include "ringmpc/session.hpp"
#include "ringmpc/stat_encoding.hpp"

namespace ringmpc {

/// Additive two-party sharing of a product: zA + zB = a * b (a on the left).
struct ShareOutcome {
  Label zA, zB;
  bool is_bottom() const { return zA.is_bottom() || zB.is_bottom(); }
};

struct PackedShareOutcome {
  std::vector<Label> zA, zB;
};

/// Statistically hiding product sharing. The left party holds a, the right
/// party holds b; the right party ships a sum-sharing of b hidden in vector
/// pairs, the left party scales and masks both slots of every pair, and n
/// 1-of-2 transfers hand back exactly the masked real summands.
/// n should exceed the ring's label bit length by a statistical margin.
ShareOutcome rho_ot(Session& s, int left, int right, const Label& a, const Label& b, int n);

/// Default n for rho_ot: label bits (an upper bound on log2 |R|) plus the
/// statistical slack k.
int rho_default_n(const RingOracle& oracle, int stat_k = 40);

/// Product sharing from a noisy linear encoding with t = 1. The code must
/// satisfy H G|_L = I; both the random-code and the triangular ring-code
/// generators qualify. Only commutative families: decoding multiplies
/// through H from the left.
ShareOutcome sigma_ot(Session& s, int left, int right, const CodeGenOutput& code, const Label& a,
                      const Label& b);

/// Batched product sharing over an interpolation code: t coordinatewise
/// products per run. strict_decode additionally fetches one extra coordinate
/// and aborts when the received points do not lie on a polynomial of the
/// expected degree.
PackedShareOutcome tau_ot(Session& s, int left, int right, const CodeGenOutput& rs_code,
                          std::span<const Label> a, std::span<const Label> b, int t,
                          bool strict_decode = false);

using PdtShrFn = std::function<ShareOutcome(Session&, int, int, const Label&, const Label&)>;

/// Randomized-input wrapper: runs the inner protocol on fresh random inputs
/// inside an erasable scope, wipes that scope, then exchanges corrections
/// a - rA and b - rB and fixes up the outputs locally. After the wipe a
/// captured view retains only the inputs, the random products' (r, s) pair
/// and the corrections.
ShareOutcome beaver_wrap(Session& s, int left, int right, const PdtShrFn& inner, const Label& a,
                         const Label& b);

/// Product-sharing backend behind the share-reduction and circuit layers.
class ProductShareBackend {
 public:
  virtual ~ProductShareBackend() = default;
  virtual std::string name() const = 0;
  /// Parallel instances this backend realizes per run (1 unless batched).
  virtual int batch_width() const { return 1; }
  virtual ShareOutcome share_product(Session& s, int left, int right, const Label& a, const Label& b) = 0;
  /// Batched entry point; the default loops share_product.
  virtual PackedShareOutcome share_products(Session& s, int left, int right, std::span<const Label> a,
                                            std::span<const Label> b);
  uint64_t invocations() const { return invocations_; }

 protected:
  uint64_t invocations_ = 0;
};

/// Shares of (xA + xB)(yA + yB) from two backend runs on the cross terms.
/// On a noncommutative ring the second run swaps the party roles so the
/// product order survives.
std::pair<Label, Label> degree2_share(Session& s, int left, int right, ProductShareBackend& backend,
                                      const Label& xA, const Label& yA, const Label& xB, const Label& yB);

/// m-party sum-of-products sharing: party i holds (x_i, y_i); outputs c_i
/// with sum_i c_i = (sum_i x_i)(sum_i y_i). One backend run per ordered pair.
std::vector<Label> multiparty_product_share(Session& s, ProductShareBackend& backend,
                                            std::span<const Label> x, std::span<const Label> y);

// -- backend factories -------------------------------------------------------

struct BackendParams {
  int stat_k = 40;  // statistical parameter for rho / psi
  int n = 0;        // rho: explicit n (0 = derive from ring and stat_k)
  int k = 8;        // code dimension
  int c = 8;        // interpolation code rate constant
  int t = 4;        // packed products per tau run
  uint64_t he_prime_bits = 0;  // 0 = derived
  bool beaver = false;         // wrap the backend in the randomized-input layer
};

/// Known names: rho, sigma, sigma-ring, sigma-slwalk, tau, theta, psi.
std::unique_ptr<ProductShareBackend> make_backend(const std::string& name, const RingOracle& oracle,
                                                  const BackendParams& params);

// -- generic runner -----------------------------------------------------------

struct RunResult {
  std::map<int, std::vector<Label>> outputs;  // per party
  std::optional<AbortInfo> abort;
  Transcript transcript;
  std::vector<CommStats> stats;  // per party
  int rounds = 0;
  std::map<std::string, std::string> notes;  // inputs, derived figures
};

/// Deterministic single-instance run of a named protocol on seeded random
/// inputs. Protocol aborts and bottom outputs surface as an Abort outcome.
RunResult run_protocol(const std::string& name, const RingOracle& oracle, const BackendParams& params,
                       uint64_t seed, int parties = 2);

}  // namespace ringmpc
