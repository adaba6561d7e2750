#include "ringmpc/pdtshr.hpp"

#include <algorithm>
#include <array>
#include <sstream>
#include <stdexcept>

#include "ringmpc/homenc.hpp"

namespace ringmpc {

int rho_default_n(const RingOracle& oracle, int stat_k) { return oracle.label_bits() + stat_k; }

ShareOutcome rho_ot(Session& s, int left, int right, const Label& a, const Label& b, int n) {
  if (n < 1) throw std::invalid_argument("rho_ot: n must be positive");
  auto ringL = s.ring(left);
  auto ringR = s.ring(right);

  StatEncoding enc = stat_encode(ringR, b, n);

  // Right ships both slots of every pair; the selector stays local.
  std::vector<Label> pairs;
  pairs.reserve(2 * n);
  for (int i = 0; i < n; ++i) {
    pairs.push_back(enc.v0[i]);
    pairs.push_back(enc.v1[i]);
  }
  auto wire = s.send_labels(right, left, pairs, "pair-vectors");

  // Left scales both slots from the left by a and subtracts a fresh mask.
  std::vector<Label> masks(n);
  Label zA = ringL.zero();
  std::vector<Label> w0(n), w1(n);
  for (int i = 0; i < n; ++i) {
    masks[i] = ringL.sample();
    zA = ringL.add(zA, masks[i]);
    w0[i] = ringL.sub(ringL.mul(a, wire[2 * i]), masks[i]);
    w1[i] = ringL.sub(ringL.mul(a, wire[2 * i + 1]), masks[i]);
  }

  Label zB = ringR.zero();
  for (int i = 0; i < n; ++i) {
    Label got = s.ot_1of2(left, w0[i], w1[i], right, enc.selector[i]);
    zB = ringR.add(zB, got);
  }

  s.party(left).store("z", zA);
  s.party(right).store("z", zB);
  return {zA, zB};
}

ShareOutcome sigma_ot(Session& s, int left, int right, const CodeGenOutput& code, const Label& a,
                      const Label& b) {
  if (!s.ring_oracle().commutative())
    throw std::invalid_argument("sigma_ot: decoding needs a commutative family");
  const int n = code.params.n;
  const int k = code.params.k;
  auto ringL = s.ring(left);
  auto ringR = s.ring(right);

  std::array<Label, 1> msg{b};
  NoisyEncoding enc = noisy_encode(ringR, code, msg);

  // Public code description plus the noisy codeword.
  s.send_setup_labels(right, left, code.G.a, "generator");
  auto v_wire = s.send_labels(right, left, enc.v, "noisy-codeword");

  // Left: w = a*v - G x for a fresh random message x.
  std::vector<Label> x(k);
  for (auto& e : x) e = ringL.sample();
  std::vector<Label> gx = mat_vec(ringL, code.G, x);
  std::vector<Label> w(n);
  for (int i = 0; i < n; ++i) w[i] = ringL.sub(ringL.mul(a, v_wire[i]), gx[i]);

  auto w_on_L = s.ot_kofn(left, w, right, code.L);
  std::vector<Label> decoded = decode_on_L(ringR, code, w_on_L);

  ShareOutcome out;
  out.zA = x[0];
  out.zB = decoded[0];
  s.party(left).store("z", out.zA);
  s.party(right).store("z", out.zB);
  return out;
}

PackedShareOutcome tau_ot(Session& s, int left, int right, const CodeGenOutput& rs_code,
                          std::span<const Label> a, std::span<const Label> b, int t,
                          bool strict_decode) {
  if (rs_code.params.scheme != CodeScheme::rs) throw std::invalid_argument("tau_ot: needs an rs code");
  const int k = rs_code.params.k;
  const int n = rs_code.params.n;
  const int ell = rs_code.params.ell;
  if (t < 1 || t > k / 2) throw std::invalid_argument("tau_ot: need 1 <= t <= k/2");
  if (static_cast<int>(a.size()) != t || static_cast<int>(b.size()) != t)
    throw std::invalid_argument("tau_ot: input vectors must have length t");
  if (!s.ring_oracle().commutative())
    throw std::invalid_argument("tau_ot: needs a commutative field family");
  auto ringL = s.ring(left);
  auto ringR = s.ring(right);

  NoisyEncoding enc = noisy_encode(ringR, rs_code, b);

  // The evaluation points describe the code; the codeword is the payload.
  std::vector<Label> points(rs_code.msg_points);
  points.insert(points.end(), rs_code.eval_points.begin(), rs_code.eval_points.end());
  s.send_setup_labels(right, left, points, "eval-points");
  auto v_wire = s.send_labels(right, left, enc.v, "noisy-codeword");

  // Left picks a low-degree polynomial through its inputs and a uniformly
  // random masking polynomial of doubled degree.
  std::vector<Label> a_values(k);
  for (int i = 0; i < k; ++i) a_values[i] = i < t ? a[i] : ringL.sample();
  std::vector<Label> mask_coeffs(2 * k - 1);
  for (auto& c : mask_coeffs) c = ringL.sample();

  std::vector<Label> w(n);
  for (int i = 0; i < n; ++i) {
    Label pa = lagrange_eval(ringL, rs_code.msg_points, a_values, rs_code.eval_points[i]);
    Label pr = poly_eval(ringL, mask_coeffs, rs_code.eval_points[i]);
    w[i] = ringL.sub(ringL.mul(pa, v_wire[i]), pr);
  }

  std::vector<int> request = rs_code.L;
  int extra_index = -1;
  if (strict_decode) {
    for (int i = 0; i < n; ++i) {
      if (std::find(rs_code.L.begin(), rs_code.L.end(), i) == rs_code.L.end()) {
        extra_index = i;
        break;
      }
    }
    if (extra_index >= 0) request.push_back(extra_index);
  }
  auto received = s.ot_kofn(left, w, right, request);

  std::vector<Label> w_on_L(received.begin(), received.begin() + ell);
  if (strict_decode && extra_index >= 0) {
    // The received coordinates must lie on one polynomial of the expected
    // degree: interpolate on the ell coordinates and test the extra one.
    std::vector<Label> l_points(ell);
    for (int i = 0; i < ell; ++i) l_points[i] = rs_code.eval_points[rs_code.L[i]];
    Label predicted = lagrange_eval(ringR, l_points, w_on_L, rs_code.eval_points[extra_index]);
    if (!(predicted == received[ell]))
      throw ProtocolAbort({"tau-decode", "received points exceed the expected degree", {right}});
  }

  std::vector<Label> q_at_msg = decode_on_L(ringR, rs_code, w_on_L);

  PackedShareOutcome out;
  out.zA.resize(t);
  out.zB.resize(t);
  for (int i = 0; i < t; ++i) {
    out.zA[i] = poly_eval(ringL, mask_coeffs, rs_code.msg_points[i]);
    out.zB[i] = q_at_msg[i];
  }
  return out;
}

ShareOutcome beaver_wrap(Session& s, int left, int right, const PdtShrFn& inner, const Label& a,
                         const Label& b) {
  auto ringL = s.ring(left);
  auto ringR = s.ring(right);

  s.party(left).push_scope("inner");
  s.party(right).push_scope("inner");
  Label rA = ringL.sample();
  Label rB = ringR.sample();
  ShareOutcome pre = inner(s, left, right, rA, rB);
  s.party(left).pop_scope();
  s.party(right).pop_scope();

  // Keep only the random product's inputs and outputs, wipe the rest.
  s.party(left).store("r", rA);
  s.party(left).store("s", pre.zA);
  s.party(right).store("r", rB);
  s.party(right).store("s", pre.zB);
  s.party(left).erase_scope("inner");
  s.party(right).erase_scope("inner");

  Label corr_a = s.send_label(left, right, ringL.sub(a, rA), "corr-a");
  Label corr_b = s.send_label(right, left, ringR.sub(b, rB), "corr-b");

  ShareOutcome out;
  out.zA = ringL.add(ringL.mul(a, corr_b), pre.zA);
  out.zB = ringR.add(ringR.mul(corr_a, rB), pre.zB);
  s.party(left).store("z", out.zA);
  s.party(right).store("z", out.zB);
  return out;
}

PackedShareOutcome ProductShareBackend::share_products(Session& s, int left, int right,
                                                       std::span<const Label> a,
                                                       std::span<const Label> b) {
  PackedShareOutcome out;
  for (size_t i = 0; i < a.size(); ++i) {
    ShareOutcome one = share_product(s, left, right, a[i], b[i]);
    out.zA.push_back(one.zA);
    out.zB.push_back(one.zB);
  }
  return out;
}

std::pair<Label, Label> degree2_share(Session& s, int left, int right, ProductShareBackend& backend,
                                      const Label& xA, const Label& yA, const Label& xB,
                                      const Label& yB) {
  auto ringL = s.ring(left);
  auto ringR = s.ring(right);
  ShareOutcome alpha = backend.share_product(s, left, right, xA, yB);
  Label beta_left, beta_right;
  if (s.ring_oracle().commutative()) {
    ShareOutcome beta = backend.share_product(s, left, right, yA, xB);
    beta_left = beta.zA;
    beta_right = beta.zB;
  } else {
    // Keep xB on the left of the product by swapping the roles.
    ShareOutcome beta = backend.share_product(s, right, left, xB, yA);
    beta_left = beta.zB;
    beta_right = beta.zA;
  }
  Label cA = ringL.add(ringL.add(ringL.mul(xA, yA), alpha.zA), beta_left);
  Label cB = ringR.add(ringR.add(ringR.mul(xB, yB), alpha.zB), beta_right);
  return {cA, cB};
}

std::vector<Label> multiparty_product_share(Session& s, ProductShareBackend& backend,
                                            std::span<const Label> x, std::span<const Label> y) {
  const int m = s.num_parties();
  if (static_cast<int>(x.size()) != m || static_cast<int>(y.size()) != m)
    throw std::invalid_argument("multiparty_product_share: need one (x, y) pair per party");
  if (m < 2) throw std::invalid_argument("multiparty_product_share: need m >= 2");

  // shares[i][j]: party i's share from the ordered-pair run (i, j) plus the
  // run (j, i).
  std::vector<Label> acc(m);
  for (int i = 0; i < m; ++i) acc[i] = s.ring(i).mul(x[i], y[i]);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      ShareOutcome o = backend.share_product(s, i, j, x[i], y[j]);
      acc[i] = s.ring(i).add(acc[i], o.zA);
      acc[j] = s.ring(j).add(acc[j], o.zB);
    }
  return acc;
}

// ---------------------------------------------------------------------------
// Backends

namespace {

class RhoBackend final : public ProductShareBackend {
 public:
  RhoBackend(const RingOracle& oracle, const BackendParams& p)
      : n_(p.n > 0 ? p.n : rho_default_n(oracle, p.stat_k)) {}
  std::string name() const override { return "rho"; }
  ShareOutcome share_product(Session& s, int left, int right, const Label& a, const Label& b) override {
    ++invocations_;
    return rho_ot(s, left, right, a, b, n_);
  }

 private:
  int n_;
};

class SigmaBackend final : public ProductShareBackend {
 public:
  SigmaBackend(CodeScheme scheme, int k) : scheme_(scheme), k_(k) {}
  std::string name() const override {
    return scheme_ == CodeScheme::rand ? "sigma"
           : scheme_ == CodeScheme::ring ? "sigma-ring"
                                         : "sigma-slwalk";
  }
  ShareOutcome share_product(Session& s, int left, int right, const Label& a, const Label& b) override {
    ++invocations_;
    auto ringR = s.ring(right);
    CodeGenOutput code = scheme_ == CodeScheme::rand   ? gen_rand_code(ringR, k_)
                         : scheme_ == CodeScheme::ring ? gen_ring_code(ringR, k_)
                                                       : gen_slwalk_code(ringR, k_);
    return sigma_ot(s, left, right, code, a, b);
  }

 private:
  CodeScheme scheme_;
  int k_;
};

class TauBackend final : public ProductShareBackend {
 public:
  TauBackend(int k, int c, int t, bool strict = false) : k_(k), c_(c), t_(t), strict_(strict) {}
  std::string name() const override { return "tau"; }
  int batch_width() const override { return t_; }

  ShareOutcome share_product(Session& s, int left, int right, const Label& a, const Label& b) override {
    std::array<Label, 1> av{a}, bv{b};
    PackedShareOutcome out = share_products(s, left, right, av, bv);
    return {out.zA[0], out.zB[0]};
  }

  PackedShareOutcome share_products(Session& s, int left, int right, std::span<const Label> a,
                                    std::span<const Label> b) override {
    PackedShareOutcome out;
    Label zeroL = s.ring(left).zero();
    Label zeroR = s.ring(right).zero();
    for (size_t base = 0; base < a.size(); base += t_) {
      ++invocations_;
      size_t take = std::min(a.size() - base, static_cast<size_t>(t_));
      std::vector<Label> av(a.begin() + base, a.begin() + base + take);
      std::vector<Label> bv(b.begin() + base, b.begin() + base + take);
      av.resize(t_, zeroL);  // zero padding for the tail batch
      bv.resize(t_, zeroR);
      CodeGenOutput code = gen_rs_code(s.ring(right), k_, c_);
      PackedShareOutcome batch = tau_ot(s, left, right, code, av, bv, t_, strict_);
      for (size_t i = 0; i < take; ++i) {
        out.zA.push_back(batch.zA[i]);
        out.zB.push_back(batch.zB[i]);
      }
    }
    return out;
  }

 private:
  int k_, c_, t_;
  bool strict_;
};

class ThetaBackend final : public ProductShareBackend {
 public:
  explicit ThetaBackend(int stat_k) : stat_k_(stat_k), he_(make_mock_controlled_he()) {}
  std::string name() const override { return "theta"; }
  ShareOutcome share_product(Session& s, int left, int right, const Label& a, const Label& b) override {
    ++invocations_;
    if (!he_->ready()) he_->keygen(s.ring_oracle(), stat_k_, s.party(left).rng());
    return theta_protocol(s, left, right, *he_, a, b);
  }
  ControlledHe& he() { return *he_; }

 private:
  int stat_k_;
  std::unique_ptr<ControlledHe> he_;
};

class PsiBackend final : public ProductShareBackend {
 public:
  PsiBackend(const RingOracle& oracle, const BackendParams& p)
      : stat_k_(p.stat_k), prime_bits_(p.he_prime_bits), he_(make_toy_paillier()) {
    kprime_ = oracle.kind() == RingOracle::Kind::matrix
                  ? psi_matrix_kprime(oracle.modulus(), oracle.dim(), stat_k_)
                  : psi_kprime(oracle.modulus(), stat_k_);
  }
  std::string name() const override { return "psi"; }
  ShareOutcome share_product(Session& s, int left, int right, const Label& a, const Label& b) override {
    ++invocations_;
    if (!he_->ready()) he_->keygen(kprime_, s.party(left).rng(), prime_bits_);
    return psi_protocol(s, left, right, *he_, a, b, stat_k_);
  }
  UncontrolledHe& he() { return *he_; }

 private:
  int stat_k_;
  int kprime_;
  uint64_t prime_bits_;
  std::unique_ptr<UncontrolledHe> he_;
};

class BeaverBackend final : public ProductShareBackend {
 public:
  explicit BeaverBackend(std::unique_ptr<ProductShareBackend> inner) : inner_(std::move(inner)) {}
  std::string name() const override { return inner_->name() + "+beaver"; }
  ShareOutcome share_product(Session& s, int left, int right, const Label& a, const Label& b) override {
    ++invocations_;
    PdtShrFn fn = [this](Session& ss, int l, int r, const Label& x, const Label& y) {
      return inner_->share_product(ss, l, r, x, y);
    };
    return beaver_wrap(s, left, right, fn, a, b);
  }

 private:
  std::unique_ptr<ProductShareBackend> inner_;
};

}  // namespace

std::unique_ptr<ProductShareBackend> make_backend(const std::string& name, const RingOracle& oracle,
                                                  const BackendParams& params) {
  std::unique_ptr<ProductShareBackend> base;
  if (name == "rho") {
    base = std::make_unique<RhoBackend>(oracle, params);
  } else if (name == "sigma") {
    base = std::make_unique<SigmaBackend>(CodeScheme::rand, params.k);
  } else if (name == "sigma-ring") {
    base = std::make_unique<SigmaBackend>(CodeScheme::ring, params.k);
  } else if (name == "sigma-slwalk") {
    base = std::make_unique<SigmaBackend>(CodeScheme::slwalk, params.k);
  } else if (name == "tau") {
    base = std::make_unique<TauBackend>(params.k, params.c, params.t);
  } else if (name == "theta") {
    base = std::make_unique<ThetaBackend>(params.stat_k);
  } else if (name == "psi") {
    base = std::make_unique<PsiBackend>(oracle, params);
  } else {
    throw std::invalid_argument("unknown product-sharing backend: " + name);
  }
  if (params.beaver) base = std::make_unique<BeaverBackend>(std::move(base));
  return base;
}

// ---------------------------------------------------------------------------
// Generic runner

RunResult run_protocol(const std::string& name, const RingOracle& oracle, const BackendParams& params,
                       uint64_t seed, int parties) {
  Session s(oracle, seed, parties);
  RunResult res;
  auto finish = [&](std::optional<AbortInfo> abort) {
    res.abort = std::move(abort);
    res.transcript = s.transcript();
    res.rounds = s.rounds();
    for (int i = 0; i < s.num_parties(); ++i) res.stats.push_back(s.party(i).stats());
  };

  try {
    auto backend = make_backend(name, oracle, params);
    if (parties == 2 && name == "tau") {
      int t = params.t;
      std::vector<Label> a(t), b(t);
      for (auto& e : a) e = s.ring(0).sample();
      for (auto& e : b) e = s.ring(1).sample();
      for (int i = 0; i < t; ++i) {
        s.party(0).note_input("a" + std::to_string(i), a[i].bytes());
        s.party(1).note_input("b" + std::to_string(i), b[i].bytes());
      }
      PackedShareOutcome out = backend->share_products(s, 0, 1, a, b);
      bool bottom = false;
      for (int i = 0; i < t; ++i) bottom |= out.zA[i].is_bottom() || out.zB[i].is_bottom();
      res.outputs[0] = out.zA;
      res.outputs[1] = out.zB;
      // Referee recomputation for reporting.
      CommCounter scratch;
      Rng ref_rng(seed);
      RingCtx ref(oracle, ref_rng, scratch);
      std::ostringstream exp;
      for (int i = 0; i < t; ++i) exp << (i ? "," : "") << ref.mul(a[i], b[i]).hex();
      res.notes["expected_products"] = exp.str();
      finish(bottom ? std::optional<AbortInfo>({"output", "bottom label in outputs", {}}) : std::nullopt);
      return res;
    }
    if (parties == 2) {
      Label a = s.ring(0).sample();
      Label b = s.ring(1).sample();
      s.party(0).note_input("a", a.bytes());
      s.party(1).note_input("b", b.bytes());
      ShareOutcome out = backend->share_product(s, 0, 1, a, b);
      res.outputs[0] = {out.zA};
      res.outputs[1] = {out.zB};
      CommCounter scratch;
      Rng ref_rng(seed);
      RingCtx ref(oracle, ref_rng, scratch);
      res.notes["expected_product"] = ref.mul(a, b).hex();
      finish(out.is_bottom() ? std::optional<AbortInfo>({"output", "bottom label in outputs", {}})
                             : std::nullopt);
      return res;
    }
    // Multiparty sum-of-products on top of the named backend.
    std::vector<Label> x(parties), y(parties);
    for (int i = 0; i < parties; ++i) {
      x[i] = s.ring(i).sample();
      y[i] = s.ring(i).sample();
      s.party(i).note_input("x", x[i].bytes());
      s.party(i).note_input("y", y[i].bytes());
    }
    std::vector<Label> c = multiparty_product_share(s, *backend, x, y);
    bool bottom = false;
    for (int i = 0; i < parties; ++i) {
      res.outputs[i] = {c[i]};
      bottom |= c[i].is_bottom();
    }
    res.notes["backend_invocations"] = std::to_string(backend->invocations());
    finish(bottom ? std::optional<AbortInfo>({"output", "bottom label in outputs", {}}) : std::nullopt);
    return res;
  } catch (const ProtocolAbort& abort) {
    finish(abort.info());
    return res;
  }
}

}  // namespace ringmpc
