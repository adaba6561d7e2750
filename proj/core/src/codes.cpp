#include "ringmpc/codes.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ringmpc {

const char* code_scheme_name(CodeScheme s) {
  switch (s) {
    case CodeScheme::rand: return "rand";
    case CodeScheme::ring: return "ring";
    case CodeScheme::rs: return "rs";
    case CodeScheme::slwalk: return "slwalk";
  }
  return "?";
}

std::optional<CodeScheme> code_scheme_from_name(const std::string& s) {
  if (s == "rand") return CodeScheme::rand;
  if (s == "ring") return CodeScheme::ring;
  if (s == "rs") return CodeScheme::rs;
  if (s == "slwalk") return CodeScheme::slwalk;
  return std::nullopt;
}

std::vector<Label> mat_vec(RingCtx ring, const LabelMatrix& m, std::span<const Label> x) {
  if (static_cast<int>(x.size()) != m.cols) throw std::invalid_argument("mat_vec: dimension mismatch");
  std::vector<Label> y(m.rows);
  for (int i = 0; i < m.rows; ++i) {
    Label acc = ring.zero();
    for (int j = 0; j < m.cols; ++j) acc = ring.add(acc, ring.mul(m.at(i, j), x[j]));
    y[i] = acc;
  }
  return y;
}

namespace {

std::vector<int> random_subset(Rng& rng, int n, int k) {
  // Partial Fisher-Yates, then sort.
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (int i = 0; i < k; ++i) std::swap(idx[i], idx[i + static_cast<int>(rng.below(n - i))]);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

// Gauss-Jordan inverse using the oracle's invert for pivots. Returns nullopt
// when no invertible pivot exists in some column (singular, or unlucky
// non-units in a pseudo-field).
std::optional<LabelMatrix> matrix_inverse(RingCtx ring, const LabelMatrix& m) {
  int k = m.rows;
  LabelMatrix work = m;
  LabelMatrix inv(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) inv.at(i, j) = i == j ? ring.one() : ring.zero();
  for (int col = 0; col < k; ++col) {
    int pivot = -1;
    Label pivot_inv;
    for (int r = col; r < k; ++r) {
      Label cand = ring.invert(work.at(r, col));
      if (!cand.is_bottom()) {
        pivot = r;
        pivot_inv = cand;
        break;
      }
    }
    if (pivot < 0) return std::nullopt;
    if (pivot != col) {
      for (int j = 0; j < k; ++j) {
        std::swap(work.at(pivot, j), work.at(col, j));
        std::swap(inv.at(pivot, j), inv.at(col, j));
      }
    }
    for (int j = 0; j < k; ++j) {
      work.at(col, j) = ring.mul(pivot_inv, work.at(col, j));
      inv.at(col, j) = ring.mul(pivot_inv, inv.at(col, j));
    }
    for (int r = 0; r < k; ++r) {
      if (r == col) continue;
      Label f = work.at(r, col);
      for (int j = 0; j < k; ++j) {
        work.at(r, j) = ring.sub(work.at(r, j), ring.mul(f, work.at(col, j)));
        inv.at(r, j) = ring.sub(inv.at(r, j), ring.mul(f, inv.at(col, j)));
      }
    }
  }
  return inv;
}

LabelMatrix rows_at(const LabelMatrix& g, const std::vector<int>& idx) {
  LabelMatrix out(static_cast<int>(idx.size()), g.cols);
  for (size_t i = 0; i < idx.size(); ++i)
    for (int j = 0; j < g.cols; ++j) out.at(static_cast<int>(i), j) = g.at(idx[i], j);
  return out;
}

}  // namespace

CodeGenOutput gen_rand_code(RingCtx ring, int k) {
  if (k < 1) throw std::invalid_argument("gen_rand_code: k must be >= 1");
  if (!ring.oracle().is_pseudo_field())
    throw std::invalid_argument("gen_rand_code: needs a field or pseudo-field family");
  const int n = 2 * k;
  CodeGenOutput out;
  out.params = {CodeScheme::rand, k, n, k, 1, 0};
  out.G = LabelMatrix(n, k);
  for (auto& e : out.G.a) e = ring.sample();

  for (int attempt = 0; attempt < k; ++attempt) {
    auto L = random_subset(ring.rng(), n, k);
    auto inv = matrix_inverse(ring, rows_at(out.G, L));
    if (inv) {
      out.L = std::move(L);
      out.H = std::move(*inv);
      return out;
    }
  }
  // Fallback: identity block in the first k rows, lexicographic first L.
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) out.G.at(i, j) = i == j ? ring.one() : ring.zero();
  out.L.resize(k);
  for (int i = 0; i < k; ++i) out.L[i] = i;
  out.H = LabelMatrix(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) out.H.at(i, j) = i == j ? ring.one() : ring.zero();
  return out;
}

CodeGenOutput gen_ring_code(RingCtx ring, int k) {
  if (k < 1) throw std::invalid_argument("gen_ring_code: k must be >= 1");
  const int n = 2 * k;
  CodeGenOutput out;
  out.params = {CodeScheme::ring, k, n, k, 1, 0};
  out.G = LabelMatrix(n, k);
  Label one = ring.one();
  Label zero = ring.zero();
  // Two random unit upper triangular blocks stacked.
  for (int blk = 0; blk < 2; ++blk)
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        Label v = i == j ? one : (j > i ? ring.sample() : zero);
        out.G.at(blk * k + i, j) = v;
      }
  // Row i of G|_L comes from block 0 or block 1, chosen by a coin.
  out.L.resize(k);
  for (int i = 0; i < k; ++i) out.L[i] = i + (ring.rng().bit() ? k : 0);
  std::sort(out.L.begin(), out.L.end());
  // The selected rows form a unit upper triangular M; its inverse is unit
  // upper triangular and falls out of forward substitution with ring
  // operations only.
  LabelMatrix M(k, k);
  {
    // out.L sorted mixes block offsets; recover row i's source by value.
    std::vector<int> row_of(k);
    for (int i = 0; i < k; ++i) row_of[out.L[i] % k] = out.L[i];
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) M.at(i, j) = out.G.at(row_of[i], j);
  }
  LabelMatrix Hslot(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) Hslot.at(i, j) = i == j ? one : zero;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      Label acc = zero;
      for (int l = i; l < j; ++l) acc = ring.add(acc, ring.mul(Hslot.at(i, l), M.at(l, j)));
      Hslot.at(i, j) = ring.sub(zero, acc);
    }
  // Hslot inverts the slot-ordered selection; restrictions use sorted L
  // order, so permute columns accordingly (slot of index v is v mod k).
  out.H = LabelMatrix(k, k);
  for (int r = 0; r < k; ++r) {
    int slot = out.L[r] % k;
    for (int i = 0; i < k; ++i) out.H.at(i, r) = Hslot.at(i, slot);
  }
  return out;
}

namespace {

// Lagrange basis values: for base points xs and a target point z, returns
// the vector (l_0(z), ..., l_{k-1}(z)). Needs field inversion.
std::vector<Label> lagrange_basis_at(RingCtx ring, std::span<const Label> xs, const Label& z) {
  int k = static_cast<int>(xs.size());
  std::vector<Label> out(k);
  for (int j = 0; j < k; ++j) {
    Label num = ring.one();
    Label den = ring.one();
    for (int l = 0; l < k; ++l) {
      if (l == j) continue;
      num = ring.mul(num, ring.sub(z, xs[l]));
      den = ring.mul(den, ring.sub(xs[j], xs[l]));
    }
    Label den_inv = ring.invert(den);
    if (den_inv.is_bottom()) throw std::runtime_error("interpolation hit a non-unit difference");
    out[j] = ring.mul(num, den_inv);
  }
  return out;
}

}  // namespace

CodeGenOutput gen_rs_code(RingCtx ring, int k, int c) {
  if (k < 1) throw std::invalid_argument("gen_rs_code: k must be >= 1");
  if (c <= 4) throw std::invalid_argument("gen_rs_code: rate constant must be > 4");
  if (!ring.oracle().is_pseudo_field())
    throw std::invalid_argument("gen_rs_code: needs a field or pseudo-field family");
  const int n = c * k;
  const int ell = 2 * k - 1;
  auto ord = ring.oracle().order();
  if (ord && *ord < static_cast<uint64_t>(n + k))
    throw std::invalid_argument("gen_rs_code: field too small to supply distinct points");

  CodeGenOutput out;
  out.params = {CodeScheme::rs, k, n, ell, 1, c};

  // n + k pairwise distinct points: k message points then n evaluation points.
  std::vector<Label> pts;
  pts.reserve(n + k);
  int guard = 0;
  while (static_cast<int>(pts.size()) < n + k) {
    Label cand = ring.sample();
    bool dup = false;
    for (const auto& p : pts)
      if (p == cand) {
        dup = true;
        break;
      }
    if (!dup) pts.push_back(cand);
    if (++guard > 64 * (n + k))
      throw std::invalid_argument("gen_rs_code: could not sample distinct points");
  }
  out.msg_points.assign(pts.begin(), pts.begin() + k);
  out.eval_points.assign(pts.begin() + k, pts.end());

  out.G = LabelMatrix(n, k);
  for (int i = 0; i < n; ++i) {
    auto basis = lagrange_basis_at(ring, out.msg_points, out.eval_points[i]);
    for (int j = 0; j < k; ++j) out.G.at(i, j) = basis[j];
  }

  out.L = random_subset(ring.rng(), n, ell);
  std::vector<Label> l_points(ell);
  for (int i = 0; i < ell; ++i) l_points[i] = out.eval_points[out.L[i]];
  out.H = LabelMatrix(k, ell);
  for (int i = 0; i < k; ++i) {
    auto basis = lagrange_basis_at(ring, l_points, out.msg_points[i]);
    for (int j = 0; j < ell; ++j) out.H.at(i, j) = basis[j];
  }
  return out;
}

CodeGenOutput gen_slwalk_code(RingCtx ring, int k, int walk_steps) {
  if (k < 1) throw std::invalid_argument("gen_slwalk_code: k must be >= 1");
  const int n = 2 * k;
  if (walk_steps <= 0) walk_steps = 16 * k * k;
  CodeGenOutput out;
  out.params = {CodeScheme::slwalk, k, n, k, 1, 0};

  Label one = ring.one();
  Label zero = ring.zero();
  LabelMatrix M(k, k), H(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) M.at(i, j) = H.at(i, j) = i == j ? one : zero;
  if (k > 1) {
    for (int s = 0; s < walk_steps; ++s) {
      int i = static_cast<int>(ring.rng().below(k));
      int j = static_cast<int>(ring.rng().below(k - 1));
      if (j >= i) ++j;
      bool plus = ring.rng().bit() != 0;
      // Row op on M, opposite column op on H keeps H M = I at every step.
      for (int col = 0; col < k; ++col) {
        M.at(i, col) = plus ? ring.add(M.at(i, col), M.at(j, col)) : ring.sub(M.at(i, col), M.at(j, col));
      }
      for (int row = 0; row < k; ++row) {
        H.at(row, j) = plus ? ring.sub(H.at(row, j), H.at(row, i)) : ring.add(H.at(row, j), H.at(row, i));
      }
    }
  }
  out.H = std::move(H);
  out.L = random_subset(ring.rng(), n, k);
  out.G = LabelMatrix(n, k);
  for (auto& e : out.G.a) e = ring.sample();
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) out.G.at(out.L[i], j) = M.at(i, j);
  return out;
}

NoisyEncoding noisy_encode(RingCtx ring, const CodeGenOutput& code, std::span<const Label> x) {
  const int k = code.params.k;
  const int t = static_cast<int>(x.size());
  if (t < 1 || t > k) throw std::invalid_argument("noisy_encode: need 1 <= |x| <= k");
  NoisyEncoding enc;
  enc.t = t;
  enc.u.assign(x.begin(), x.end());
  for (int i = t; i < k; ++i) enc.u.push_back(ring.sample());
  std::vector<Label> w = mat_vec(ring, code.G, enc.u);
  enc.v.resize(code.params.n);
  size_t li = 0;
  for (int i = 0; i < code.params.n; ++i) {
    if (li < code.L.size() && code.L[li] == i) {
      enc.v[i] = w[i];
      ++li;
    } else {
      enc.v[i] = ring.sample();
    }
  }
  return enc;
}

std::vector<Label> restrict_to(const std::vector<Label>& v, const std::vector<int>& L) {
  std::vector<Label> out;
  out.reserve(L.size());
  for (int i : L) {
    if (i < 0 || i >= static_cast<int>(v.size())) throw std::invalid_argument("restrict_to: index out of range");
    out.push_back(v[i]);
  }
  return out;
}

std::vector<Label> decode_on_L(RingCtx ring, const CodeGenOutput& code, std::span<const Label> v_on_L) {
  if (static_cast<int>(v_on_L.size()) != code.params.ell)
    throw std::invalid_argument("decode_on_L: expected ell values");
  return mat_vec(ring, code.H, v_on_L);
}

Label poly_eval(RingCtx ring, std::span<const Label> coeffs, const Label& z) {
  Label acc = ring.zero();
  for (size_t i = coeffs.size(); i-- > 0;) acc = ring.add(ring.mul(acc, z), coeffs[i]);
  return acc;
}

Label lagrange_eval(RingCtx ring, std::span<const Label> xs, std::span<const Label> ys, const Label& z) {
  if (xs.size() != ys.size()) throw std::invalid_argument("lagrange_eval: point/value mismatch");
  auto basis = lagrange_basis_at(ring, xs, z);
  Label acc = ring.zero();
  for (size_t i = 0; i < xs.size(); ++i) acc = ring.add(acc, ring.mul(basis[i], ys[i]));
  return acc;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

void put_u32(std::ostream& os, uint32_t v) {
  for (int i = 0; i < 4; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint32_t get_u32(std::istream& is) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    int c = is.get();
    if (c < 0) throw std::runtime_error("code container: truncated");
    v |= static_cast<uint32_t>(c & 0xff) << (8 * i);
  }
  return v;
}

void put_blob(std::ostream& os, const std::string& s) {
  put_u32(os, static_cast<uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_blob(std::istream& is) {
  uint32_t len = get_u32(is);
  std::string s(len, '\0');
  is.read(s.data(), len);
  if (!is) throw std::runtime_error("code container: truncated");
  return s;
}

void put_labels(std::ostream& os, const std::vector<Label>& v) {
  put_u32(os, static_cast<uint32_t>(v.size()));
  uint32_t width = v.empty() ? 0 : static_cast<uint32_t>(v[0].bytes().size());
  put_u32(os, width);
  for (const auto& l : v) {
    if (l.is_bottom() || l.bytes().size() != width) throw std::runtime_error("code container: ragged labels");
    os.write(reinterpret_cast<const char*>(l.bytes().data()), width);
  }
}

std::vector<Label> get_labels(std::istream& is) {
  uint32_t count = get_u32(is);
  uint32_t width = get_u32(is);
  std::vector<Label> v;
  v.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    std::vector<uint8_t> bytes(width);
    is.read(reinterpret_cast<char*>(bytes.data()), width);
    if (!is) throw std::runtime_error("code container: truncated");
    v.emplace_back(std::move(bytes));
  }
  return v;
}

void put_matrix(std::ostream& os, const LabelMatrix& m) {
  put_u32(os, static_cast<uint32_t>(m.rows));
  put_u32(os, static_cast<uint32_t>(m.cols));
  put_labels(os, m.a);
}

LabelMatrix get_matrix(std::istream& is) {
  LabelMatrix m;
  m.rows = static_cast<int>(get_u32(is));
  m.cols = static_cast<int>(get_u32(is));
  m.a = get_labels(is);
  if (m.a.size() != static_cast<size_t>(m.rows) * m.cols) throw std::runtime_error("code container: bad matrix");
  return m;
}

constexpr char kMagic[4] = {'R', 'M', 'C', '1'};

}  // namespace

void save_code(std::ostream& os, const std::string& ring_spec, const CodeGenOutput& code) {
  os.write(kMagic, 4);
  put_blob(os, ring_spec);
  put_u32(os, static_cast<uint32_t>(code.params.scheme));
  put_u32(os, static_cast<uint32_t>(code.params.k));
  put_u32(os, static_cast<uint32_t>(code.params.n));
  put_u32(os, static_cast<uint32_t>(code.params.ell));
  put_u32(os, static_cast<uint32_t>(code.params.t));
  put_u32(os, static_cast<uint32_t>(code.params.c));
  put_matrix(os, code.G);
  put_u32(os, static_cast<uint32_t>(code.L.size()));
  for (int i : code.L) put_u32(os, static_cast<uint32_t>(i));
  put_matrix(os, code.H);
  put_labels(os, code.msg_points);
  put_labels(os, code.eval_points);
}

CodeGenOutput load_code(std::istream& is, std::string* ring_spec_out) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::string(magic, 4) != std::string(kMagic, 4)) throw std::runtime_error("code container: bad magic");
  std::string spec = get_blob(is);
  if (ring_spec_out) *ring_spec_out = spec;
  CodeGenOutput code;
  code.params.scheme = static_cast<CodeScheme>(get_u32(is));
  code.params.k = static_cast<int>(get_u32(is));
  code.params.n = static_cast<int>(get_u32(is));
  code.params.ell = static_cast<int>(get_u32(is));
  code.params.t = static_cast<int>(get_u32(is));
  code.params.c = static_cast<int>(get_u32(is));
  code.G = get_matrix(is);
  uint32_t lsize = get_u32(is);
  code.L.resize(lsize);
  for (auto& i : code.L) i = static_cast<int>(get_u32(is));
  code.H = get_matrix(is);
  code.msg_points = get_labels(is);
  code.eval_points = get_labels(is);
  return code;
}

std::string code_to_json(const std::string& ring_spec, const CodeGenOutput& code) {
  std::ostringstream os;
  auto labels_json = [&](const std::vector<Label>& v) {
    os << "[";
    for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << "\"" << v[i].hex() << "\"";
    os << "]";
  };
  os << "{\"ring\":\"" << ring_spec << "\",\"scheme\":\"" << code_scheme_name(code.params.scheme) << "\"";
  os << ",\"k\":" << code.params.k << ",\"n\":" << code.params.n << ",\"ell\":" << code.params.ell;
  os << ",\"t\":" << code.params.t << ",\"c\":" << code.params.c;
  os << ",\"L\":[";
  for (size_t i = 0; i < code.L.size(); ++i) os << (i ? "," : "") << code.L[i];
  os << "],\"G\":{\"rows\":" << code.G.rows << ",\"cols\":" << code.G.cols << ",\"data\":";
  labels_json(code.G.a);
  os << "},\"H\":{\"rows\":" << code.H.rows << ",\"cols\":" << code.H.cols << ",\"data\":";
  labels_json(code.H.a);
  os << "},\"msg_points\":";
  labels_json(code.msg_points);
  os << ",\"eval_points\":";
  labels_json(code.eval_points);
  os << "}";
  return os.str();
}

}  // namespace ringmpc
