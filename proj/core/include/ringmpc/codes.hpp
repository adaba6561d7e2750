#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ringmpc/ring.hpp"

namespace ringmpc {

/// Dense matrix of element labels, row-major.
struct LabelMatrix {
  int rows = 0, cols = 0;
  std::vector<Label> a;

  LabelMatrix() = default;
  LabelMatrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}
  Label& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
  const Label& at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
};

/// y = M x, entries of M multiplied from the left.
std::vector<Label> mat_vec(RingCtx ring, const LabelMatrix& m, std::span<const Label> x);

enum class CodeScheme { rand, ring, rs, slwalk };

const char* code_scheme_name(CodeScheme s);
std::optional<CodeScheme> code_scheme_from_name(const std::string& s);

struct CodeParams {
  CodeScheme scheme = CodeScheme::rand;
  int k = 0;    // dimension / security parameter
  int n = 0;    // code length
  int ell = 0;  // noiseless coordinates
  int t = 1;    // encoded message length
  int c = 0;    // rate constant (rs only)
};

/// Output of a code generation algorithm: generator matrix, noiseless
/// coordinate set, and the matching decoding matrix. For the interpolation
/// scheme the defining evaluation points are carried along too.
struct CodeGenOutput {
  CodeParams params;
  LabelMatrix G;       // n x k
  std::vector<int> L;  // sorted subset of [0, n), size ell
  LabelMatrix H;       // decoding matrix: (k x ell)
  std::vector<Label> msg_points;   // rs: x-points, size k
  std::vector<Label> eval_points;  // rs: y-points, size n
};

/// Random linear code over a field or pseudo-field. n = 2k, ell = k.
/// Picks L by rejection until G|_L is invertible (k tries), then falls back
/// to an identity block in the first k rows. H satisfies H G|_L = I.
CodeGenOutput gen_rand_code(RingCtx ring, int k);

/// Code for arbitrary unital rings built from two random unit upper
/// triangular blocks; decoding needs no inversion. n = 2k, ell = k.
CodeGenOutput gen_ring_code(RingCtx ring, int k);

/// Interpolation code: G extrapolates a degree k-1 polynomial from its
/// values at k message points to n = c*k evaluation points; H interpolates
/// the degree 2(k-1) polynomial through the ell = 2k-1 coordinates in L and
/// reads it back at the message points.
CodeGenOutput gen_rs_code(RingCtx ring, int k, int c = 8);

/// Alternative generator for arbitrary unital rings: G|_L and H are built
/// simultaneously by two opposite random walks of elementary row/column
/// operations, so H G|_L = I holds by construction without any inversion.
/// walk_steps = 0 picks the default of 16 * k^2 steps.
CodeGenOutput gen_slwalk_code(RingCtx ring, int k, int walk_steps = 0);

/// Noisy codeword: v agrees with G u on L and is uniform elsewhere. The
/// message u is x padded with k - t random elements.
struct NoisyEncoding {
  std::vector<Label> u;  // size k; u[0..t) = x
  std::vector<Label> v;  // size n
  int t = 1;
};

NoisyEncoding noisy_encode(RingCtx ring, const CodeGenOutput& code, std::span<const Label> x);

/// Restriction of v to the coordinates in L (in L order).
std::vector<Label> restrict_to(const std::vector<Label>& v, const std::vector<int>& L);

/// H applied to v|_L. For rand/ring codes this recovers the message of a
/// noiseless codeword; for rs codes it evaluates the interpolant at the
/// message points.
std::vector<Label> decode_on_L(RingCtx ring, const CodeGenOutput& code, std::span<const Label> v_on_L);

// -- polynomial helpers over a field family ----------------------------------

/// Horner evaluation of sum coeffs[i] z^i.
Label poly_eval(RingCtx ring, std::span<const Label> coeffs, const Label& z);

/// Value at z of the interpolant through (xs[i], ys[i]); the xs must be
/// pairwise distinct with invertible differences.
Label lagrange_eval(RingCtx ring, std::span<const Label> xs, std::span<const Label> ys, const Label& z);

// -- container format -------------------------------------------------------

/// Length-prefixed binary container for a generated code (magic "RMC1").
void save_code(std::ostream& os, const std::string& ring_spec, const CodeGenOutput& code);
CodeGenOutput load_code(std::istream& is, std::string* ring_spec_out = nullptr);

/// Human-readable JSON dump with hex labels.
std::string code_to_json(const std::string& ring_spec, const CodeGenOutput& code);

}  // namespace ringmpc
