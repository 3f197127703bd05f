#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "sts/error.hpp"

namespace sts::num {

// Dense row-major matrix of doubles. All models here are tiny; clarity and
// determinism beat BLAS. Entries are expected to stay finite; check_finite()
// is called by public producers.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

  double& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
  double* row(int i) { return a.data() + static_cast<size_t>(i) * cols; }
  const double* row(int i) const { return a.data() + static_cast<size_t>(i) * cols; }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
  }

  void check_finite(const char* who) const;
};

// Deterministic splittable RNG.
//
// Algorithm (documented so other languages can match it if they choose to;
// per-language determinism is the contract, cross-language equality is not):
//   * keys are 64-bit; derive(key, x) is one SplitMix64 scramble of key ^ x.
//   * a stream's key = derive(derive(master_seed, fnv1a64(label)), 0).
//   * substream(i, j) re-keys with derive(derive(key, i+1), j+1).
//   * draws come from xoshiro256++ whose 4-word state is seeded by running
//     SplitMix64 from the key.
//   * uniform01() = ((x >> 11) + 1) * 2^-53  (in (0, 1], never 0).
//   * normal() = Box-Muller on two uniforms, second value cached.
struct RngStream {
  uint64_t s[4] = {0, 0, 0, 0};
  uint64_t key = 0;
  bool has_cached = false;
  double cached = 0.0;

  static RngStream from(uint64_t master_seed, std::string_view label);
  RngStream substream(uint64_t i, uint64_t j = 0) const;

  uint64_t next_u64();
  double uniform01();
  double normal();
  // Uniform integer in [0, n) by rejection (unbiased).
  uint64_t below(uint64_t n);
};

// Stable softmax of a vector (max subtraction). Errors on non-finite input.
std::vector<double> softmax_col(const std::vector<double>& v);

// Matrix of i.i.d. standard normals, filled row-major from the stream.
Mat gaussian_matrix(RngStream& rng, int rows, int cols);

// Solve G x = b for symmetric positive-definite G (Gram systems, q <= 10).
// Uses a Jacobi eigenvalue condition estimate, then Cholesky.
// Throws IllConditionedGram if the condition estimate exceeds cond_max.
std::vector<double> solve_gram(const Mat& G, const std::vector<double>& b,
                               double cond_max = 1e8);

// Unit-norm u with A u ~= 0 for m < n, via Gaussian elimination.
// Deterministic tie-break: among the kernel basis (one vector per free
// column), pick the one whose first nonzero coordinate has the largest
// magnitude after normalization; flip sign so that coordinate is positive.
std::vector<double> null_space_vector(const Mat& A);

// <A,B>_F / (|A|_F |B|_F); 0 if either norm is below 1e-300.
double frobenius_cosine(const Mat& A, const Mat& B);

// Eigenvalues of a small symmetric matrix (cyclic Jacobi), ascending order.
std::vector<double> symmetric_eigenvalues(const Mat& S);

// Largest singular value of a small matrix (via eigenvalues of M M^T or
// M^T M, whichever is smaller).
double operator_norm(const Mat& M);

}  // namespace sts::num
