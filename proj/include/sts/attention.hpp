#pragma once

#include <optional>
#include <vector>

#include "sts/encoding.hpp"
#include "sts/task.hpp"

namespace sts::model {

// Reparameterized one-layer attention: f(X, y) = V Z softmax(Z^T W z_query).
struct ModelParams {
  num::Mat W;  // (d+d_e) x (d+d_e)
  num::Mat V;  // d x (d+d_e)
  int d = 0;
  int d_e = 0;

  static ModelParams zero(int d, int d_e);
};

struct Gradients {
  num::Mat dW;
  num::Mat dV;

  void add_scaled(const Gradients& g, double c);
};

struct GroundTruth {
  num::Mat W_star;
  num::Mat V_star;
  pe::PeKind kind = pe::PeKind::OneHot;
};

// V* = [I_d | 0]; W* position block = I_T - (1/T) 1 1^T (one-hot) or I_{d_e}
// (Rademacher); all other blocks zero.
GroundTruth ground_truth(int d, int d_e, int T, pe::PeKind kind);

std::vector<double> attention(const ModelParams& p, const task::AssembledInput& in);
std::vector<double> forward(const ModelParams& p, const task::AssembledInput& in);

// 1/2 |target - forward|^2
double sample_loss(const ModelParams& p, const task::Sample& s,
                   const pe::PosEncoding& pe, const std::vector<double>& x_query);

// Same, optionally reporting the mean attention mass per correct position.
double sample_eval(const ModelParams& p, const task::Sample& s,
                   const pe::PosEncoding& pe, const std::vector<double>& x_query,
                   double* s_plus);

// Exact per-sample gradients of sample_loss:
//   r  = target - V Z S
//   dV = -r (Z S)^T
//   dW = -Z (diag(S) - S S^T) Z^T V^T r z_query^T
// evaluated in factored form (the dW curly bracket is applied to a vector).
Gradients sample_gradients(const ModelParams& p, const task::Sample& s,
                           const pe::PosEncoding& pe,
                           const std::vector<double>& x_query);

// How positional encodings are supplied to a batch gradient evaluation.
struct PePolicy {
  enum class Kind { Fixed, ResamplePerStep, Nested };
  Kind kind = Kind::Fixed;
  const pe::PosEncoding* fixed = nullptr;  // Fixed: borrowed, not owned

  // Sampler settings for the resampling kinds.
  int d_e = 0;
  int q = 2;
  double threshold = 0.1;  // pairwise dot-product threshold
  pe::RipMode mode = pe::RipMode::Pairwise;
  int max_attempts = 10000;

  // Nested estimator sizes.
  int n_outer = 4;
  int n_inner = 4;
};

struct BatchStats {
  double mean_loss = 0.0;
  double mean_s_plus = 0.0;  // mean attention mass per correct position
};

// Mean gradient over the batch under the policy.
//   Fixed: all samples under *policy.fixed.
//   ResamplePerStep: one fresh encoding for the whole batch (experimental
//     surrogate of the stochastic-PE objective).
//   Nested: per sample, the inner expectation of the softmax output is
//     estimated from n_inner fresh encodings and the outer integrand
//     averaged over n_outer more; closer to the population form in which
//     the expectation over E sits inside the residual.
// Deterministic for a given rng key regardless of worker count: per-sample
// work uses rng.substream(sample_index), and partial sums are reduced in
// fixed chunk order. Worker count: STS_THREADS env var, else hardware.
Gradients batch_gradients(const ModelParams& p, const std::vector<task::Sample>& batch,
                          const PePolicy& policy, const num::RngStream& rng,
                          const std::vector<std::vector<double>>* x_queries = nullptr,
                          BatchStats* stats = nullptr);

// W = alpha_scale * blockdiag(0_{d x d}, I_{d_e}), V = [I_d | 0].
ModelParams construct_expressivity(int d, int d_e, double alpha_scale);

// (cos_w, cos_v) Frobenius cosines against the ground truth.
std::pair<double, double> cosine_diagnostics(const ModelParams& p,
                                             const GroundTruth& gt);

struct Scalars {
  double C_hat = 0.0;
  double alpha_hat = 0.0;
  double offblock_ratio = 0.0;
};

// Recover the two-parameter trajectory coordinates from full matrices.
// alpha_hat: mean of the V token-block diagonal. C_hat: one-hot — mean
// position-block diagonal minus mean off-diagonal; Rademacher — mean
// diagonal. offblock_ratio: Frobenius norm of all non-designated blocks of
// (W, V) over the norm of the designated ones (0 when both are zero).
Scalars extract_scalars(const ModelParams& p, pe::PeKind kind);

int worker_count();

}  // namespace sts::model
