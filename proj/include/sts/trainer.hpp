#pragma once

#include <string>
#include <vector>

#include "sts/attention.hpp"
#include "sts/encoding.hpp"
#include "sts/task.hpp"

namespace sts::train {

// Which encodings the model sees during training/evaluation.
enum class PePolicyKind {
  OneHot,           // E = I_T throughout
  FixedRademacher,  // one encoding sampled at t=0, T_max columns, prefix used
  Stochastic,       // fresh encoding each step (resample-per-step surrogate)
};

struct TrainConfig {
  task::TaskConfig task;
  int d_e = 0;
  double delta = 0.1;        // nominal near-orthogonality parameter
  double pe_threshold = -1;  // pairwise sampling threshold; < 0 means delta
  pe::RipMode rip_mode = pe::RipMode::Pairwise;
  int max_attempts = 10000;

  PePolicyKind pe_policy = PePolicyKind::OneHot;
  bool nested = false;  // use the nested estimator instead of the surrogate
  int n_outer = 4;
  int n_inner = 4;

  bool adam = false;
  double beta1 = 0.9, beta2 = 0.999, eps_adam = 1e-8;
  double eta = 1.0;
  long anneal_step = -1;  // < 0: no annealing
  double anneal_factor = 1.0 / 3.0;

  long steps = 1000;
  int batch = 256;
  bool gaussian_init = false;
  double init_sigma = -1.0;  // < 0 means 1/sqrt(d + d_e)
  uint64_t seed = 0;
  bool gaussian_x_query = false;
  long log_every = 100;

  struct Eval {
    long n_eval = 512;
    std::vector<int> T2_list;
    std::vector<int> q2_list;  // parallel to T2_list; empty -> task.q
    int T_max = 400;
  } eval;

  // Steps at which to snapshot the parameters (state before the update of
  // that step; the final state is always snapshotted when non-empty).
  std::vector<long> snapshot_steps;

  double threshold() const { return pe_threshold > 0 ? pe_threshold : delta; }
  int model_d_e() const { return pe_policy == PePolicyKind::OneHot ? task.T : d_e; }
  void validate() const;
};

struct TraceRow {
  long step = 0;
  double loss = 0.0;
  double inv_loss = 0.0;
  double cos_w = 0.0;
  double cos_v = 0.0;
  double C_hat = 0.0;
  double alpha_hat = 0.0;
  double s_plus_hat = 0.0;
  double offblock_ratio = 0.0;
  std::vector<double> ood;  // parallel to TrainTrace::ood_keys
};

struct TrainTrace {
  std::vector<std::pair<int, int>> ood_keys;  // (T2, q2)
  std::vector<TraceRow> rows;
};

enum class TrainStatus { Ok, PeSamplingFailed, Diverged };

struct TrainResult {
  model::ModelParams params;
  TrainTrace trace;
  pe::PosEncoding fixed_pe;  // T_max-column encoding (FixedRademacher only)
  TrainStatus status = TrainStatus::Ok;
  std::string message;
  std::vector<std::pair<long, model::ModelParams>> snapshots;
};

// Online fresh-batch training. Deterministic given cfg (bitwise), regardless
// of STS_THREADS. On PE-sampling failure or divergence, returns the trace
// accumulated so far with the corresponding status instead of throwing, so
// callers can persist partial artifacts.
TrainResult train(const TrainConfig& cfg);

// Monte-Carlo in-distribution loss (1/2 |.|^2) over n_eval fresh samples.
// Stochastic policy resamples an encoding per sample; fixed_pe must be
// given for FixedRademacher (its T-prefix is used). Returns (mean, stderr).
std::pair<double, double> estimate_loss(const model::ModelParams& params,
                                        const TrainConfig& cfg, long n_eval,
                                        PePolicyKind policy,
                                        const pe::PosEncoding* fixed_pe = nullptr,
                                        uint64_t eval_tag = 0);

// Same, sampling from D_{T2,q2}. FixedRademacher uses the T2-prefix of the
// pre-sampled T_max encoding.
std::pair<double, double> eval_ood(const model::ModelParams& params,
                                   const TrainConfig& cfg, int T2, int q2,
                                   PePolicyKind policy,
                                   const pe::PosEncoding* fixed_pe = nullptr,
                                   uint64_t eval_tag = 0);

struct FreezeReport {
  double fixed_loss = 0.0;
  double fixed_std_err = 0.0;
  double stochastic_loss = 0.0;
  double stochastic_std_err = 0.0;
};

// Sample one fresh encoding, evaluate the trained model under it as a fixed
// encoding, and report next to the stochastic-policy estimate.
FreezeReport freeze_and_retest(const model::ModelParams& params,
                               const TrainConfig& cfg, long n_eval,
                               uint64_t which = 0);

// First T2 columns of a wider encoding (column subset keeps the pairwise
// property).
pe::PosEncoding prefix_encoding(const pe::PosEncoding& pe, int T2);

}  // namespace sts::train
