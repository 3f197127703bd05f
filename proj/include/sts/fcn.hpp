#pragma once

#include <vector>

#include "sts/numerics.hpp"
#include "sts/task.hpp"

namespace sts::fcn {

enum class Activation { ReLU, Identity };
enum class YEncoding { RawIndex, QHot };

// Feed-forward network f(x) = W_L s(W_{L-1} ... s(W_1 x)), no biases.
// Input is the flattened [x_1^T, ..., x_T^T, y-encoding].
struct FcnParams {
  std::vector<num::Mat> layers;  // W_1 ... W_L
  Activation activation = Activation::ReLU;
  YEncoding y_encoding = YEncoding::RawIndex;

  int input_dim() const { return layers.front().cols; }
  int output_dim() const { return layers.back().rows; }
  int first_layer_width() const { return layers.front().rows; }
};

// Depth-3 network (hidden widths m, m) with N(0, 1/fan_in) init.
FcnParams make_fcn(num::RngStream& rng, int T, int q, int d, int m,
                   Activation act = Activation::ReLU,
                   YEncoding yenc = YEncoding::RawIndex);

// Flatten a task sample into the FCN input format. Raw y indices are fed
// 1-based so that index 0 never collides with a valid position.
std::vector<double> make_input(const task::Sample& s, YEncoding yenc, int T);

std::vector<double> fcn_forward(const FcnParams& p, const std::vector<double>& x);

struct FcnBatch {
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<double>> targets;
};

// Gradient of the mean of 1/2 |target - f(x)|^2 over the batch.
std::vector<num::Mat> fcn_gradients(const FcnParams& p, const FcnBatch& batch);

// Average-case lower bound (un-halved squared error) for first-layer width
// <= Td - 1: (T-q)/(T q (T-1)).
double lower_bound_value(int T, int q);

struct AdversarialPair {
  std::vector<double> input_a;
  std::vector<double> input_b;
  std::vector<double> target_a;  // STS value for input_a
  std::vector<double> target_b;
  int j_star = 0;  // 1-based token index carrying the signal
};

// Worst-case construction: a null-space direction of the first-layer block
// acting on tokens q..T yields two inputs with identical first-layer
// pre-activations but targets 1/q apart in norm.
// Requires first_layer_width <= (T-q+1)d - 1 (NotApplicable otherwise) and
// y_encoding == RawIndex (the proof fixes y = (1,...,q-1, j*)).
AdversarialPair adversarial_pair(const FcnParams& p, int T, int q, int d);

struct AverageBoundReport {
  double mc_loss = 0.0;  // Monte-Carlo E |f - target|^2 (un-halved)
  double std_err = 0.0;
  double bound = 0.0;
  bool applicable = false;  // first-layer width <= T d - 1
  double margin = 0.0;      // mc_loss - bound
};

AverageBoundReport verify_average_bound(const FcnParams& p,
                                        const task::TaskConfig& cfg,
                                        long n_eval, num::RngStream& rng);

struct FcnTrainConfig {
  task::TaskConfig task;
  int width = 8;
  long steps = 1000;
  int batch = 128;
  double eta = 1e-3;
  bool adam = true;
  uint64_t seed = 0;
  Activation activation = Activation::ReLU;
  YEncoding y_encoding = YEncoding::RawIndex;
};

// Online SGD/Adam on fresh batches; returns the trained network.
FcnParams train_fcn(const FcnTrainConfig& cfg);

}  // namespace sts::fcn
