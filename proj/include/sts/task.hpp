#pragma once

#include <vector>

#include "sts/encoding.hpp"
#include "sts/numerics.hpp"

namespace sts::task {

struct TaskConfig {
  int T = 0;  // sequence length
  int q = 0;  // subset size, 2 <= q < T
  int d = 0;  // token dimension

  void validate() const;
};

// One task instance. y is a sorted 0-based q-subset of {0..T-1};
// target = (1/q) * sum of the selected columns of X.
struct Sample {
  num::Mat X;  // d x T
  std::vector<int> y;
  std::vector<double> target;  // length d
};

// Transformer input: Z stacks X (top d rows) over E (bottom d_e rows);
// z_query stacks x_query over e_y.
struct AssembledInput {
  num::Mat Z;                    // (d+d_e) x T
  std::vector<double> z_query;   // length d+d_e
  int d = 0;
  int d_e = 0;
};

Sample sample_instance(num::RngStream& rng, const TaskConfig& cfg);

// Indicator vector with ones at the positions in y.
std::vector<double> q_hot(const std::vector<int>& y, int T);

AssembledInput assemble(const Sample& s, const pe::PosEncoding& pe,
                        const std::vector<double>& x_query);

}  // namespace sts::task
