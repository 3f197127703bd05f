#include "sts/task.hpp"

#include <algorithm>

namespace sts::task {

void TaskConfig::validate() const {
  if (q < 2 || q >= T || d < 1)
    fail(ErrorCode::Config, "TaskConfig: requires 2 <= q < T and d >= 1");
}

Sample sample_instance(num::RngStream& rng, const TaskConfig& cfg) {
  cfg.validate();
  Sample s;
  s.X = num::gaussian_matrix(rng, cfg.d, cfg.T);

  // Uniform q-subset via partial Fisher-Yates on [0, T), then sort.
  std::vector<int> perm(cfg.T);
  for (int i = 0; i < cfg.T; ++i) perm[i] = i;
  for (int i = 0; i < cfg.q; ++i) {
    int j = i + static_cast<int>(rng.below(static_cast<uint64_t>(cfg.T - i)));
    std::swap(perm[i], perm[j]);
  }
  s.y.assign(perm.begin(), perm.begin() + cfg.q);
  std::sort(s.y.begin(), s.y.end());

  s.target.assign(cfg.d, 0.0);
  for (int j : s.y)
    for (int i = 0; i < cfg.d; ++i) s.target[i] += s.X.at(i, j);
  for (double& x : s.target) x /= cfg.q;
  return s;
}

std::vector<double> q_hot(const std::vector<int>& y, int T) {
  std::vector<double> v(T, 0.0);
  for (int i : y) {
    if (i < 0 || i >= T) fail(ErrorCode::Config, "q_hot: index out of range");
    v[i] = 1.0;
  }
  return v;
}

AssembledInput assemble(const Sample& s, const pe::PosEncoding& pe,
                        const std::vector<double>& x_query) {
  int d = s.X.rows, T = s.X.cols, d_e = pe.d_e;
  if (pe.T != T) fail(ErrorCode::Shape, "assemble: encoding T mismatch");
  if (static_cast<int>(x_query.size()) != d)
    fail(ErrorCode::Shape, "assemble: x_query length mismatch");

  AssembledInput in;
  in.d = d;
  in.d_e = d_e;
  in.Z = num::Mat(d + d_e, T);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < T; ++j) in.Z.at(i, j) = s.X.at(i, j);
  for (int i = 0; i < d_e; ++i)
    for (int j = 0; j < T; ++j) in.Z.at(d + i, j) = pe.E.at(i, j);

  pe::SubsetEncoding enc = pe::subset_encoding(pe, s.y);
  in.z_query.resize(d + d_e);
  for (int i = 0; i < d; ++i) in.z_query[i] = x_query[i];
  for (int i = 0; i < d_e; ++i) in.z_query[d + i] = enc.e_y[i];
  return in;
}

}  // namespace sts::task
