#include "sts/fcn.hpp"

#include <cmath>

#include "sts/optim.hpp"

namespace sts::fcn {

namespace {

inline double act(double x, Activation a) {
  return a == Activation::ReLU ? (x > 0.0 ? x : 0.0) : x;
}
inline double act_deriv(double pre, Activation a) {
  return a == Activation::ReLU ? (pre > 0.0 ? 1.0 : 0.0) : 1.0;
}

void matvec(const num::Mat& W, const std::vector<double>& x,
            std::vector<double>& out) {
  out.assign(W.rows, 0.0);
  for (int i = 0; i < W.rows; ++i) {
    const double* r = W.row(i);
    double s = 0.0;
    for (int j = 0; j < W.cols; ++j) s += r[j] * x[j];
    out[i] = s;
  }
}

}  // namespace

FcnParams make_fcn(num::RngStream& rng, int T, int q, int d, int m,
                   Activation a, YEncoding yenc) {
  int in_dim = d * T + (yenc == YEncoding::RawIndex ? q : T);
  FcnParams p;
  p.activation = a;
  p.y_encoding = yenc;
  auto layer = [&](int rows, int cols) {
    num::Mat w = num::gaussian_matrix(rng, rows, cols);
    double s = 1.0 / std::sqrt(static_cast<double>(cols));
    for (double& x : w.a) x *= s;
    return w;
  };
  p.layers.push_back(layer(m, in_dim));
  p.layers.push_back(layer(m, m));
  p.layers.push_back(layer(d, m));
  return p;
}

std::vector<double> make_input(const task::Sample& s, YEncoding yenc, int T) {
  int d = s.X.rows;
  std::vector<double> x;
  x.reserve(static_cast<size_t>(d) * T +
            (yenc == YEncoding::RawIndex ? s.y.size() : static_cast<size_t>(T)));
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < d; ++i) x.push_back(s.X.at(i, t));
  if (yenc == YEncoding::RawIndex) {
    for (int j : s.y) x.push_back(static_cast<double>(j + 1));
  } else {
    std::vector<double> qh = task::q_hot(s.y, T);
    x.insert(x.end(), qh.begin(), qh.end());
  }
  return x;
}

std::vector<double> fcn_forward(const FcnParams& p, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != p.input_dim())
    fail(ErrorCode::Shape, "fcn_forward: input dimension mismatch");
  std::vector<double> cur = x, nxt;
  for (size_t l = 0; l < p.layers.size(); ++l) {
    matvec(p.layers[l], cur, nxt);
    if (l + 1 < p.layers.size())
      for (double& v : nxt) v = act(v, p.activation);
    cur.swap(nxt);
  }
  return cur;
}

std::vector<num::Mat> fcn_gradients(const FcnParams& p, const FcnBatch& batch) {
  size_t L = p.layers.size();
  std::vector<num::Mat> grads;
  for (const auto& w : p.layers) grads.emplace_back(w.rows, w.cols);
  if (batch.inputs.empty()) return grads;

  std::vector<std::vector<double>> pre(L), post(L);
  for (size_t bi = 0; bi < batch.inputs.size(); ++bi) {
    const auto& x = batch.inputs[bi];
    // forward, keeping pre-activations
    const std::vector<double>* prev = &x;
    for (size_t l = 0; l < L; ++l) {
      matvec(p.layers[l], *prev, pre[l]);
      post[l] = pre[l];
      if (l + 1 < L)
        for (double& v : post[l]) v = act(v, p.activation);
      prev = &post[l];
    }
    // backward
    std::vector<double> delta = post[L - 1];
    for (size_t i = 0; i < delta.size(); ++i) delta[i] -= batch.targets[bi][i];
    for (size_t li = L; li-- > 0;) {
      const std::vector<double>& below = (li == 0) ? x : post[li - 1];
      num::Mat& g = grads[li];
      for (int i = 0; i < g.rows; ++i) {
        double di = delta[i];
        if (di == 0.0) continue;
        double* gr = g.row(i);
        for (int j = 0; j < g.cols; ++j) gr[j] += di * below[j];
      }
      if (li == 0) break;
      const num::Mat& w = p.layers[li];
      std::vector<double> nd(w.cols, 0.0);
      for (int i = 0; i < w.rows; ++i) {
        double di = delta[i];
        if (di == 0.0) continue;
        const double* wr = w.row(i);
        for (int j = 0; j < w.cols; ++j) nd[j] += wr[j] * di;
      }
      for (int j = 0; j < w.cols; ++j) nd[j] *= act_deriv(pre[li - 1][j], p.activation);
      delta.swap(nd);
    }
  }
  double inv = 1.0 / static_cast<double>(batch.inputs.size());
  for (auto& g : grads)
    for (double& v : g.a) v *= inv;
  return grads;
}

double lower_bound_value(int T, int q) {
  if (q < 1 || q >= T) fail(ErrorCode::Config, "lower_bound_value: need 1 <= q < T");
  return static_cast<double>(T - q) /
         (static_cast<double>(T) * q * (T - 1));
}

AdversarialPair adversarial_pair(const FcnParams& p, int T, int q, int d) {
  if (p.y_encoding != YEncoding::RawIndex)
    fail(ErrorCode::NotApplicable, "adversarial_pair: requires raw-index y encoding");
  int m = p.first_layer_width();
  int span = (T - q + 1) * d;
  if (m > span - 1)
    fail(ErrorCode::NotApplicable,
         "adversarial_pair: first-layer width exceeds (T-q+1)d - 1");

  // Columns of W1 acting on tokens q..T (1-based), i.e. flat offsets
  // (q-1)d .. Td of the input.
  num::Mat B(m, span);
  int off = (q - 1) * d;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < span; ++j) B.at(i, j) = p.layers[0].at(i, off + j);
  std::vector<double> u = num::null_space_vector(B);

  // xi = u / (2 max_j |u_j|), blocks of size d per token.
  int n_tok = T - q + 1;
  double max_norm = 0.0;
  int arg = 0;
  for (int j = 0; j < n_tok; ++j) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += u[j * d + i] * u[j * d + i];
    s = std::sqrt(s);
    if (s > max_norm + 1e-15) {
      max_norm = s;
      arg = j;
    }
  }
  std::vector<double> xi(u);
  for (double& x : xi) x /= 2.0 * max_norm;
  int j_star = q + arg;  // 1-based token index, always >= q

  AdversarialPair out;
  out.j_star = j_star;
  int in_dim = d * T + q;
  out.input_a.assign(in_dim, 0.0);
  for (int j = 0; j < span; ++j) out.input_a[off + j] = xi[j];
  // y = (1, ..., q-1, j*), fed as raw 1-based indices.
  for (int k = 0; k < q - 1; ++k) out.input_a[d * T + k] = k + 1;
  out.input_a[d * T + q - 1] = j_star;
  out.input_b = out.input_a;
  for (int j = 0; j < span; ++j) out.input_b[off + j] = -xi[j];

  // Targets: tokens 1..q-1 are zero, so STS = xi_{j*}/q and -xi_{j*}/q.
  out.target_a.assign(d, 0.0);
  for (int i = 0; i < d; ++i) out.target_a[i] = xi[arg * d + i] / q;
  out.target_b = out.target_a;
  for (double& x : out.target_b) x = -x;
  return out;
}

AverageBoundReport verify_average_bound(const FcnParams& p,
                                        const task::TaskConfig& cfg,
                                        long n_eval, num::RngStream& rng) {
  AverageBoundReport rep;
  rep.bound = lower_bound_value(cfg.T, cfg.q);
  rep.applicable = p.first_layer_width() <= cfg.T * cfg.d - 1;
  if (!rep.applicable) {
    fail(ErrorCode::NotApplicable,
         "verify_average_bound: first-layer width exceeds Td - 1");
  }
  double sum = 0.0, sum2 = 0.0;
  for (long i = 0; i < n_eval; ++i) {
    task::Sample s = task::sample_instance(rng, cfg);
    auto out = fcn_forward(p, make_input(s, p.y_encoding, cfg.T));
    double e = 0.0;
    for (int k = 0; k < cfg.d; ++k) {
      double r = out[k] - s.target[k];
      e += r * r;
    }
    sum += e;
    sum2 += e * e;
  }
  double n = static_cast<double>(n_eval);
  rep.mc_loss = sum / n;
  double var = std::max(0.0, sum2 / n - rep.mc_loss * rep.mc_loss);
  rep.std_err = std::sqrt(var / n);
  rep.margin = rep.mc_loss - rep.bound;
  return rep;
}

FcnParams train_fcn(const FcnTrainConfig& cfg) {
  cfg.task.validate();
  num::RngStream init_rng = num::RngStream::from(cfg.seed, "init");
  num::RngStream data_rng = num::RngStream::from(cfg.seed, "data");
  FcnParams p = make_fcn(init_rng, cfg.task.T, cfg.task.q, cfg.task.d, cfg.width,
                         cfg.activation, cfg.y_encoding);
  optim::Optimizer opt;
  opt.kind = cfg.adam ? optim::Optimizer::Kind::Adam : optim::Optimizer::Kind::SGD;

  FcnBatch batch;
  batch.inputs.resize(cfg.batch);
  batch.targets.resize(cfg.batch);
  for (long t = 0; t < cfg.steps; ++t) {
    num::RngStream step_rng = data_rng.substream(static_cast<uint64_t>(t));
    for (int b = 0; b < cfg.batch; ++b) {
      num::RngStream sr = step_rng.substream(static_cast<uint64_t>(b));
      task::Sample s = task::sample_instance(sr, cfg.task);
      batch.inputs[b] = make_input(s, cfg.y_encoding, cfg.task.T);
      batch.targets[b] = s.target;
    }
    auto grads = fcn_gradients(p, batch);
    std::vector<num::Mat*> params;
    std::vector<const num::Mat*> gptrs;
    for (size_t l = 0; l < p.layers.size(); ++l) {
      params.push_back(&p.layers[l]);
      gptrs.push_back(&grads[l]);
    }
    opt.step(params, gptrs, cfg.eta);
  }
  return p;
}

}  // namespace sts::fcn
