#include "sts/attention.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace sts::model {

ModelParams ModelParams::zero(int d, int d_e) {
  ModelParams p;
  p.d = d;
  p.d_e = d_e;
  p.W = num::Mat(d + d_e, d + d_e);
  p.V = num::Mat(d, d + d_e);
  return p;
}

void Gradients::add_scaled(const Gradients& g, double c) {
  for (size_t i = 0; i < dW.a.size(); ++i) dW.a[i] += c * g.dW.a[i];
  for (size_t i = 0; i < dV.a.size(); ++i) dV.a[i] += c * g.dV.a[i];
}

GroundTruth ground_truth(int d, int d_e, int T, pe::PeKind kind) {
  GroundTruth gt;
  gt.kind = kind;
  gt.W_star = num::Mat(d + d_e, d + d_e);
  gt.V_star = num::Mat(d, d + d_e);
  for (int i = 0; i < d; ++i) gt.V_star.at(i, i) = 1.0;
  if (kind == pe::PeKind::OneHot) {
    if (d_e != T) fail(ErrorCode::Shape, "ground_truth: one-hot requires d_e == T");
    for (int i = 0; i < T; ++i)
      for (int j = 0; j < T; ++j)
        gt.W_star.at(d + i, d + j) = (i == j ? 1.0 : 0.0) - 1.0 / T;
  } else {
    for (int i = 0; i < d_e; ++i) gt.W_star.at(d + i, d + i) = 1.0;
  }
  return gt;
}

namespace {

struct EvalOut {
  std::vector<double> S;    // attention, length T
  std::vector<double> m;    // Z S, length d+d_e
  std::vector<double> out;  // V m, length d
};

EvalOut eval_attention(const ModelParams& p, const task::AssembledInput& in) {
  int n = p.d + p.d_e;
  int T = in.Z.cols;
  if (in.Z.rows != n)
    fail(ErrorCode::Shape, "attention: input/params dimension mismatch");

  std::vector<double> Wz(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double* wr = p.W.row(i);
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += wr[j] * in.z_query[j];
    Wz[i] = s;
  }
  std::vector<double> scores(T, 0.0);
  for (int i = 0; i < n; ++i) {
    const double* zr = in.Z.row(i);
    double wi = Wz[i];
    if (wi == 0.0) continue;
    for (int t = 0; t < T; ++t) scores[t] += zr[t] * wi;
  }
  EvalOut e;
  e.S = num::softmax_col(scores);
  e.m.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double* zr = in.Z.row(i);
    double s = 0.0;
    for (int t = 0; t < T; ++t) s += zr[t] * e.S[t];
    e.m[i] = s;
  }
  e.out.assign(p.d, 0.0);
  for (int i = 0; i < p.d; ++i) {
    const double* vr = p.V.row(i);
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += vr[j] * e.m[j];
    e.out[i] = s;
  }
  return e;
}

// Accumulate -dW into acc.dW given residual r and the sample's softmax
// geometry; also -dV when dv_m is provided. Returns nothing; factored so the
// nested estimator can mix residuals and encodings.
void accumulate_gradient(const ModelParams& p, const task::AssembledInput& in,
                         const EvalOut& e, const std::vector<double>& r,
                         Gradients& acc, double weight) {
  int n = p.d + p.d_e;
  int T = in.Z.cols;
  std::vector<double> u(n, 0.0);
  for (int i = 0; i < p.d; ++i) {
    const double* vr = p.V.row(i);
    double ri = r[i];
    if (ri == 0.0) continue;
    for (int j = 0; j < n; ++j) u[j] += vr[j] * ri;
  }
  std::vector<double> w(T, 0.0);
  for (int i = 0; i < n; ++i) {
    const double* zr = in.Z.row(i);
    double ui = u[i];
    if (ui == 0.0) continue;
    for (int t = 0; t < T; ++t) w[t] += zr[t] * ui;
  }
  double sw = 0.0;
  for (int t = 0; t < T; ++t) sw += e.S[t] * w[t];
  std::vector<double> v(T);
  for (int t = 0; t < T; ++t) v[t] = e.S[t] * (w[t] - sw);
  std::vector<double> g(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double* zr = in.Z.row(i);
    double s = 0.0;
    for (int t = 0; t < T; ++t) s += zr[t] * v[t];
    g[i] = s;
  }
  // dW -= weight * g z_query^T
  for (int i = 0; i < n; ++i) {
    double gi = weight * g[i];
    if (gi == 0.0) continue;
    double* dwr = acc.dW.row(i);
    for (int j = 0; j < n; ++j) dwr[j] -= gi * in.z_query[j];
  }
}

void accumulate_dv(const std::vector<double>& r, const std::vector<double>& m,
                   Gradients& acc, double weight, int d, int n) {
  for (int i = 0; i < d; ++i) {
    double ri = weight * r[i];
    if (ri == 0.0) continue;
    double* dvr = acc.dV.row(i);
    for (int j = 0; j < n; ++j) dvr[j] -= ri * m[j];
  }
}

}  // namespace

std::vector<double> attention(const ModelParams& p, const task::AssembledInput& in) {
  return eval_attention(p, in).S;
}

std::vector<double> forward(const ModelParams& p, const task::AssembledInput& in) {
  return eval_attention(p, in).out;
}

double sample_loss(const ModelParams& p, const task::Sample& s,
                   const pe::PosEncoding& pe, const std::vector<double>& x_query) {
  return sample_eval(p, s, pe, x_query, nullptr);
}

double sample_eval(const ModelParams& p, const task::Sample& s,
                   const pe::PosEncoding& pe, const std::vector<double>& x_query,
                   double* s_plus) {
  auto in = task::assemble(s, pe, x_query);
  auto e = eval_attention(p, in);
  double l = 0.0;
  for (int i = 0; i < p.d; ++i) {
    double r = s.target[i] - e.out[i];
    l += r * r;
  }
  if (s_plus) {
    double sp = 0.0;
    for (int j : s.y) sp += e.S[j];
    *s_plus = sp / static_cast<double>(s.y.size());
  }
  return 0.5 * l;
}

Gradients sample_gradients(const ModelParams& p, const task::Sample& s,
                           const pe::PosEncoding& pe,
                           const std::vector<double>& x_query) {
  int n = p.d + p.d_e;
  Gradients g;
  g.dW = num::Mat(n, n);
  g.dV = num::Mat(p.d, n);
  auto in = task::assemble(s, pe, x_query);
  auto e = eval_attention(p, in);
  std::vector<double> r(p.d);
  for (int i = 0; i < p.d; ++i) r[i] = s.target[i] - e.out[i];
  accumulate_dv(r, e.m, g, 1.0, p.d, n);
  accumulate_gradient(p, in, e, r, g, 1.0);
  return g;
}

int worker_count() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("STS_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1 && v < static_cast<long>(hw)) hw = static_cast<unsigned>(v);
    if (v >= static_cast<long>(hw)) hw = static_cast<unsigned>(v);
  }
  return static_cast<int>(hw);
}

Gradients batch_gradients(const ModelParams& p, const std::vector<task::Sample>& batch,
                          const PePolicy& policy, const num::RngStream& rng,
                          const std::vector<std::vector<double>>* x_queries,
                          BatchStats* stats) {
  if (batch.empty()) fail(ErrorCode::Config, "batch_gradients: empty batch");
  int n = p.d + p.d_e;
  int T = batch[0].X.cols;
  int q = static_cast<int>(batch[0].y.size());
  std::vector<double> zero_q(p.d, 0.0);

  // ResamplePerStep: one shared fresh encoding for the whole step.
  pe::PosEncoding shared;
  const pe::PosEncoding* fixed = policy.fixed;
  if (policy.kind == PePolicy::Kind::ResamplePerStep) {
    num::RngStream r = rng.substream(0);
    shared = pe::sample_rip_pe(r, policy.d_e, T, policy.q, policy.threshold,
                               policy.mode, policy.max_attempts);
    fixed = &shared;
  }
  if (policy.kind != PePolicy::Kind::Nested && fixed == nullptr)
    fail(ErrorCode::Config, "batch_gradients: Fixed policy without encoding");

  const int chunk_size = 512;
  int n_chunks = (static_cast<int>(batch.size()) + chunk_size - 1) / chunk_size;

  struct Partial {
    Gradients g;
    double loss = 0.0;
    double splus = 0.0;
  };
  std::vector<Partial> parts(n_chunks);
  for (auto& pt : parts) {
    pt.g.dW = num::Mat(n, n);
    pt.g.dV = num::Mat(p.d, n);
  }

  auto do_sample = [&](size_t idx, Partial& pt) {
    const task::Sample& s = batch[idx];
    const std::vector<double>& xq = x_queries ? (*x_queries)[idx] : zero_q;
    if (policy.kind != PePolicy::Kind::Nested) {
      auto in = task::assemble(s, *fixed, xq);
      auto e = eval_attention(p, in);
      std::vector<double> r(p.d);
      double l = 0.0;
      for (int i = 0; i < p.d; ++i) {
        r[i] = s.target[i] - e.out[i];
        l += r[i] * r[i];
      }
      pt.loss += 0.5 * l;
      double sp = 0.0;
      for (int j : s.y) sp += e.S[j];
      pt.splus += sp / q;
      accumulate_dv(r, e.m, pt.g, 1.0, p.d, n);
      accumulate_gradient(p, in, e, r, pt.g, 1.0);
      return;
    }
    // Nested estimator: inner mean of the softmax output over fresh
    // encodings gives the residual; outer draws average the dW integrand.
    num::RngStream srng = rng.substream(idx + 1);
    std::vector<double> mbar(n, 0.0);
    for (int k = 0; k < policy.n_inner; ++k) {
      num::RngStream er = srng.substream(1, k);
      auto E = pe::sample_rip_pe(er, policy.d_e, T, policy.q, policy.threshold,
                                 policy.mode, policy.max_attempts);
      auto in = task::assemble(s, E, xq);
      auto e = eval_attention(p, in);
      for (int i = 0; i < n; ++i) mbar[i] += e.m[i];
    }
    for (double& x : mbar) x /= policy.n_inner;
    std::vector<double> out(p.d, 0.0);
    for (int i = 0; i < p.d; ++i) {
      const double* vr = p.V.row(i);
      double sum = 0.0;
      for (int j = 0; j < n; ++j) sum += vr[j] * mbar[j];
      out[i] = sum;
    }
    std::vector<double> r(p.d);
    double l = 0.0;
    for (int i = 0; i < p.d; ++i) {
      r[i] = s.target[i] - out[i];
      l += r[i] * r[i];
    }
    pt.loss += 0.5 * l;
    accumulate_dv(r, mbar, pt.g, 1.0, p.d, n);
    for (int k = 0; k < policy.n_outer; ++k) {
      num::RngStream er = srng.substream(2, k);
      auto E = pe::sample_rip_pe(er, policy.d_e, T, policy.q, policy.threshold,
                                 policy.mode, policy.max_attempts);
      auto in = task::assemble(s, E, xq);
      auto e = eval_attention(p, in);
      double sp = 0.0;
      for (int j : s.y) sp += e.S[j];
      pt.splus += sp / (q * static_cast<double>(policy.n_outer));
      accumulate_gradient(p, in, e, r, pt.g, 1.0 / policy.n_outer);
    }
  };

  int workers = std::min(worker_count(), n_chunks);
  if (workers <= 1) {
    for (int c = 0; c < n_chunks; ++c) {
      size_t lo = static_cast<size_t>(c) * chunk_size;
      size_t hi = std::min(batch.size(), lo + chunk_size);
      for (size_t i = lo; i < hi; ++i) do_sample(i, parts[c]);
    }
  } else {
    std::atomic<int> next{0};
    auto work = [&]() {
      for (;;) {
        int c = next.fetch_add(1);
        if (c >= n_chunks) return;
        size_t lo = static_cast<size_t>(c) * chunk_size;
        size_t hi = std::min(batch.size(), lo + chunk_size);
        for (size_t i = lo; i < hi; ++i) do_sample(i, parts[c]);
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  Gradients total;
  total.dW = num::Mat(n, n);
  total.dV = num::Mat(p.d, n);
  double loss = 0.0, splus = 0.0;
  for (int c = 0; c < n_chunks; ++c) {
    total.add_scaled(parts[c].g, 1.0);
    loss += parts[c].loss;
    splus += parts[c].splus;
  }
  double inv = 1.0 / static_cast<double>(batch.size());
  for (double& x : total.dW.a) x *= inv;
  for (double& x : total.dV.a) x *= inv;
  if (stats) {
    stats->mean_loss = loss * inv;
    stats->mean_s_plus = splus * inv;
  }
  total.dW.check_finite("batch_gradients");
  total.dV.check_finite("batch_gradients");
  return total;
}

ModelParams construct_expressivity(int d, int d_e, double alpha_scale) {
  if (alpha_scale < 0)
    fail(ErrorCode::Config, "construct_expressivity: alpha_scale must be >= 0");
  ModelParams p = ModelParams::zero(d, d_e);
  for (int i = 0; i < d_e; ++i) p.W.at(d + i, d + i) = alpha_scale;
  for (int i = 0; i < d; ++i) p.V.at(i, i) = 1.0;
  return p;
}

std::pair<double, double> cosine_diagnostics(const ModelParams& p,
                                             const GroundTruth& gt) {
  return {num::frobenius_cosine(p.W, gt.W_star),
          num::frobenius_cosine(p.V, gt.V_star)};
}

Scalars extract_scalars(const ModelParams& p, pe::PeKind kind) {
  int d = p.d, d_e = p.d_e, n = d + d_e;
  Scalars sc;

  double diag = 0.0, off = 0.0;
  for (int i = 0; i < d_e; ++i)
    for (int j = 0; j < d_e; ++j) {
      if (i == j)
        diag += p.W.at(d + i, d + j);
      else
        off += p.W.at(d + i, d + j);
    }
  diag /= d_e;
  if (d_e > 1) off /= static_cast<double>(d_e) * (d_e - 1);
  sc.C_hat = (kind == pe::PeKind::OneHot) ? diag - off : diag;

  double vdiag = 0.0;
  for (int i = 0; i < d; ++i) vdiag += p.V.at(i, i);
  sc.alpha_hat = vdiag / d;

  double des = 0.0, nondes = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double x = p.W.at(i, j) * p.W.at(i, j);
      if (i >= d && j >= d)
        des += x;
      else
        nondes += x;
    }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < n; ++j) {
      double x = p.V.at(i, j) * p.V.at(i, j);
      if (j < d)
        des += x;
      else
        nondes += x;
    }
  if (des < 1e-300 && nondes < 1e-300)
    sc.offblock_ratio = 0.0;
  else
    sc.offblock_ratio = std::sqrt(nondes) / std::max(std::sqrt(des), 1e-300);
  return sc;
}

}  // namespace sts::model
