#include "sts/trainer.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

#include "sts/optim.hpp"

namespace sts::train {

void TrainConfig::validate() const {
  task.validate();
  if (eta <= 0.0) fail(ErrorCode::Config, "TrainConfig: eta must be > 0");
  if (steps < 1) fail(ErrorCode::Config, "TrainConfig: steps must be >= 1");
  if (batch < 1) fail(ErrorCode::Config, "TrainConfig: batch must be >= 1");
  if (log_every < 1) fail(ErrorCode::Config, "TrainConfig: log_every must be >= 1");
  if (pe_policy != PePolicyKind::OneHot && d_e < 1)
    fail(ErrorCode::Config, "TrainConfig: d_e must be >= 1 for Rademacher policies");
  if (!eval.q2_list.empty() && eval.q2_list.size() != eval.T2_list.size())
    fail(ErrorCode::Config, "TrainConfig: q2_list must be empty or match T2_list");
  for (size_t i = 0; i < eval.T2_list.size(); ++i) {
    int T2 = eval.T2_list[i];
    int q2 = eval.q2_list.empty() ? task.q : eval.q2_list[i];
    if (T2 > eval.T_max)
      fail(ErrorCode::Config, "TrainConfig: T2 entries must be <= T_max");
    if (q2 < task.q)
      fail(ErrorCode::Config, "TrainConfig: eval q2 must be >= task.q");
    if (q2 >= T2) fail(ErrorCode::Config, "TrainConfig: eval q2 must be < T2");
    if (pe_policy == PePolicyKind::OneHot && T2 != task.T)
      fail(ErrorCode::Config,
           "TrainConfig: one-hot policy cannot evaluate at T2 != T "
           "(encoding dimension is tied to T)");
  }
}

pe::PosEncoding prefix_encoding(const pe::PosEncoding& src, int T2) {
  if (T2 > src.T) fail(ErrorCode::Config, "prefix_encoding: T2 exceeds source T");
  pe::PosEncoding out;
  out.kind = src.kind;
  out.delta = src.delta;
  out.T = T2;
  out.d_e = src.d_e;
  out.E = num::Mat(src.d_e, T2);
  for (int i = 0; i < src.d_e; ++i)
    for (int j = 0; j < T2; ++j) out.E.at(i, j) = src.E.at(i, j);
  return out;
}

namespace {

struct McAccum {
  double sum = 0.0;
  double sum2 = 0.0;
  double splus = 0.0;
};

// Chunked deterministic parallel Monte-Carlo evaluation.
McAccum mc_eval(const model::ModelParams& params, const task::TaskConfig& tcfg,
                const TrainConfig& cfg, PePolicyKind policy,
                const pe::PosEncoding* fixed, long n_eval,
                const num::RngStream& base) {
  std::vector<double> zero_q(tcfg.d, 0.0);
  pe::PosEncoding onehot;
  if (policy == PePolicyKind::OneHot) onehot = pe::one_hot_pe(tcfg.T);

  const long chunk = 256;
  long n_chunks = (n_eval + chunk - 1) / chunk;
  std::vector<McAccum> parts(static_cast<size_t>(n_chunks));

  auto do_one = [&](long i, McAccum& acc) {
    num::RngStream sr = base.substream(static_cast<uint64_t>(i));
    task::Sample s = task::sample_instance(sr, tcfg);
    const pe::PosEncoding* E = nullptr;
    pe::PosEncoding fresh;
    switch (policy) {
      case PePolicyKind::OneHot:
        E = &onehot;
        break;
      case PePolicyKind::FixedRademacher:
        E = fixed;
        break;
      case PePolicyKind::Stochastic: {
        num::RngStream er = sr.substream(1);
        fresh = pe::sample_rip_pe(er, cfg.d_e, tcfg.T, tcfg.q, cfg.threshold(),
                                  cfg.rip_mode, cfg.max_attempts);
        E = &fresh;
        break;
      }
    }
    double sp = 0.0;
    double l = model::sample_eval(params, s, *E, zero_q, &sp);
    acc.sum += l;
    acc.sum2 += l * l;
    acc.splus += sp;
  };

  int workers = std::min<long>(model::worker_count(), n_chunks);
  if (workers <= 1) {
    for (long c = 0; c < n_chunks; ++c)
      for (long i = c * chunk; i < std::min(n_eval, (c + 1) * chunk); ++i)
        do_one(i, parts[static_cast<size_t>(c)]);
  } else {
    std::atomic<long> next{0};
    auto work = [&]() {
      for (;;) {
        long c = next.fetch_add(1);
        if (c >= n_chunks) return;
        for (long i = c * chunk; i < std::min(n_eval, (c + 1) * chunk); ++i)
          do_one(i, parts[static_cast<size_t>(c)]);
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  McAccum total;
  for (const auto& p : parts) {
    total.sum += p.sum;
    total.sum2 += p.sum2;
    total.splus += p.splus;
  }
  return total;
}

std::pair<double, double> mean_stderr(const McAccum& a, long n) {
  double mean = a.sum / n;
  double var = std::max(0.0, a.sum2 / n - mean * mean);
  return {mean, std::sqrt(var / n)};
}

}  // namespace

std::pair<double, double> estimate_loss(const model::ModelParams& params,
                                        const TrainConfig& cfg, long n_eval,
                                        PePolicyKind policy,
                                        const pe::PosEncoding* fixed_pe,
                                        uint64_t eval_tag) {
  if (n_eval < 1) fail(ErrorCode::Config, "estimate_loss: n_eval must be >= 1");
  pe::PosEncoding prefix;
  const pe::PosEncoding* fixed = nullptr;
  if (policy == PePolicyKind::FixedRademacher) {
    if (!fixed_pe) fail(ErrorCode::Config, "estimate_loss: fixed policy needs an encoding");
    prefix = prefix_encoding(*fixed_pe, cfg.task.T);
    fixed = &prefix;
  }
  num::RngStream base =
      num::RngStream::from(cfg.seed, "eval").substream(eval_tag, 0);
  McAccum a = mc_eval(params, cfg.task, cfg, policy, fixed, n_eval, base);
  return mean_stderr(a, n_eval);
}

std::pair<double, double> eval_ood(const model::ModelParams& params,
                                   const TrainConfig& cfg, int T2, int q2,
                                   PePolicyKind policy,
                                   const pe::PosEncoding* fixed_pe,
                                   uint64_t eval_tag) {
  if (T2 > cfg.eval.T_max) fail(ErrorCode::Config, "eval_ood: T2 exceeds T_max");
  task::TaskConfig t2 = cfg.task;
  t2.T = T2;
  t2.q = q2;
  t2.validate();
  pe::PosEncoding prefix;
  const pe::PosEncoding* fixed = nullptr;
  if (policy == PePolicyKind::FixedRademacher) {
    if (!fixed_pe) fail(ErrorCode::Config, "eval_ood: fixed policy needs an encoding");
    prefix = prefix_encoding(*fixed_pe, T2);
    fixed = &prefix;
  } else if (policy == PePolicyKind::OneHot && T2 != cfg.task.T) {
    fail(ErrorCode::Config, "eval_ood: one-hot policy cannot change T");
  }
  num::RngStream base = num::RngStream::from(cfg.seed, "eval")
                            .substream(eval_tag, 0x0DDull * T2 + q2);
  McAccum a = mc_eval(params, t2, cfg, policy, fixed, cfg.eval.n_eval, base);
  return mean_stderr(a, cfg.eval.n_eval);
}

TrainResult train(const TrainConfig& cfg) {
  cfg.validate();
  if (!(cfg.task.q >= 2 && 4 * cfg.task.q < cfg.task.T))
    std::fprintf(stderr,
                 "[trainer] warning: (T=%d, q=%d) outside the 2 <= q < T/4 "
                 "regime the theory assumes\n",
                 cfg.task.T, cfg.task.q);

  TrainResult res;
  int d = cfg.task.d, T = cfg.task.T;
  int d_e = cfg.model_d_e();
  res.params = model::ModelParams::zero(d, d_e);

  num::RngStream init_rng = num::RngStream::from(cfg.seed, "init");
  num::RngStream data_rng = num::RngStream::from(cfg.seed, "data");
  num::RngStream pe_rng = num::RngStream::from(cfg.seed, "pe");
  num::RngStream eval_rng = num::RngStream::from(cfg.seed, "eval");

  if (cfg.gaussian_init) {
    double sigma = cfg.init_sigma > 0 ? cfg.init_sigma
                                      : 1.0 / std::sqrt(static_cast<double>(d + d_e));
    res.params.W = num::gaussian_matrix(init_rng, d + d_e, d + d_e);
    res.params.V = num::gaussian_matrix(init_rng, d, d + d_e);
    for (double& x : res.params.W.a) x *= sigma;
    for (double& x : res.params.V.a) x *= sigma;
  }

  pe::PosEncoding onehot;
  pe::PosEncoding train_prefix;
  pe::PeKind gt_kind = pe::PeKind::Rademacher;
  if (cfg.pe_policy == PePolicyKind::OneHot) {
    onehot = pe::one_hot_pe(T);
    gt_kind = pe::PeKind::OneHot;
  } else if (cfg.pe_policy == PePolicyKind::FixedRademacher) {
    int t_max = std::max(cfg.eval.T_max, T);
    try {
      res.fixed_pe = pe::sample_rip_pe(pe_rng, cfg.d_e, t_max, cfg.task.q,
                                       cfg.threshold(), cfg.rip_mode,
                                       cfg.max_attempts);
    } catch (const Error& e) {
      res.status = TrainStatus::PeSamplingFailed;
      res.message = e.what();
      return res;
    }
    train_prefix = prefix_encoding(res.fixed_pe, T);
  }

  model::GroundTruth gt = model::ground_truth(d, d_e, T, gt_kind);

  for (size_t i = 0; i < cfg.eval.T2_list.size(); ++i)
    res.trace.ood_keys.emplace_back(
        cfg.eval.T2_list[i],
        cfg.eval.q2_list.empty() ? cfg.task.q : cfg.eval.q2_list[i]);

  optim::Optimizer opt;
  opt.kind = cfg.adam ? optim::Optimizer::Kind::Adam : optim::Optimizer::Kind::SGD;
  opt.beta1 = cfg.beta1;
  opt.beta2 = cfg.beta2;
  opt.eps = cfg.eps_adam;

  auto log_row = [&](long t) {
    TraceRow row;
    row.step = t;
    const pe::PosEncoding* fixed = nullptr;
    if (cfg.pe_policy == PePolicyKind::OneHot)
      fixed = &onehot;
    else if (cfg.pe_policy == PePolicyKind::FixedRademacher)
      fixed = &train_prefix;
    // Common random numbers across rows: the same eval set at every logged
    // step, so the loss curve is comparable along the trajectory.
    num::RngStream base = eval_rng.substream(0, 1);
    McAccum a = mc_eval(res.params, cfg.task, cfg, cfg.pe_policy, fixed,
                        cfg.eval.n_eval, base);
    row.loss = a.sum / cfg.eval.n_eval;
    row.inv_loss = 1.0 / std::max(row.loss, 1e-300);
    row.s_plus_hat = a.splus / cfg.eval.n_eval;
    auto [cw, cv] = model::cosine_diagnostics(res.params, gt);
    row.cos_w = cw;
    row.cos_v = cv;
    model::Scalars sc = model::extract_scalars(res.params, gt_kind);
    row.C_hat = sc.C_hat;
    row.alpha_hat = sc.alpha_hat;
    row.offblock_ratio = sc.offblock_ratio;
    for (auto [T2, q2] : res.trace.ood_keys) {
      auto [m, se] = eval_ood(res.params, cfg, T2, q2, cfg.pe_policy,
                              cfg.pe_policy == PePolicyKind::FixedRademacher
                                  ? &res.fixed_pe
                                  : nullptr,
                              0);
      (void)se;
      row.ood.push_back(m);
    }
    res.trace.rows.push_back(std::move(row));
  };

  std::vector<task::Sample> batch(cfg.batch);
  std::vector<std::vector<double>> xqs;
  if (cfg.gaussian_x_query) xqs.resize(cfg.batch);

  auto maybe_snapshot = [&](long t) {
    for (long s : cfg.snapshot_steps)
      if (s == t) {
        res.snapshots.emplace_back(t, res.params);
        return;
      }
  };

  try {
    for (long t = 0; t < cfg.steps; ++t) {
      if (t % cfg.log_every == 0) log_row(t);
      maybe_snapshot(t);

      for (int b = 0; b < cfg.batch; ++b) {
        num::RngStream sr =
            data_rng.substream(static_cast<uint64_t>(t), static_cast<uint64_t>(b));
        batch[b] = task::sample_instance(sr, cfg.task);
        if (cfg.gaussian_x_query) {
          xqs[b].resize(d);
          for (int i = 0; i < d; ++i) xqs[b][i] = sr.normal();
        }
      }

      model::PePolicy pol;
      if (cfg.pe_policy == PePolicyKind::OneHot) {
        pol.kind = model::PePolicy::Kind::Fixed;
        pol.fixed = &onehot;
      } else if (cfg.pe_policy == PePolicyKind::FixedRademacher) {
        pol.kind = model::PePolicy::Kind::Fixed;
        pol.fixed = &train_prefix;
      } else {
        pol.kind = cfg.nested ? model::PePolicy::Kind::Nested
                              : model::PePolicy::Kind::ResamplePerStep;
        pol.d_e = cfg.d_e;
        pol.q = cfg.task.q;
        pol.threshold = cfg.threshold();
        pol.mode = cfg.rip_mode;
        pol.max_attempts = cfg.max_attempts;
        pol.n_outer = cfg.n_outer;
        pol.n_inner = cfg.n_inner;
      }

      model::BatchStats stats;
      model::Gradients g =
          model::batch_gradients(res.params, batch, pol,
                                 pe_rng.substream(static_cast<uint64_t>(t) + 1),
                                 cfg.gaussian_x_query ? &xqs : nullptr, &stats);

      if (!(stats.mean_loss <= 1e6)) {
        res.status = TrainStatus::Diverged;
        res.message = "train: loss estimate exceeded divergence guard 1e6 at step " +
                      std::to_string(t);
        return res;
      }

      double eta_t = cfg.eta;
      if (cfg.anneal_step >= 0 && t >= cfg.anneal_step) eta_t *= cfg.anneal_factor;
      opt.step({&res.params.W, &res.params.V}, {&g.dW, &g.dV}, eta_t);
    }
    log_row(cfg.steps);
    if (!cfg.snapshot_steps.empty())
      res.snapshots.emplace_back(cfg.steps, res.params);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::PeSamplingFailed) {
      res.status = TrainStatus::PeSamplingFailed;
      res.message = e.what();
      return res;
    }
    throw;
  }
  return res;
}

FreezeReport freeze_and_retest(const model::ModelParams& params,
                               const TrainConfig& cfg, long n_eval,
                               uint64_t which) {
  num::RngStream fr = num::RngStream::from(cfg.seed, "pe").substream(0xF00ULL, which);
  pe::PosEncoding frozen =
      pe::sample_rip_pe(fr, cfg.d_e, cfg.task.T, cfg.task.q, cfg.threshold(),
                        cfg.rip_mode, cfg.max_attempts);
  FreezeReport rep;
  auto [fm, fse] = estimate_loss(params, cfg, n_eval, PePolicyKind::FixedRademacher,
                                 &frozen, 0xFEEDULL + which);
  auto [sm, sse] = estimate_loss(params, cfg, n_eval, PePolicyKind::Stochastic,
                                 nullptr, 0xFACEULL + which);
  rep.fixed_loss = fm;
  rep.fixed_std_err = fse;
  rep.stochastic_loss = sm;
  rep.stochastic_std_err = sse;
  return rep;
}

}  // namespace sts::train
