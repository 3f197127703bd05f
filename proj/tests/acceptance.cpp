// Acceptance gate: one criterion per invocation (argv[1] in 1..12).
// Prints one PASS/FAIL line per criterion and exits nonzero on failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sts/attention.hpp"
#include "sts/commands.hpp"
#include "sts/encoding.hpp"
#include "sts/fcn.hpp"
#include "sts/io.hpp"
#include "sts/reduced.hpp"
#include "sts/task.hpp"
#include "sts/trainer.hpp"

using namespace sts;
using num::Mat;
using num::RngStream;

namespace {

bool result(int crit, const char* what, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", crit, what,
              detail.c_str());
  return pass;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double max_rel_err(const Mat& a, const Mat& f) {
  double worst = 0;
  for (size_t i = 0; i < a.a.size(); ++i) {
    double denom = std::max({std::abs(a.a[i]), std::abs(f.a[i]), 1e-3});
    worst = std::max(worst, std::abs(a.a[i] - f.a[i]) / denom);
  }
  return worst;
}

// ---- 1: gradient oracles -------------------------------------------------

bool criterion1() {
  const double h = 1e-5;
  double worst = 0;
  // attention model: 100 instances, alternating one-hot / sign encodings
  for (int rep = 0; rep < 100; ++rep) {
    RngStream rng = RngStream::from(1000 + rep, "acc1");
    int T = 6, q = 2, d = 3;
    pe::PosEncoding p;
    if (rep % 2 == 0) {
      p = pe::one_hot_pe(T);
    } else {
      RngStream pr = rng.substream(1);
      p = pe::sample_rip_pe(pr, 64, T, q, 0.5, pe::RipMode::Pairwise, 10000);
    }
    task::TaskConfig cfg{T, q, d};
    task::Sample s = task::sample_instance(rng, cfg);
    std::vector<double> xq(d);
    for (auto& v : xq) v = rng.normal();
    int dim = d + p.d_e;
    model::ModelParams m;
    m.d = d;
    m.d_e = p.d_e;
    m.W = num::gaussian_matrix(rng, dim, dim);
    m.V = num::gaussian_matrix(rng, d, dim);
    for (auto& v : m.W.a) v *= 0.4;
    for (auto& v : m.V.a) v *= 0.4;
    model::Gradients g = model::sample_gradients(m, s, p, xq);
    Mat fdW(dim, dim), fdV(d, dim);
    for (size_t i = 0; i < m.W.a.size(); ++i) {
      model::ModelParams mp = m, mm = m;
      mp.W.a[i] += h;
      mm.W.a[i] -= h;
      fdW.a[i] = (model::sample_loss(mp, s, p, xq) -
                  model::sample_loss(mm, s, p, xq)) / (2 * h);
    }
    for (size_t i = 0; i < m.V.a.size(); ++i) {
      model::ModelParams mp = m, mm = m;
      mp.V.a[i] += h;
      mm.V.a[i] -= h;
      fdV.a[i] = (model::sample_loss(mp, s, p, xq) -
                  model::sample_loss(mm, s, p, xq)) / (2 * h);
    }
    worst = std::max({worst, max_rel_err(g.dW, fdW), max_rel_err(g.dV, fdV)});
  }
  // FCN: 100 instances
  for (int rep = 0; rep < 100; ++rep) {
    RngStream rng = RngStream::from(2000 + rep, "acc1");
    int T = 5, q = 2, d = 2, m = 6;
    fcn::FcnParams p = fcn::make_fcn(rng, T, q, d, m);
    task::TaskConfig cfg{T, q, d};
    fcn::FcnBatch batch;
    task::Sample s = task::sample_instance(rng, cfg);
    batch.inputs.push_back(fcn::make_input(s, p.y_encoding, T));
    batch.targets.push_back(s.target);
    auto loss = [&](const fcn::FcnParams& pp) {
      auto out = fcn::fcn_forward(pp, batch.inputs[0]);
      double acc = 0;
      for (size_t i = 0; i < out.size(); ++i) {
        double r = batch.targets[0][i] - out[i];
        acc += 0.5 * r * r;
      }
      return acc;
    };
    auto grads = fcn::fcn_gradients(p, batch);
    for (size_t l = 0; l < p.layers.size(); ++l)
      for (size_t i = 0; i < p.layers[l].a.size(); ++i) {
        fcn::FcnParams pp = p, pm = p;
        pp.layers[l].a[i] += h;
        pm.layers[l].a[i] -= h;
        double fd = (loss(pp) - loss(pm)) / (2 * h);
        double a = grads[l].a[i];
        double denom = std::max({std::abs(a), std::abs(fd), 1e-3});
        worst = std::max(worst, std::abs(a - fd) / denom);
      }
  }
  return result(1, "analytic vs finite-difference gradients", worst <= 1e-6,
                "max rel err " + fmt(worst));
}

// ---- 2: one-hot softmax closed form --------------------------------------

bool criterion2() {
  double worst = 0;
  for (int T : {5, 10, 50})
    for (int q : {2, 3}) {
      RngStream rng = RngStream::from(77 * T + q, "acc2");
      task::TaskConfig cfg{T, q, 2};
      pe::PosEncoding p = pe::one_hot_pe(T);
      task::Sample s = task::sample_instance(rng, cfg);
      task::AssembledInput in = task::assemble(s, p, {0.0, 0.0});
      for (int Ci = 0; Ci <= 20; ++Ci) {
        double C = Ci;
        model::ModelParams m = model::ModelParams::zero(2, T);
        for (int i = 0; i < T; ++i)
          for (int j = 0; j < T; ++j)
            m.W.at(2 + i, 2 + j) = C * ((i == j ? 1.0 : 0.0) - 1.0 / T);
        auto att = model::attention(m, in);
        double sp = 1.0 / (q + (T - q) * std::exp(-C));
        double sm = (1.0 - q * sp) / (T - q);
        for (int i = 0; i < T; ++i) {
          bool in_y = std::find(s.y.begin(), s.y.end(), i) != s.y.end();
          worst = std::max(worst, std::abs(att[i] - (in_y ? sp : sm)));
        }
      }
    }
  return result(2, "one-hot attention closed form on the C grid", worst <= 1e-12,
                "max abs err " + fmt(worst));
}

// ---- 3: reduced-dynamics equivalence -------------------------------------

bool criterion3() {
  // (a) population-gradient full-matrix recursion vs reduced scalars
  const int T = 20, q = 2, d = 4;
  const double eta = 0.05;
  reduced::ReducedState red{0.0, 0.0, 0};
  model::ModelParams full = model::ModelParams::zero(d, T);
  double worst_gap = 0;
  for (long t = 0; t < 10000; ++t) {
    model::Scalars sc = model::extract_scalars(full, pe::PeKind::OneHot);
    worst_gap = std::max({worst_gap, std::abs(sc.C_hat - red.C),
                          std::abs(sc.alpha_hat - red.alpha)});
    // apply the scalar population-gradient update to the full matrices
    double s = reduced::s_plus_onehot(sc.C_hat, T, q);
    double da = eta * s *
                (1 - sc.alpha_hat * (T * q * s * s - 2 * q * s + 1) /
                         ((T - q) * s));
    double dC = eta * (sc.alpha_hat * d / (T - 1.0)) * s * (1 - q * s) *
                (1 + (q * sc.alpha_hat / (T - q)) * (1 - T * s));
    for (int i = 0; i < T; ++i)
      for (int j = 0; j < T; ++j)
        full.W.at(d + i, d + j) += dC * ((i == j ? 1.0 : 0.0) - 1.0 / T);
    for (int i = 0; i < d; ++i) full.V.at(i, i) += da;
    red = reduced::step_onehot(red, eta, T, q, d);
  }
  bool pass_a = worst_gap <= 1e-10;

  // (b) Monte-Carlo trainer, batch 1e5, one-hot, vs the reduced trajectory.
  // Standard errors for the scalar coordinates accumulate the per-step batch
  // variance of the gradient projections.
  const int T2 = 10, q2 = 2, d2 = 4;
  const long N = 100000;
  const double eta2 = 0.05;
  task::TaskConfig cfg{T2, q2, d2};
  pe::PosEncoding pone = pe::one_hot_pe(T2);
  std::vector<double> xq(d2, 0.0);
  model::ModelParams params = model::ModelParams::zero(d2, T2);
  reduced::ReducedState red2{0.0, 0.0, 0};
  RngStream data = RngStream::from(31, "acc3");
  double var_alpha = 0, var_C = 0, worst_sig = 0;
  bool pass_b = true;
  std::string detail_b;
  const int dim = d2 + T2;
  for (long t = 1; t <= 1000; ++t) {
    Mat gW(dim, dim), gV(d2, dim);
    double sa = 0, sa2 = 0, sc = 0, sc2 = 0;
    RngStream step_rng = data.substream(static_cast<uint64_t>(t));
    for (long n = 0; n < N; ++n) {
      RngStream sr = step_rng.substream(static_cast<uint64_t>(n));
      task::Sample s = task::sample_instance(sr, cfg);
      model::Gradients g = model::sample_gradients(params, s, pone, xq);
      for (size_t i = 0; i < gW.a.size(); ++i) gW.a[i] += g.dW.a[i];
      for (size_t i = 0; i < gV.a.size(); ++i) gV.a[i] += g.dV.a[i];
      double a = 0;
      for (int i = 0; i < d2; ++i) a += g.dV.at(i, i);
      a /= d2;
      double diag = 0, off = 0;
      for (int i = 0; i < T2; ++i)
        for (int j = 0; j < T2; ++j)
          (i == j ? diag : off) += g.dW.at(d2 + i, d2 + j);
      double c = diag / T2 - off / (T2 * (T2 - 1.0));
      sa += a;
      sa2 += a * a;
      sc += c;
      sc2 += c * c;
    }
    for (size_t i = 0; i < gW.a.size(); ++i)
      params.W.a[i] -= eta2 * gW.a[i] / N;
    for (size_t i = 0; i < gV.a.size(); ++i)
      params.V.a[i] -= eta2 * gV.a[i] / N;
    double ma = sa / N, mc = sc / N;
    var_alpha += eta2 * eta2 * std::max(0.0, sa2 / N - ma * ma) / N;
    var_C += eta2 * eta2 * std::max(0.0, sc2 / N - mc * mc) / N;
    red2 = reduced::step_onehot(red2, eta2, T2, q2, d2);
    if (t == 10 || t == 100 || t == 1000) {
      model::Scalars est = model::extract_scalars(params, pe::PeKind::OneHot);
      double se_a = std::sqrt(var_alpha) + 1e-12;
      double se_c = std::sqrt(var_C) + 1e-12;
      double za = std::abs(est.alpha_hat - red2.alpha) / se_a;
      double zc = std::abs(est.C_hat - red2.C) / se_c;
      worst_sig = std::max({worst_sig, za, zc});
      detail_b += " t=" + std::to_string(t) + " z_alpha=" + fmt(za) +
                  " z_C=" + fmt(zc);
      if (za > 5 || zc > 5) pass_b = false;
    }
  }
  return result(3, "reduced dynamics match the full trainer",
                pass_a && pass_b,
                "population gap " + fmt(worst_gap) + ";" + detail_b);
}

// ---- 4 / 11: desk-scale convergence --------------------------------------

train::TrainConfig desk_config() {
  train::TrainConfig cfg;
  cfg.task = {50, 3, 5};
  cfg.d_e = 60;
  cfg.delta = 0.1;        // nominal near-orthogonality parameter
  cfg.pe_threshold = 0.5; // attainable pairwise threshold at d_e = 60
  cfg.pe_policy = train::PePolicyKind::Stochastic;
  cfg.eta = 1.0;
  cfg.steps = 20000;
  cfg.batch = 256;
  cfg.seed = 12;
  cfg.log_every = 200;
  cfg.eval.n_eval = 8192;
  return cfg;
}

double r_squared_final_half(const train::TrainTrace& trace) {
  size_t n = trace.rows.size();
  size_t from = n / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  size_t m = 0;
  for (size_t i = from; i < n; ++i) {
    double x = static_cast<double>(trace.rows[i].step);
    double y = trace.rows[i].inv_loss;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    ++m;
  }
  double cov = sxy - sx * sy / m;
  double vx = sxx - sx * sx / m;
  double vy = syy - sy * sy / m;
  if (vx <= 0 || vy <= 0) return 0;
  return cov * cov / (vx * vy);
}

bool criterion4() {
  train::TrainResult r = train::train(desk_config());
  if (r.status != train::TrainStatus::Ok)
    return result(4, "desk-scale convergence", false, "status " + r.message);
  const train::TraceRow& last = r.trace.rows.back();
  double r2 = r_squared_final_half(r.trace);
  bool pass = last.loss <= 1e-2 && last.cos_w >= 0.99 && last.cos_v >= 0.99 &&
              r2 >= 0.95;
  return result(4, "desk-scale convergence", pass,
                "loss " + fmt(last.loss) + " cos_w " + fmt(last.cos_w) +
                    " cos_v " + fmt(last.cos_v) + " R2 " + fmt(r2));
}

bool criterion11() {
  train::TrainConfig cfg = desk_config();
  train::TrainResult r = train::train(cfg);
  if (r.status != train::TrainStatus::Ok)
    return result(11, "freeze and retest", false, "status " + r.message);
  train::FreezeReport fr = train::freeze_and_retest(r.params, cfg, 20000);
  bool pass = fr.fixed_loss <= 2 * fr.stochastic_loss;
  return result(11, "frozen encoding stays within 2x of stochastic loss", pass,
                "fixed " + fmt(fr.fixed_loss) + " stochastic " +
                    fmt(fr.stochastic_loss));
}

// ---- 5: dual certificate ---------------------------------------------------

bool criterion5() {
  const int T = 16, q = 3, d_e = 8192;
  const double delta = 0.1;
  double worst_in = 0, worst_out = 0, worst_norm = 0;
  RngStream rng = RngStream::from(5, "acc5");
  for (int rep = 0; rep < 1000; ++rep) {
    RngStream pr = rng.substream(rep);
    pe::PosEncoding p =
        pe::sample_rip_pe(pr, d_e, T, q, delta, pe::RipMode::Pairwise, 10000);
    RngStream yr = rng.substream(rep, 1);
    std::vector<int> y;
    while (static_cast<int>(y.size()) < q) {
      int c = static_cast<int>(yr.below(T));
      if (std::find(y.begin(), y.end(), c) == y.end()) y.push_back(c);
    }
    std::sort(y.begin(), y.end());
    pe::SubsetEncoding enc = pe::subset_encoding(p, y);
    pe::DualCertReport rep2 = pe::verify_dual_certificate(p, enc);
    worst_in = std::max(worst_in, rep2.max_in_err);
    worst_out = std::max(worst_out, rep2.max_out);
    worst_norm = std::max(worst_norm, rep2.norm);
  }
  bool pass = worst_in <= 1e-9 && worst_out <= delta / (1 - 2 * delta) + 1e-9 &&
              worst_norm <= std::sqrt(double(q)) / (1 - 2 * delta) + 1e-9;
  return result(5, "dual certificate bounds over 1000 encodings", pass,
                "in_err " + fmt(worst_in) + " out " + fmt(worst_out) +
                    " norm " + fmt(worst_norm));
}

// ---- 6: softmax containment under exact-RIP encodings ---------------------

bool criterion6() {
  const int T = 16, q = 2, d_e = 1280;
  const double delta = 0.3;
  RngStream rng = RngStream::from(6, "acc6");
  long trials = 0, inside = 0;
  double worst_violation = 0;
  for (int e = 0; e < 84; ++e) {
    RngStream pr = rng.substream(e);
    pe::PosEncoding p =
        pe::sample_rip_pe(pr, d_e, T, q, delta, pe::RipMode::Exact, 10000);
    for (double C : {1.0, 5.0, 10.0}) {
      model::ModelParams m = model::construct_expressivity(1, d_e, C);
      auto [lo, hi] = reduced::s_plus_bounds_stochastic(C, T, q, delta);
      RngStream sr = rng.substream(e, 7);
      for (int i = 0; i < T; ++i)
        for (int j = i + 1; j < T; ++j) {
          task::TaskConfig cfg{T, q, 1};
          task::Sample s = task::sample_instance(sr, cfg);
          s.y = {i, j};
          double sp = 0;
          model::sample_eval(m, s, p, {0.0}, &sp);
          ++trials;
          if (sp >= lo - 1e-12 && sp <= hi + 1e-12) ++inside;
          worst_violation = std::max(
              worst_violation, std::max(lo - sp, sp - hi));
        }
    }
  }
  bool pass = trials >= 10000 && inside == trials;
  return result(6, "softmax containment for exact encodings", pass,
                std::to_string(inside) + "/" + std::to_string(trials) +
                    " inside, worst excess " + fmt(worst_violation));
}

// ---- 7: expressivity construction ------------------------------------------

bool criterion7() {
  const int T = 50, q = 3, d = 5, d_e = 384;
  const double eps = 0.1;
  double alpha = std::ceil(2.0 * std::log(2.0 * T) / eps);  // 93
  model::ModelParams m = model::construct_expressivity(d, d_e, alpha);
  RngStream rng = RngStream::from(7, "acc7");
  task::TaskConfig cfg{T, q, d};
  double sup_err = 0;
  for (int rep = 0; rep < 10000; ++rep) {
    RngStream sr = rng.substream(rep);
    RngStream pr = sr.substream(1);
    pe::PosEncoding p =
        pe::sample_rip_pe(pr, d_e, T, q, 0.25, pe::RipMode::Pairwise, 10000);
    task::Sample s = task::sample_instance(sr, cfg);
    task::AssembledInput in = task::assemble(s, p, std::vector<double>(d, 0.0));
    auto out = model::forward(m, in);
    double e2 = 0;
    for (int i = 0; i < d; ++i) e2 += std::pow(out[i] - s.target[i], 2);
    sup_err = std::max(sup_err, std::sqrt(e2));
  }
  return result(7, "expressivity construction sup error", sup_err <= eps,
                "alpha " + fmt(alpha) + " sup err " + fmt(sup_err));
}

// ---- 8: FCN average-case bound ---------------------------------------------

bool criterion8() {
  fcn::FcnTrainConfig cfg;
  cfg.task = {8, 2, 2};
  cfg.width = 15;  // Td - 1
  cfg.steps = 100000;
  cfg.batch = 128;
  cfg.eta = 1e-3;
  cfg.adam = true;
  cfg.seed = 8;
  fcn::FcnParams p = fcn::train_fcn(cfg);
  RngStream er = RngStream::from(9, "acc8");
  fcn::AverageBoundReport rep =
      fcn::verify_average_bound(p, cfg.task, 1000000, er);
  bool pass = rep.mc_loss >= rep.bound - 4 * rep.std_err;
  return result(8, "trained FCN respects the average-case bound", pass,
                "mc " + fmt(rep.mc_loss) + " bound " + fmt(rep.bound) +
                    " se " + fmt(rep.std_err));
}

// ---- 9: FCN worst-case construction ----------------------------------------

bool criterion9() {
  const int T = 8, q = 2, d = 2, m = 13;
  bool pass = true;
  double worst_gap = 0, worst_err = 1e300;
  for (int rep = 0; rep < 20; ++rep) {
    RngStream rng = RngStream::from(900 + rep, "acc9");
    fcn::FcnParams p = fcn::make_fcn(rng, T, q, d, m);
    fcn::AdversarialPair ap = fcn::adversarial_pair(p, T, q, d);
    auto oa = fcn::fcn_forward(p, ap.input_a);
    auto ob = fcn::fcn_forward(p, ap.input_b);
    double gap = 0, ea = 0, eb = 0;
    for (int i = 0; i < d; ++i) {
      gap = std::max(gap, std::abs(oa[i] - ob[i]));
      ea += std::pow(oa[i] - ap.target_a[i], 2);
      eb += std::pow(ob[i] - ap.target_b[i], 2);
    }
    double err = std::sqrt(std::max(ea, eb));
    worst_gap = std::max(worst_gap, gap);
    worst_err = std::min(worst_err, err);
    if (gap > 1e-9 || err < 1.0 / (2 * q) - 1e-8) pass = false;
  }
  return result(9, "adversarial pair forces the worst-case error", pass,
                "max output gap " + fmt(worst_gap) + " min max-side err " +
                    fmt(worst_err));
}

// ---- 10: length generalization ---------------------------------------------

bool criterion10() {
  train::TrainConfig cfg;
  cfg.task = {50, 3, 5};
  cfg.d_e = 96;
  cfg.delta = 0.1;
  cfg.pe_threshold = 0.5;
  cfg.pe_policy = train::PePolicyKind::Stochastic;
  cfg.eta = 2.0;
  cfg.steps = 60000;
  cfg.batch = 256;
  cfg.seed = 10;
  cfg.log_every = 10000;
  cfg.eval.n_eval = 8192;
  cfg.eval.T2_list = {100};
  cfg.eval.T_max = 120;
  train::TrainResult rs = train::train(cfg);
  if (rs.status != train::TrainStatus::Ok)
    return result(10, "length generalization", false, "stochastic: " + rs.message);

  train::TrainConfig fcfg = cfg;
  fcfg.pe_policy = train::PePolicyKind::FixedRademacher;
  train::TrainResult rf = train::train(fcfg);
  if (rf.status != train::TrainStatus::Ok)
    return result(10, "length generalization", false, "fixed: " + rf.message);

  double train_loss = rs.trace.rows.back().loss;
  double ood_s = rs.trace.rows.back().ood[0];
  double ood_f = rf.trace.rows.back().ood[0];
  double ratio = ood_s / (std::pow(100.0 / 50.0, 2) * train_loss);
  bool pass = train_loss <= 1e-3 && ood_s <= 0.05 && ood_f >= 2 * ood_s;
  return result(10, "stochastic encodings generalize across lengths", pass,
                "train " + fmt(train_loss) + " ood_stoch " + fmt(ood_s) +
                    " ood_fixed " + fmt(ood_f) + " ratio_vs_T2sq " + fmt(ratio));
}

// ---- 12: determinism ---------------------------------------------------------

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

bool criterion12() {
  namespace fs = std::filesystem;
  const char* cfgjson = R"({
    "task": {"T": 12, "q": 2, "d": 3},
    "d_e": 48, "pe_threshold": 0.5, "pe_policy": "stochastic",
    "eta": 0.5, "steps": 100, "batch": 64, "seed": 17, "log_every": 20,
    "eval": {"n_eval": 256, "T2_list": [16], "T_max": 24}
  })";
  std::string a = "/tmp/sts_acc12_a", b = "/tmp/sts_acc12_b";
  fs::remove_all(a);
  fs::remove_all(b);
  if (cmd::cmd_train(cfgjson, a) != 0 || cmd::cmd_train(cfgjson, b) != 0)
    return result(12, "determinism", false, "train command failed");
  bool pass = slurp(a + "/trace.csv") == slurp(b + "/trace.csv") &&
              slurp(a + "/checkpoint/W.csv") == slurp(b + "/checkpoint/W.csv") &&
              slurp(a + "/checkpoint/V.csv") == slurp(b + "/checkpoint/V.csv") &&
              !slurp(a + "/trace.csv").empty();

  std::string oa = "/tmp/sts_acc12_oa", ob = "/tmp/sts_acc12_ob";
  fs::remove_all(oa);
  fs::remove_all(ob);
  if (cmd::cmd_ode(10, 2, 3, 0.1, 500, oa) != 0 ||
      cmd::cmd_ode(10, 2, 3, 0.1, 500, ob) != 0)
    return result(12, "determinism", false, "ode command failed");
  pass = pass && slurp(oa + "/trajectory.csv") == slurp(ob + "/trajectory.csv");
  return result(12, "identical seeds give byte-identical CSVs", pass,
                pass ? "all byte-identical" : "mismatch");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <criterion 1..12>\n");
    return 2;
  }
  int crit = std::atoi(argv[1]);
  bool ok = false;
  switch (crit) {
    case 1: ok = criterion1(); break;
    case 2: ok = criterion2(); break;
    case 3: ok = criterion3(); break;
    case 4: ok = criterion4(); break;
    case 5: ok = criterion5(); break;
    case 6: ok = criterion6(); break;
    case 7: ok = criterion7(); break;
    case 8: ok = criterion8(); break;
    case 9: ok = criterion9(); break;
    case 10: ok = criterion10(); break;
    case 11: ok = criterion11(); break;
    case 12: ok = criterion12(); break;
    default:
      std::fprintf(stderr, "unknown criterion %d\n", crit);
      return 2;
  }
  return ok ? 0 : 1;
}
