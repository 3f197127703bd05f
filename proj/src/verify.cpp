#include "sts/verify.hpp"

#include <cmath>
#include <sstream>

#include "sts/attention.hpp"
#include "sts/encoding.hpp"
#include "sts/fcn.hpp"
#include "sts/format.hpp"
#include "sts/reduced.hpp"
#include "sts/task.hpp"

namespace sts::verify {

namespace {

Check make_check(const std::string& name, bool pass, const std::string& detail) {
  return Check{name, pass, detail};
}

// Max relative coordinate error between analytic and central-difference
// gradients of the attention sample loss. corrupt perturbs one analytic
// coordinate (negative control).
double grad_err_attention(uint64_t seed, int n_instances, bool corrupt) {
  double worst = 0.0;
  num::RngStream rng = num::RngStream::from(seed, "fd-attn");
  for (int inst = 0; inst < n_instances; ++inst) {
    num::RngStream r = rng.substream(inst);
    bool onehot = (inst % 2 == 0);
    int T = 6, q = 2, d = 3;
    pe::PosEncoding E;
    if (onehot) {
      E = pe::one_hot_pe(T);
    } else {
      num::RngStream er = r.substream(7);
      E = pe::sample_rip_pe(er, 128, T, q, 0.35, pe::RipMode::Pairwise, 1000);
    }
    int d_e = E.d_e;
    task::TaskConfig tc{T, q, d};
    num::RngStream sr = r.substream(1);
    task::Sample s = task::sample_instance(sr, tc);
    model::ModelParams p = model::ModelParams::zero(d, d_e);
    num::RngStream pr = r.substream(2);
    double sigma = 0.4 / std::sqrt(static_cast<double>(d + d_e));
    p.W = num::gaussian_matrix(pr, d + d_e, d + d_e);
    p.V = num::gaussian_matrix(pr, d, d + d_e);
    for (double& x : p.W.a) x *= sigma;
    for (double& x : p.V.a) x *= sigma;
    std::vector<double> xq(d, 0.0);

    model::Gradients g = model::sample_gradients(p, s, E, xq);
    if (corrupt) g.dW.a[0] += 1e-3;

    const double h = 1e-5;
    auto check_mat = [&](num::Mat& target, const num::Mat& analytic) {
      for (size_t i = 0; i < target.a.size(); ++i) {
        double keep = target.a[i];
        target.a[i] = keep + h;
        double lp = model::sample_loss(p, s, E, xq);
        target.a[i] = keep - h;
        double lm = model::sample_loss(p, s, E, xq);
        target.a[i] = keep;
        double fd = (lp - lm) / (2.0 * h);
        double a = analytic.a[i];
        double denom = std::max({std::abs(a), std::abs(fd), 1e-3});
        worst = std::max(worst, std::abs(a - fd) / denom);
      }
    };
    check_mat(p.W, g.dW);
    check_mat(p.V, g.dV);
  }
  return worst;
}

double grad_err_fcn(uint64_t seed, int n_instances) {
  double worst = 0.0;
  num::RngStream rng = num::RngStream::from(seed, "fd-fcn");
  for (int inst = 0; inst < n_instances; ++inst) {
    num::RngStream r = rng.substream(inst);
    int T = 5, q = 2, d = 2, m = 6;
    task::TaskConfig tc{T, q, d};
    num::RngStream ir = r.substream(0);
    fcn::FcnParams p = fcn::make_fcn(ir, T, q, d, m);
    fcn::FcnBatch batch;
    num::RngStream sr = r.substream(1);
    for (int b = 0; b < 3; ++b) {
      num::RngStream br = sr.substream(b);
      task::Sample s = task::sample_instance(br, tc);
      batch.inputs.push_back(fcn::make_input(s, p.y_encoding, T));
      batch.targets.push_back(s.target);
    }
    auto grads = fcn::fcn_gradients(p, batch);
    auto batch_loss = [&]() {
      double l = 0.0;
      for (size_t b = 0; b < batch.inputs.size(); ++b) {
        auto out = fcn::fcn_forward(p, batch.inputs[b]);
        for (size_t k = 0; k < out.size(); ++k) {
          double e = out[k] - batch.targets[b][k];
          l += 0.5 * e * e;
        }
      }
      return l / batch.inputs.size();
    };
    const double h = 1e-5;
    for (size_t l = 0; l < p.layers.size(); ++l) {
      for (size_t i = 0; i < p.layers[l].a.size(); ++i) {
        double keep = p.layers[l].a[i];
        p.layers[l].a[i] = keep + h;
        double lp = batch_loss();
        p.layers[l].a[i] = keep - h;
        double lm = batch_loss();
        p.layers[l].a[i] = keep;
        double fd = (lp - lm) / (2.0 * h);
        double a = grads[l].a[i];
        double denom = std::max({std::abs(a), std::abs(fd), 1e-3});
        worst = std::max(worst, std::abs(a - fd) / denom);
      }
    }
  }
  return worst;
}

}  // namespace

std::vector<Check> suite_encoding(uint64_t seed) {
  std::vector<Check> out;
  num::RngStream rng = num::RngStream::from(seed, "verify-enc");

  {
    pe::PosEncoding oh = pe::one_hot_pe(5);
    bool ok = oh.d_e == 5 && pe::measure_coherence(oh.E) == 0.0;
    out.push_back(make_check("encoding.onehot_identity", ok, "coherence 0"));
  }

  {
    // Exact-mode acceptance implies eigenvalue bounds on every small Gram
    // submatrix; re-verify by independent enumeration over all sizes 1..3q.
    num::RngStream r = rng.substream(1);
    int T = 8, q = 2, d_e = 768;
    double delta = 0.3;
    pe::PosEncoding E = pe::sample_rip_pe(r, d_e, T, q, delta, pe::RipMode::Exact, 4000);
    num::Mat G(T, T);
    for (int i = 0; i < T; ++i)
      for (int j = 0; j < T; ++j) {
        double s = 0.0;
        for (int k = 0; k < d_e; ++k) s += E.E.at(k, i) * E.E.at(k, j);
        G.at(i, j) = s;
      }
    bool ok = true;
    double worst = 0.0;
    for (int mask = 1; mask < (1 << T); ++mask) {
      int bits = __builtin_popcount(static_cast<unsigned>(mask));
      if (bits > 3 * q) continue;
      std::vector<int> S;
      for (int i = 0; i < T; ++i)
        if (mask & (1 << i)) S.push_back(i);
      num::Mat sub(bits, bits);
      for (int a = 0; a < bits; ++a)
        for (int b = 0; b < bits; ++b) sub.at(a, b) = G.at(S[a], S[b]);
      auto ev = num::symmetric_eigenvalues(sub);
      worst = std::max({worst, 1.0 - ev.front(), ev.back() - 1.0});
      if (ev.front() < 1.0 - delta - 1e-9 || ev.back() > 1.0 + delta + 1e-9)
        ok = false;
    }
    out.push_back(make_check("encoding.exact_rip_eigenvalues", ok,
                             "worst eigenvalue deviation " + fmt_g17(worst)));
  }

  {
    // Dual-certificate bounds on random (E, y).
    num::RngStream r = rng.substream(2);
    int T = 12, q = 2, d_e = 2048;
    double delta = 0.1;
    bool ok = true;
    double worst_in = 0.0, worst_out = 0.0, worst_norm = 0.0;
    for (int it = 0; it < 200; ++it) {
      num::RngStream er = r.substream(it);
      pe::PosEncoding E =
          pe::sample_rip_pe(er, d_e, T, q, delta, pe::RipMode::Pairwise, 1000);
      std::vector<int> y = {static_cast<int>(er.below(T)), 0};
      y[1] = (y[0] + 1 + static_cast<int>(er.below(T - 1))) % T;
      auto enc = pe::subset_encoding(E, y);
      auto rep = pe::verify_dual_certificate(E, enc);
      worst_in = std::max(worst_in, rep.max_in_err);
      worst_out = std::max(worst_out, rep.max_out);
      worst_norm = std::max(worst_norm, rep.norm);
      if (rep.max_in_err > 1e-9 ||
          rep.max_out > delta / (1.0 - 2.0 * delta) + 1e-9 ||
          rep.norm > std::sqrt(static_cast<double>(q)) / (1.0 - 2.0 * delta) + 1e-9)
        ok = false;
    }
    out.push_back(make_check(
        "encoding.dual_certificate", ok,
        "worst in-err " + fmt_g17(worst_in) + ", out " + fmt_g17(worst_out) +
            ", norm " + fmt_g17(worst_norm)));
  }

  {
    // Sign-flip and row-swap invariance of the subset Gram.
    num::RngStream r = rng.substream(3);
    pe::PosEncoding E =
        pe::sample_rip_pe(r, 256, 10, 2, 0.35, pe::RipMode::Pairwise, 1000);
    std::vector<int> y = {2, 7};
    auto gram_of = [&](const num::Mat& M) {
      num::Mat g(2, 2);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          double s = 0.0;
          for (int k = 0; k < M.rows; ++k) s += M.at(k, y[a]) * M.at(k, y[b]);
          g.at(a, b) = s;
        }
      return g;
    };
    num::Mat g0 = gram_of(E.E);
    num::Mat flipped = E.E;
    for (int j = 0; j < flipped.cols; ++j) flipped.at(5, j) = -flipped.at(5, j);
    num::Mat swapped = E.E;
    for (int j = 0; j < swapped.cols; ++j)
      std::swap(swapped.at(3, j), swapped.at(11, j));
    double err = 0.0;
    num::Mat g1 = gram_of(flipped), g2 = gram_of(swapped);
    for (size_t i = 0; i < g0.a.size(); ++i)
      err = std::max({err, std::abs(g0.a[i] - g1.a[i]), std::abs(g0.a[i] - g2.a[i])});
    out.push_back(make_check("encoding.row_symmetry_invariance", err <= 1e-12,
                             "max Gram deviation " + fmt_g17(err)));
  }

  {
    // Orthonormal columns: Gram-solve path equals direct summation.
    pe::PosEncoding E;
    E.kind = pe::PeKind::Rademacher;  // forces the Gram-solve path
    E.E = num::Mat::identity(8);
    E.T = 8;
    E.d_e = 8;
    E.delta = 0.0;
    auto enc = pe::subset_encoding(E, {1, 4, 6});
    double err = 0.0;
    for (int i = 0; i < 8; ++i) {
      double want = (i == 1 || i == 4 || i == 6) ? 1.0 : 0.0;
      err = std::max(err, std::abs(enc.e_y[i] - want));
    }
    out.push_back(make_check("encoding.identity_gram_matches_sum", err <= 1e-12,
                             "max deviation " + fmt_g17(err)));
  }

  return out;
}

std::vector<Check> suite_gradients(uint64_t seed, bool corrupt_gradients) {
  std::vector<Check> out;
  {
    double err = grad_err_attention(seed, 20, corrupt_gradients);
    out.push_back(make_check("gradients.attention_finite_difference", err <= 1e-6,
                             "max relative error " + fmt_g17(err)));
  }
  {
    double err = grad_err_fcn(seed, 10);
    out.push_back(make_check("gradients.fcn_finite_difference", err <= 1e-6,
                             "max relative error " + fmt_g17(err)));
  }
  {
    // V = 0 kills dW; zero residual kills both.
    int T = 5, q = 2, d = 2;
    pe::PosEncoding E = pe::one_hot_pe(T);
    task::TaskConfig tc{T, q, d};
    num::RngStream r = num::RngStream::from(seed, "verify-zero");
    task::Sample s = task::sample_instance(r, tc);
    model::ModelParams p = model::ModelParams::zero(d, T);
    num::RngStream wr = r.substream(1);
    p.W = num::gaussian_matrix(wr, d + T, d + T);
    std::vector<double> xq(d, 0.0);
    auto g = model::sample_gradients(p, s, E, xq);
    double dw = 0.0;
    for (double x : g.dW.a) dw = std::max(dw, std::abs(x));

    task::Sample z = s;
    for (double& x : z.X.a) x = 0.0;
    z.target.assign(d, 0.0);
    auto gz = model::sample_gradients(p, z, E, xq);
    double both = 0.0;
    for (double x : gz.dW.a) both = std::max(both, std::abs(x));
    for (double x : gz.dV.a) both = std::max(both, std::abs(x));
    out.push_back(make_check("gradients.structural_zeros",
                             dw == 0.0 && both == 0.0,
                             "V=0 dW " + fmt_g17(dw) + ", zero-residual " +
                                 fmt_g17(both)));
  }
  return out;
}

std::vector<Check> suite_reduced(uint64_t seed) {
  (void)seed;
  std::vector<Check> out;
  {
    int T = 12, q = 2, d = 4;
    double eta = 1.0 / (20.0 * d * d);
    bool ok = true;
    std::string detail = "C monotone over 5000 steps";
    try {
      auto rows = reduced::simulate_onehot(T, q, d, eta, 5000);
      ok = rows.back().C >= 0.0;
    } catch (const Error& e) {
      ok = false;
      detail = e.what();
    }
    out.push_back(make_check("reduced.monotonicity", ok, detail));
  }
  {
    int T = 16, q = 4;
    bool ok = std::abs(reduced::alpha_star(1.0 / q, T, q) - 1.0) < 1e-12 &&
              std::abs(reduced::alpha_star(1.0 / T, T, q) - 1.0) < 1e-12;
    double min_interior = 1e300;
    for (int k = 1; k < 200; ++k) {
      double s = 1.0 / T + (1.0 / q - 1.0 / T) * k / 200.0;
      min_interior = std::min(min_interior, reduced::alpha_star(s, T, q));
    }
    ok = ok && min_interior >= 1.0 - 1e-12;
    out.push_back(make_check("reduced.alpha_star_at_least_one", ok,
                             "interior min " + fmt_g17(min_interior)));
  }
  {
    int T = 10, q = 2, d = 3;
    reduced::ReducedState st;
    st.C = 60.0;
    st.alpha = 1.0;
    auto nx = reduced::step_onehot(st, 0.5, T, q, d);
    bool ok = std::abs(nx.C - st.C) <= 1e-12 && std::abs(nx.alpha - st.alpha) <= 1e-12;
    out.push_back(make_check("reduced.fixed_point", ok,
                             "dC " + fmt_g17(nx.C - st.C) + ", dalpha " +
                                 fmt_g17(nx.alpha - st.alpha)));
  }
  {
    // Full matrices driven by the population-gradient substitution stay on
    // the two-parameter manifold and match the scalar recursion.
    int T = 12, q = 2, d = 4;
    double eta = 0.05;
    model::ModelParams p = model::ModelParams::zero(d, T);
    reduced::ReducedState st;
    double worst = 0.0;
    for (int t = 0; t < 2000; ++t) {
      model::Scalars sc = model::extract_scalars(p, pe::PeKind::OneHot);
      worst = std::max({worst, std::abs(sc.C_hat - st.C),
                        std::abs(sc.alpha_hat - st.alpha)});
      reduced::ReducedState nx = reduced::step_onehot(st, eta, T, q, d);
      double dC = nx.C - st.C, dA = nx.alpha - st.alpha;
      for (int i = 0; i < T; ++i)
        for (int j = 0; j < T; ++j)
          p.W.at(d + i, d + j) += dC * ((i == j ? 1.0 : 0.0) - 1.0 / T);
      for (int i = 0; i < d; ++i) p.V.at(i, i) += dA;
      st = nx;
    }
    out.push_back(make_check("reduced.population_gradient_equivalence",
                             worst <= 1e-10, "max |scalar gap| " + fmt_g17(worst)));
  }
  return out;
}

std::vector<Check> suite_bounds(uint64_t seed) {
  std::vector<Check> out;
  num::RngStream rng = num::RngStream::from(seed, "verify-bnd");

  {
    // Softmax containment under exact-RIP encodings.
    int T = 12, q = 2, d = 3, d_e = 1024;
    double delta = 0.3;
    bool ok = true;
    double worst_gap = 1e300;
    for (int e_i = 0; e_i < 10 && ok; ++e_i) {
      num::RngStream er = rng.substream(10, e_i);
      pe::PosEncoding E =
          pe::sample_rip_pe(er, d_e, T, q, delta, pe::RipMode::Exact, 2000);
      for (double C : {1.0, 5.0}) {
        model::ModelParams p = model::ModelParams::zero(d, d_e);
        for (int i = 0; i < d_e; ++i) p.W.at(d + i, d + i) = C;
        auto [lo, hi] = reduced::s_plus_bounds_stochastic(C, T, q, delta);
        for (int a = 0; a < T && ok; ++a)
          for (int b = a + 1; b < T && ok; ++b) {
            task::Sample s;
            s.X = num::Mat(d, T);
            s.y = {a, b};
            s.target.assign(d, 0.0);
            auto in = task::assemble(s, E, std::vector<double>(d, 0.0));
            auto S = model::attention(p, in);
            for (int j : s.y) {
              if (S[j] < lo - 1e-12 || S[j] > hi + 1e-12) ok = false;
              worst_gap = std::min({worst_gap, S[j] - lo, hi - S[j]});
            }
          }
      }
    }
    out.push_back(make_check("bounds.softmax_containment", ok,
                             "min margin " + fmt_g17(worst_gap)));
  }

  {
    // Symmetry of the expected attention over resampled encodings.
    int T = 10, q = 2, d = 3, d_e = 512;
    double C = 2.0;
    std::vector<int> y = {0, 1};
    int i1 = 4, i2 = 7;
    model::ModelParams p = model::ModelParams::zero(d, d_e);
    for (int i = 0; i < d_e; ++i) p.W.at(d + i, d + i) = C;
    task::Sample s;
    s.X = num::Mat(d, T);
    s.y = y;
    s.target.assign(d, 0.0);
    double sum = 0.0, sum2 = 0.0;
    int n = 5000;
    for (int it = 0; it < n; ++it) {
      num::RngStream er = rng.substream(20, it);
      pe::PosEncoding E =
          pe::sample_rip_pe(er, d_e, T, q, 0.3, pe::RipMode::Pairwise, 1000);
      auto in = task::assemble(s, E, std::vector<double>(d, 0.0));
      auto S = model::attention(p, in);
      double diff = S[i1] - S[i2];
      sum += diff;
      sum2 += diff * diff;
    }
    double mean = sum / n;
    double se = std::sqrt(std::max(0.0, sum2 / n - mean * mean) / n);
    bool ok = std::abs(mean) < 4.0 * se + 1e-12;
    out.push_back(make_check("bounds.softmax_symmetry", ok,
                             "mean diff " + fmt_g17(mean) + ", se " + fmt_g17(se)));
  }

  {
    // Average-case FCN bound at width Td-1 (untrained network).
    int T = 8, q = 2, d = 2;
    task::TaskConfig tc{T, q, d};
    num::RngStream ir = rng.substream(30);
    fcn::FcnParams p = fcn::make_fcn(ir, T, q, d, T * d - 1);
    num::RngStream er = rng.substream(31);
    auto rep = fcn::verify_average_bound(p, tc, 200000, er);
    bool ok = rep.mc_loss >= rep.bound - 4.0 * rep.std_err;
    out.push_back(make_check("bounds.fcn_average_case", ok,
                             "mc " + fmt_g17(rep.mc_loss) + " vs bound " +
                                 fmt_g17(rep.bound)));
  }

  {
    // Expressivity construction reaches its epsilon target.
    int T = 20, q = 2, d = 3, d_e = 256;
    double eps = 0.2;
    double alpha = std::ceil(2.0 * std::log(2.0 * T) / eps);
    model::ModelParams p = model::construct_expressivity(d, d_e, alpha);
    task::TaskConfig tc{T, q, d};
    double sup = 0.0;
    num::RngStream er = rng.substream(40);
    pe::PosEncoding E =
        pe::sample_rip_pe(er, d_e, T, q, 0.25, pe::RipMode::Pairwise, 2000);
    for (int it = 0; it < 2000; ++it) {
      num::RngStream sr = rng.substream(41, it);
      task::Sample s = task::sample_instance(sr, tc);
      auto in = task::assemble(s, E, std::vector<double>(d, 0.0));
      auto outv = model::forward(p, in);
      double e2 = 0.0;
      for (int i = 0; i < d; ++i) {
        double r = outv[i] - s.target[i];
        e2 += r * r;
      }
      sup = std::max(sup, std::sqrt(e2));
    }
    out.push_back(make_check("bounds.expressivity_sup_error", sup <= eps,
                             "sup error " + fmt_g17(sup) + " <= " + fmt_g17(eps)));
  }

  return out;
}

std::vector<Check> run_suite(const std::string& name, uint64_t seed) {
  if (name == "encoding") return suite_encoding(seed);
  if (name == "gradients") return suite_gradients(seed);
  if (name == "reduced") return suite_reduced(seed);
  if (name == "bounds") return suite_bounds(seed);
  if (name == "all") {
    std::vector<Check> all;
    for (const char* s : {"encoding", "gradients", "reduced", "bounds"}) {
      auto part = run_suite(s, seed);
      all.insert(all.end(), part.begin(), part.end());
    }
    return all;
  }
  fail(ErrorCode::Config, "unknown verify suite: " + name);
}

bool all_pass(const std::vector<Check>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

}  // namespace sts::verify
