#include "sts/reduced.hpp"

#include <cmath>
#include <string>

namespace sts::reduced {

double s_plus_onehot(double C, int T, int q) {
  return 1.0 / (q + (T - q) * std::exp(-C));
}

double alpha_star(double s_plus, int T, int q) {
  return (T - q) * s_plus / (T * q * s_plus * s_plus - 2.0 * q * s_plus + 1.0);
}

double loss_closed_form(double alpha, double s_plus, int T, int q, int d) {
  double a = alpha * s_plus - 1.0 / q;
  double b = 1.0 - q * s_plus;
  return d / (2.0 * (T - q)) * ((T - q) * q * a * a + alpha * alpha * b * b);
}

ReducedState step_onehot(const ReducedState& st, double eta, int T, int q, int d) {
  double s = s_plus_onehot(st.C, T, q);
  double denom_poly = T * q * s * s - 2.0 * q * s + 1.0;
  ReducedState nx;
  nx.alpha = st.alpha + eta * s * (1.0 - st.alpha * denom_poly / ((T - q) * s));
  nx.C = st.C + eta * (st.alpha * d / (T - 1.0)) * s * (1.0 - q * s) *
                    (1.0 + (q * st.alpha / (T - q)) * (1.0 - T * s));
  nx.t = st.t + 1;
  return nx;
}

std::pair<double, double> s_plus_bounds_stochastic(double C, int T, int q,
                                                   double delta) {
  if (delta <= 0.0 || delta >= 1.0 / 3.0)
    fail(ErrorCode::Config, "s_plus_bounds_stochastic: delta must be in (0, 1/3)");
  double lo = 1.0 / (q + (T - q) * std::exp(-(1.0 - 3.0 * delta) * C / (1.0 - 2.0 * delta)));
  double hi = 1.0 / (q + (T - q) * std::exp(-(1.0 - delta) * C / (1.0 - 2.0 * delta)));
  return {lo, hi};
}

ConvergenceReport convergence_report(int T, int q, int d, double eta, double eps,
                                     double delta) {
  if (T < 2 || q < 1 || d < 1 || eta <= 0.0 || eps <= 0.0)
    fail(ErrorCode::Config, "convergence_report: invalid hyperparameters");
  ConvergenceReport r;
  r.delta_used = delta;
  r.t_bound_onehot = static_cast<double>(T) * T * d / (eta * eps);
  double expo = (2.0 - 2.0 * delta) / (1.0 - 3.0 * delta);
  r.t_bound_stochastic = std::pow(static_cast<double>(T), expo) / eta +
                         r.t_bound_onehot;
  return r;
}

std::vector<TrajectoryRow> simulate_onehot(int T, int q, int d, double eta,
                                           long steps) {
  if (T < 2 || q < 1 || q >= T || d < 1 || eta <= 0.0 || steps < 0)
    fail(ErrorCode::Config, "simulate_onehot: invalid parameters");
  std::vector<TrajectoryRow> rows;
  rows.reserve(steps + 1);
  ReducedState st;
  for (long t = 0; t <= steps; ++t) {
    double s = s_plus_onehot(st.C, T, q);
    rows.push_back({t, st.C, st.alpha, s, loss_closed_form(st.alpha, s, T, q, d)});
    if (t == steps) break;
    ReducedState nx = step_onehot(st, eta, T, q, d);
    if (!(std::isfinite(nx.C) && std::isfinite(nx.alpha)))
      fail(ErrorCode::Divergence, "simulate_onehot: non-finite state at step " +
                                      std::to_string(t + 1));
    if (nx.C < st.C - 1e-12)
      fail(ErrorCode::VerifyFailed,
           "simulate_onehot: C decreased at step " + std::to_string(t + 1));
    st = nx;
  }
  return rows;
}

}  // namespace sts::reduced
