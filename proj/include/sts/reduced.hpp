#pragma once

#include <vector>

#include "sts/error.hpp"

namespace sts::reduced {

// The two scalars (C, alpha) that parameterize the one-hot training
// trajectory: C scales the position block of W, alpha the token block of V.
struct ReducedState {
  double C = 0.0;
  double alpha = 0.0;
  long t = 0;
};

// 1/(q + (T-q) e^{-C}): attention on a correct position under the aligned
// one-hot parameterization.
double s_plus_onehot(double C, int T, int q);

// Stationary value scale given s_plus: (T-q) s / (T q s^2 - 2 q s + 1).
double alpha_star(double s_plus, int T, int q);

// Closed-form population loss of the aligned model:
// d/(2(T-q)) * ((T-q) q (alpha s_plus - 1/q)^2 + alpha^2 (1 - q s_plus)^2).
double loss_closed_form(double alpha, double s_plus, int T, int q, int d);

// One discrete gradient-descent update of (C, alpha):
//   alpha' = alpha + eta s (1 - alpha (T q s^2 - 2 q s + 1)/((T-q) s))
//   C'     = C + eta (alpha d/(T-1)) s (1 - q s) (1 + (q alpha/(T-q))(1 - T s))
// with s = s_plus_onehot(C).
ReducedState step_onehot(const ReducedState& st, double eta, int T, int q, int d);

// Two-sided bound on the correct-position attention under stochastic PE
// with parameter delta, at W = C * blockdiag(0, I_{d_e}):
//   lo = 1/(q + (T-q) e^{-(1-3 delta) C/(1-2 delta)})
//   hi = 1/(q + (T-q) e^{-(1-delta) C/(1-2 delta)})
std::pair<double, double> s_plus_bounds_stochastic(double C, int T, int q,
                                                   double delta);

struct ConvergenceReport {
  double t_bound_onehot = 0.0;      // T^2 d / (eta eps)
  double t_bound_stochastic = 0.0;  // T^{(2-2d)/(1-3d)}/eta + T^2 d/(eta eps)
  double delta_used = 0.0;
  // Unit-constant evaluations of asymptotic bounds: advisory only.
  const char* label = "advisory: unit-constant evaluation of asymptotic bound";
};

ConvergenceReport convergence_report(int T, int q, int d, double eta, double eps,
                                     double delta = 0.1);

struct TrajectoryRow {
  long t;
  double C;
  double alpha;
  double s_plus;
  double loss;
};

// Simulate `steps` updates from (0, 0); row 0 is the initial state.
// Asserts the monotonicity of C along the way (a property of these
// dynamics from zero init) and fails loudly if violated.
std::vector<TrajectoryRow> simulate_onehot(int T, int q, int d, double eta,
                                           long steps);

}  // namespace sts::reduced
