#pragma once

#include <cmath>
#include <vector>

#include "sts/numerics.hpp"

namespace sts::optim {

// SGD / Adam over a flat list of parameter matrices. Shared by the
// attention trainer and the FCN baseline trainer.
struct Optimizer {
  enum class Kind { SGD, Adam };
  Kind kind = Kind::SGD;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  long t = 0;
  std::vector<num::Mat> m1;  // first moments (Adam)
  std::vector<num::Mat> m2;  // second moments (Adam)

  // grads holds the gradients of the loss; the update is params -= eta * step.
  void step(std::vector<num::Mat*> params, const std::vector<const num::Mat*>& grads,
            double eta) {
    ++t;
    if (kind == Kind::SGD) {
      for (size_t p = 0; p < params.size(); ++p)
        for (size_t i = 0; i < params[p]->a.size(); ++i)
          params[p]->a[i] -= eta * grads[p]->a[i];
      return;
    }
    if (m1.empty()) {
      for (auto* pm : params) {
        m1.emplace_back(pm->rows, pm->cols);
        m2.emplace_back(pm->rows, pm->cols);
      }
    }
    double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    for (size_t p = 0; p < params.size(); ++p) {
      for (size_t i = 0; i < params[p]->a.size(); ++i) {
        double g = grads[p]->a[i];
        m1[p].a[i] = beta1 * m1[p].a[i] + (1.0 - beta1) * g;
        m2[p].a[i] = beta2 * m2[p].a[i] + (1.0 - beta2) * g * g;
        double mh = m1[p].a[i] / bc1;
        double vh = m2[p].a[i] / bc2;
        params[p]->a[i] -= eta * mh / (std::sqrt(vh) + eps);
      }
    }
  }
};

}  // namespace sts::optim
