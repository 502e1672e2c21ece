#include "adsight/nn/params.hpp"

#include <cmath>

namespace adsight::nn {

void adam_step(ParamStore& params, const GradStore& grads, double lr, double beta1, double beta2,
               double eps) {
  for (const auto& [name, g] : grads.grads) {
    if (!g.allFinite()) throw NonFiniteGradient("non-finite gradient for " + name);
    if (params.entries.find(name) == params.entries.end()) {
      throw std::out_of_range("gradient for unknown parameter: " + name);
    }
  }

  params.step += 1;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(params.step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(params.step));

  for (const auto& [name, g] : grads.grads) {
    auto& e = params.entries.at(name);
    e.m = beta1 * e.m + (1.0 - beta1) * g;
    e.v = beta2 * e.v + (1.0 - beta2) * g.cwiseProduct(g);
    e.value.array() -=
        lr * (e.m.array() / bc1) / ((e.v.array() / bc2).sqrt() + eps);
  }
}

}  // namespace adsight::nn
