#pragma once

#include <cmath>
#include <vector>

#include "wunet/tensor.hpp"

namespace wunet {

// Adam with bias correction. Moment buffers are allocated on first use and
// keyed by parameter index, so the parameter list must stay stable across
// steps. Gradients are zeroed after each update.
template <typename T>
struct AdamState {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  std::vector<std::vector<T>> m;
  std::vector<std::vector<T>> v;
};

template <typename T>
void adam_step(std::vector<Tensor<T>>& params, AdamState<T>& state) {
  for (const auto& p : params) {
    if (!p.requires_grad() || !p.has_grad())
      throw ContractError("adam_step: parameter without gradient");
  }
  if (state.m.empty()) {
    state.m.resize(params.size());
    state.v.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      state.m[i].assign(params[i].numel(), T(0));
      state.v[i].assign(params[i].numel(), T(0));
    }
  }
  if (state.m.size() != params.size())
    throw ContractError("adam_step: parameter list changed size");

  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, double(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, double(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& value = params[i].data();
    auto& grad = params[i].grad();
    auto& m = state.m[i];
    auto& v = state.v[i];
    if (m.size() != value.size())
      throw ContractError("adam_step: moment buffer shape mismatch");
    for (std::size_t j = 0; j < value.size(); ++j) {
      const double g = double(grad[j]);
      const double mj = state.beta1 * double(m[j]) + (1.0 - state.beta1) * g;
      const double vj = state.beta2 * double(v[j]) + (1.0 - state.beta2) * g * g;
      m[j] = T(mj);
      v[j] = T(vj);
      const double mhat = mj / bc1;
      const double vhat = vj / bc2;
      value[j] = T(double(value[j]) - state.lr * mhat / (std::sqrt(vhat) + state.eps));
    }
    params[i].zero_grad();
  }
}

}  // namespace wunet
