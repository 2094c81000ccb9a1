#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "wunet/ops.hpp"
#include "wunet/rng.hpp"
#include "wunet/tensor.hpp"

namespace testutil {

// Central finite-difference gradient oracle. The loss builder must rebuild
// the graph from the same leaf tensors on every call; numeric evaluation
// perturbs leaf values in place under NoGradGuard. Checks run in double with
// step 1e-3 and report the worst relative error over all leaf elements.

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst;  // leaf index / element of the worst error
};

inline GradCheckResult check_gradients(
    std::vector<wunet::Tensor<double>>& leaves,
    const std::function<wunet::Tensor<double>()>& make_loss,
    double step = 1e-3) {
  for (auto& leaf : leaves) {
    leaf.set_requires_grad(true);
    leaf.zero_grad();
  }
  auto loss = make_loss();
  wunet::backward(loss);
  std::vector<std::vector<double>> analytic;
  for (auto& leaf : leaves)
    analytic.push_back(leaf.has_grad() ? leaf.grad()
                                       : std::vector<double>(leaf.numel(), 0.0));

  GradCheckResult result;
  wunet::NoGradGuard ng;
  for (std::size_t l = 0; l < leaves.size(); ++l) {
    auto& data = leaves[l].data();
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double saved = data[i];
      data[i] = saved + step;
      const double up = make_loss().item();
      data[i] = saved - step;
      const double down = make_loss().item();
      data[i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double a = analytic[l][i];
      const double rel = std::abs(a - numeric) /
                         std::max({1.0, std::abs(a), std::abs(numeric)});
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst = "leaf " + std::to_string(l) + " elem " + std::to_string(i);
      }
    }
  }
  return result;
}

inline std::vector<double> random_values(std::size_t n, std::uint64_t seed,
                                         double lo = -1.0, double hi = 1.0) {
  wunet::Rng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = rng.uniform(lo, hi);
  return out;
}

// Uniform magnitudes bounded away from zero, for ops with a kink at 0 (relu).
inline std::vector<double> random_values_away_from_zero(std::size_t n,
                                                        std::uint64_t seed,
                                                        double margin = 0.05) {
  wunet::Rng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) {
    const double mag = margin + (1.0 - margin) * rng.next_double();
    v = rng.next_double() < 0.5 ? -mag : mag;
  }
  return out;
}

// [N,C,H,W] values whose 2x2 pool windows have pairwise gaps well above the
// finite-difference step, so perturbation never flips an argmax.
inline std::vector<double> pool_safe_values(int n, int c, int h, int w,
                                            std::uint64_t seed) {
  wunet::Rng rng(seed);
  std::vector<double> out(std::size_t(n) * c * h * w, 0.0);
  for (int nc = 0; nc < n * c; ++nc) {
    double* plane = out.data() + std::size_t(nc) * h * w;
    for (int oh = 0; oh < h / 2; ++oh) {
      for (int ow = 0; ow < w / 2; ++ow) {
        double slot[4] = {0.1, 0.35, 0.6, 0.85};
        for (int k = 3; k > 0; --k)
          std::swap(slot[k], slot[std::size_t(rng.uniform_int(0, k))]);
        plane[std::size_t(2 * oh) * w + 2 * ow] = slot[0] + rng.uniform(-0.02, 0.02);
        plane[std::size_t(2 * oh) * w + 2 * ow + 1] = slot[1] + rng.uniform(-0.02, 0.02);
        plane[std::size_t(2 * oh + 1) * w + 2 * ow] = slot[2] + rng.uniform(-0.02, 0.02);
        plane[std::size_t(2 * oh + 1) * w + 2 * ow + 1] = slot[3] + rng.uniform(-0.02, 0.02);
      }
    }
  }
  return out;
}

}  // namespace testutil
