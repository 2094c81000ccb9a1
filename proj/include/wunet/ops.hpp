#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "wunet/tensor.hpp"

namespace wunet {

// The operator set a UNet needs, nothing more: conv2d (odd kernel, stride 1,
// same padding), maxpool2, nearest-neighbor 2x upsample, channel concat,
// relu, sigmoid, mse loss, plus add/sum as graph glue. No broadcasting.

namespace detail {

template <typename T>
Tensor<T> make_result(std::vector<int> shape, std::vector<T> value,
                      std::vector<Tensor<T>> parents,
                      const std::function<void(Node<T>*)>& attach) {
  auto n = std::make_shared<Node<T>>();
  n->shape = std::move(shape);
  n->value = std::move(value);
  bool rg = false;
  for (const auto& p : parents) rg = rg || p.requires_grad();
  n->requires_grad = grad_mode() && rg;
  if (n->requires_grad) {
    for (auto& p : parents) n->parents.push_back(p.node());
    attach(n.get());
  }
  return Tensor<T>(std::move(n));
}

inline void require(bool cond, const char* msg) {
  if (!cond) throw ShapeError(msg);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// conv2d: x [N,C,H,W] * w [F,C,K,K] + b [F] -> [N,F,H,W], stride 1, zero
// padding K/2 (odd K only). Cross-correlation, the usual DNN convention.

template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b) {
  detail::require(x.shape().size() == 4, "conv2d: input must be [N,C,H,W]");
  detail::require(w.shape().size() == 4, "conv2d: weight must be [F,C,K,K]");
  const int N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  const int F = w.dim(0), K = w.dim(2);
  detail::require(w.dim(1) == C, "conv2d: channel mismatch between input and weight");
  detail::require(w.dim(3) == K && K % 2 == 1, "conv2d: kernel must be square with odd size");
  detail::require(b.shape().size() == 1 && b.dim(0) == F, "conv2d: bias must be [F]");
  const int pad = K / 2;

  std::vector<T> out(std::size_t(N) * F * H * W);
  const T* xv = x.data().data();
  const T* wv = w.data().data();
  const T* bv = b.data().data();
  const std::size_t plane = std::size_t(H) * W;
  std::vector<T> rowbuf(static_cast<std::size_t>(W));
  for (int n = 0; n < N; ++n) {
    for (int f = 0; f < F; ++f) {
      T* op = out.data() + (std::size_t(n) * F + f) * plane;
      for (int oh = 0; oh < H; ++oh) {
        std::fill(rowbuf.begin(), rowbuf.end(), bv[f]);
        for (int c = 0; c < C; ++c) {
          const T* xp = xv + (std::size_t(n) * C + c) * plane;
          const T* wp = wv + (std::size_t(f) * C + c) * std::size_t(K) * K;
          for (int kh = 0; kh < K; ++kh) {
            const int ih = oh + kh - pad;
            if (ih < 0 || ih >= H) continue;
            const T* xrow = xp + std::size_t(ih) * W;
            if (K == 3) {
              // Fused three-tap row update; edge columns drop the
              // out-of-range taps.
              const T w0 = wp[kh * 3], w1 = wp[kh * 3 + 1], w2 = wp[kh * 3 + 2];
              rowbuf[0] += w1 * xrow[0] + w2 * xrow[1];
              for (int ow = 1; ow < W - 1; ++ow)
                rowbuf[std::size_t(ow)] +=
                    w0 * xrow[ow - 1] + w1 * xrow[ow] + w2 * xrow[ow + 1];
              if (W > 1)
                rowbuf[std::size_t(W - 1)] += w0 * xrow[W - 2] + w1 * xrow[W - 1];
            } else {
              for (int kw = 0; kw < K; ++kw) {
                const int dx = kw - pad;
                const int ow0 = std::max(0, -dx);
                const int ow1 = std::min(W, W - dx);
                const T wk = wp[kh * K + kw];
                const T* xs = xrow + dx;
                for (int ow = ow0; ow < ow1; ++ow)
                  rowbuf[std::size_t(ow)] += wk * xs[ow];
              }
            }
          }
        }
        std::copy(rowbuf.begin(), rowbuf.end(), op + std::size_t(oh) * W);
      }
    }
  }

  return detail::make_result<T>(
      {N, F, H, W}, std::move(out), {x, w, b},
      [=](detail::Node<T>* self) {
        auto xn = x.node();
        auto wn = w.node();
        auto bn = b.node();
        self->backprop = [self, xn, wn, bn, N, C, H, W, F, K, pad]() {
          const T* gy = self->grad.data();
          const std::size_t plane = std::size_t(H) * W;
          if (bn->requires_grad) {
            bn->ensure_grad();
            for (int n = 0; n < N; ++n)
              for (int f = 0; f < F; ++f) {
                const T* gp = gy + (std::size_t(n) * F + f) * plane;
                T acc = 0;
                for (std::size_t i = 0; i < plane; ++i) acc += gp[i];
                bn->grad[std::size_t(f)] += acc;
              }
          }
          if (wn->requires_grad) {
            wn->ensure_grad();
            const T* xv = xn->value.data();
            std::vector<T> acc(std::size_t(K) * K);
            for (int n = 0; n < N; ++n) {
              for (int f = 0; f < F; ++f) {
                const T* gp = gy + (std::size_t(n) * F + f) * plane;
                for (int c = 0; c < C; ++c) {
                  const T* xp = xv + (std::size_t(n) * C + c) * plane;
                  std::fill(acc.begin(), acc.end(), T(0));
                  for (int oh = 0; oh < H; ++oh) {
                    const T* grow = gp + std::size_t(oh) * W;
                    for (int kh = 0; kh < K; ++kh) {
                      const int ih = oh + kh - pad;
                      if (ih < 0 || ih >= H) continue;
                      const T* xrow = xp + std::size_t(ih) * W;
                      if (K == 3) {
                        T d0 = 0, d1 = 0, d2 = 0;
                        d1 += grow[0] * xrow[0];
                        if (W > 1) d2 += grow[0] * xrow[1];
                        for (int ow = 1; ow < W - 1; ++ow) {
                          const T g = grow[ow];
                          d0 += g * xrow[ow - 1];
                          d1 += g * xrow[ow];
                          d2 += g * xrow[ow + 1];
                        }
                        if (W > 1) {
                          d0 += grow[W - 1] * xrow[W - 2];
                          d1 += grow[W - 1] * xrow[W - 1];
                        }
                        acc[std::size_t(kh) * 3] += d0;
                        acc[std::size_t(kh) * 3 + 1] += d1;
                        acc[std::size_t(kh) * 3 + 2] += d2;
                      } else {
                        for (int kw = 0; kw < K; ++kw) {
                          const int dx = kw - pad;
                          const int ow0 = std::max(0, -dx);
                          const int ow1 = std::min(W, W - dx);
                          const T* xs = xrow + dx;
                          T dot = 0;
                          for (int ow = ow0; ow < ow1; ++ow) dot += grow[ow] * xs[ow];
                          acc[std::size_t(kh) * K + kw] += dot;
                        }
                      }
                    }
                  }
                  T* gw = wn->grad.data() + (std::size_t(f) * C + c) * std::size_t(K) * K;
                  for (std::size_t i = 0; i < acc.size(); ++i) gw[i] += acc[i];
                }
              }
            }
          }
          if (xn->requires_grad) {
            xn->ensure_grad();
            const T* wv = wn->value.data();
            std::vector<T> rowbuf(static_cast<std::size_t>(W));
            for (int n = 0; n < N; ++n) {
              for (int c = 0; c < C; ++c) {
                T* gx = xn->grad.data() + (std::size_t(n) * C + c) * plane;
                for (int ih = 0; ih < H; ++ih) {
                  std::fill(rowbuf.begin(), rowbuf.end(), T(0));
                  for (int f = 0; f < F; ++f) {
                    const T* gp = gy + (std::size_t(n) * F + f) * plane;
                    const T* wp = wv + (std::size_t(f) * C + c) * std::size_t(K) * K;
                    for (int kh = 0; kh < K; ++kh) {
                      const int oh = ih - kh + pad;
                      if (oh < 0 || oh >= H) continue;
                      const T* grow = gp + std::size_t(oh) * W;
                      if (K == 3) {
                        // rowbuf[iw] += sum_kw w[kw] * gy[iw - (kw-1)]
                        const T w0 = wp[kh * 3], w1 = wp[kh * 3 + 1], w2 = wp[kh * 3 + 2];
                        rowbuf[0] += w1 * grow[0] + (W > 1 ? w0 * grow[1] : T(0));
                        for (int iw = 1; iw < W - 1; ++iw)
                          rowbuf[std::size_t(iw)] +=
                              w2 * grow[iw - 1] + w1 * grow[iw] + w0 * grow[iw + 1];
                        if (W > 1)
                          rowbuf[std::size_t(W - 1)] +=
                              w2 * grow[W - 2] + w1 * grow[W - 1];
                      } else {
                        for (int kw = 0; kw < K; ++kw) {
                          const int dx = kw - pad;
                          const int ow0 = std::max(0, -dx);
                          const int ow1 = std::min(W, W - dx);
                          const T wk = wp[kh * K + kw];
                          for (int ow = ow0; ow < ow1; ++ow)
                            rowbuf[std::size_t(ow + dx)] += wk * grow[ow];
                        }
                      }
                    }
                  }
                  T* gxrow = gx + std::size_t(ih) * W;
                  for (int iw = 0; iw < W; ++iw) gxrow[iw] += rowbuf[std::size_t(iw)];
                }
              }
            }
          }
        };
      });
}

// ---------------------------------------------------------------------------
// maxpool2: 2x2 window, stride 2. Gradient flows to the window argmax; ties
// resolve to the first element in row-major window order.

template <typename T>
Tensor<T> maxpool2(const Tensor<T>& x) {
  detail::require(x.shape().size() == 4, "maxpool2: input must be [N,C,H,W]");
  const int N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  detail::require(H % 2 == 0 && W % 2 == 0, "maxpool2: H and W must be even");
  const int Ho = H / 2, Wo = W / 2;
  std::vector<T> out(std::size_t(N) * C * Ho * Wo);
  std::vector<std::uint32_t> argmax(out.size());
  const T* xv = x.data().data();
  std::size_t oi = 0;
  for (int nc = 0; nc < N * C; ++nc) {
    const T* xp = xv + std::size_t(nc) * H * W;
    const std::size_t base = std::size_t(nc) * H * W;
    for (int oh = 0; oh < Ho; ++oh) {
      for (int ow = 0; ow < Wo; ++ow) {
        const int iy = oh * 2, ix = ow * 2;
        std::size_t best = std::size_t(iy) * W + ix;
        T bv = xp[best];
        const std::size_t cands[3] = {best + 1, best + W, best + W + 1};
        for (std::size_t cand : cands) {
          if (xp[cand] > bv) {
            bv = xp[cand];
            best = cand;
          }
        }
        out[oi] = bv;
        argmax[oi] = std::uint32_t(base + best);
        ++oi;
      }
    }
  }
  return detail::make_result<T>(
      {N, C, Ho, Wo}, std::move(out), {x},
      [&x, argmax = std::move(argmax)](detail::Node<T>* self) {
        auto xn = x.node();
        self->backprop = [self, xn, argmax = std::move(argmax)]() {
          if (!xn->requires_grad) return;
          xn->ensure_grad();
          const T* gy = self->grad.data();
          for (std::size_t i = 0; i < argmax.size(); ++i)
            xn->grad[argmax[i]] += gy[i];
        };
      });
}

// ---------------------------------------------------------------------------
// upsample_nn2: nearest-neighbor 2x replication; backward sums each parent's
// four children.

template <typename T>
Tensor<T> upsample_nn2(const Tensor<T>& x) {
  detail::require(x.shape().size() == 4, "upsample_nn2: input must be [N,C,H,W]");
  const int N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  const int Ho = H * 2, Wo = W * 2;
  std::vector<T> out(std::size_t(N) * C * Ho * Wo);
  const T* xv = x.data().data();
  for (int nc = 0; nc < N * C; ++nc) {
    const T* xp = xv + std::size_t(nc) * H * W;
    T* op = out.data() + std::size_t(nc) * Ho * Wo;
    for (int y = 0; y < H; ++y) {
      for (int x2 = 0; x2 < W; ++x2) {
        const T v = xp[std::size_t(y) * W + x2];
        T* o0 = op + std::size_t(2 * y) * Wo + 2 * x2;
        o0[0] = v;
        o0[1] = v;
        o0[Wo] = v;
        o0[Wo + 1] = v;
      }
    }
  }
  return detail::make_result<T>(
      {N, C, Ho, Wo}, std::move(out), {x}, [&x, N, C, H, W](detail::Node<T>* self) {
        auto xn = x.node();
        self->backprop = [self, xn, N, C, H, W]() {
          if (!xn->requires_grad) return;
          xn->ensure_grad();
          const int Ho = H * 2, Wo = W * 2;
          const T* gy = self->grad.data();
          for (int nc = 0; nc < N * C; ++nc) {
            T* gx = xn->grad.data() + std::size_t(nc) * H * W;
            const T* gp = gy + std::size_t(nc) * Ho * Wo;
            for (int y = 0; y < H; ++y) {
              for (int x2 = 0; x2 < W; ++x2) {
                const T* g0 = gp + std::size_t(2 * y) * Wo + 2 * x2;
                gx[std::size_t(y) * W + x2] += g0[0] + g0[1] + g0[Wo] + g0[Wo + 1];
              }
            }
          }
        };
      });
}

// ---------------------------------------------------------------------------
// concat_channels: a [N,C1,H,W] ++ b [N,C2,H,W] -> [N,C1+C2,H,W].

template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
  detail::require(a.shape().size() == 4 && b.shape().size() == 4,
                  "concat_channels: inputs must be [N,C,H,W]");
  const int N = a.dim(0), C1 = a.dim(1), H = a.dim(2), W = a.dim(3);
  const int C2 = b.dim(1);
  detail::require(b.dim(0) == N && b.dim(2) == H && b.dim(3) == W,
                  "concat_channels: spatial or batch mismatch");
  const std::size_t plane = std::size_t(H) * W;
  std::vector<T> out(std::size_t(N) * (C1 + C2) * plane);
  for (int n = 0; n < N; ++n) {
    std::copy(a.data().begin() + std::size_t(n) * C1 * plane,
              a.data().begin() + std::size_t(n + 1) * C1 * plane,
              out.begin() + std::size_t(n) * (C1 + C2) * plane);
    std::copy(b.data().begin() + std::size_t(n) * C2 * plane,
              b.data().begin() + std::size_t(n + 1) * C2 * plane,
              out.begin() + (std::size_t(n) * (C1 + C2) + C1) * plane);
  }
  return detail::make_result<T>(
      {N, C1 + C2, H, W}, std::move(out), {a, b},
      [&a, &b, N, C1, C2, plane](detail::Node<T>* self) {
        auto an = a.node();
        auto bn = b.node();
        self->backprop = [self, an, bn, N, C1, C2, plane]() {
          const T* gy = self->grad.data();
          if (an->requires_grad) {
            an->ensure_grad();
            for (int n = 0; n < N; ++n) {
              const T* src = gy + std::size_t(n) * (C1 + C2) * plane;
              T* dst = an->grad.data() + std::size_t(n) * C1 * plane;
              for (std::size_t i = 0; i < std::size_t(C1) * plane; ++i)
                dst[i] += src[i];
            }
          }
          if (bn->requires_grad) {
            bn->ensure_grad();
            for (int n = 0; n < N; ++n) {
              const T* src = gy + (std::size_t(n) * (C1 + C2) + C1) * plane;
              T* dst = bn->grad.data() + std::size_t(n) * C2 * plane;
              for (std::size_t i = 0; i < std::size_t(C2) * plane; ++i)
                dst[i] += src[i];
            }
          }
        };
      });
}

// ---------------------------------------------------------------------------
// scale_shift: elementwise a*x + b with constant coefficients. Used to map
// network inputs from pixel range [0,1] onto a zero-centered range.

template <typename T>
Tensor<T> scale_shift(const Tensor<T>& x, T scale, T shift) {
  std::vector<T> out(x.numel());
  const auto& xv = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale * xv[i] + shift;
  return detail::make_result<T>(
      x.shape(), std::move(out), {x}, [&x, scale](detail::Node<T>* self) {
        auto xn = x.node();
        self->backprop = [self, xn, scale]() {
          if (!xn->requires_grad) return;
          xn->ensure_grad();
          const T* gy = self->grad.data();
          for (std::size_t i = 0; i < xn->value.size(); ++i)
            xn->grad[i] += scale * gy[i];
        };
      });
}

// ---------------------------------------------------------------------------
// Elementwise activations. relu uses subgradient 0 at exactly 0.

template <typename T>
Tensor<T> relu(const Tensor<T>& x) {
  std::vector<T> out(x.numel());
  const auto& xv = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] > T(0) ? xv[i] : T(0);
  return detail::make_result<T>(
      x.shape(), std::move(out), {x}, [&x](detail::Node<T>* self) {
        auto xn = x.node();
        self->backprop = [self, xn]() {
          if (!xn->requires_grad) return;
          xn->ensure_grad();
          const T* gy = self->grad.data();
          for (std::size_t i = 0; i < xn->value.size(); ++i)
            if (xn->value[i] > T(0)) xn->grad[i] += gy[i];
        };
      });
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x) {
  std::vector<T> out(x.numel());
  const auto& xv = x.data();
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = T(1) / (T(1) + std::exp(-xv[i]));
  return detail::make_result<T>(
      x.shape(), std::move(out), {x}, [&x](detail::Node<T>* self) {
        auto xn = x.node();
        self->backprop = [self, xn]() {
          if (!xn->requires_grad) return;
          xn->ensure_grad();
          const T* gy = self->grad.data();
          const T* s = self->value.data();
          for (std::size_t i = 0; i < xn->value.size(); ++i)
            xn->grad[i] += gy[i] * s[i] * (T(1) - s[i]);
        };
      });
}

// ---------------------------------------------------------------------------
// mse_loss: mean over all elements of (pred - target)^2. The forward sum is
// accumulated in double regardless of T.

template <typename T>
Tensor<T> mse_loss(const Tensor<T>& pred, const Tensor<T>& target) {
  detail::require(pred.shape() == target.shape(), "mse_loss: shape mismatch");
  const auto& p = pred.data();
  const auto& t = target.data();
  if (p.empty()) throw ShapeError("mse_loss: empty tensors");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = double(p[i]) - double(t[i]);
    acc += d * d;
  }
  const T value = T(acc / double(p.size()));
  return detail::make_result<T>(
      {1}, {value}, {pred, target}, [&pred, &target](detail::Node<T>* self) {
        auto pn = pred.node();
        auto tn = target.node();
        self->backprop = [self, pn, tn]() {
          const double g = double(self->grad[0]);
          const double scale = 2.0 / double(pn->value.size());
          if (pn->requires_grad) {
            pn->ensure_grad();
            for (std::size_t i = 0; i < pn->value.size(); ++i)
              pn->grad[i] += T(g * scale * (double(pn->value[i]) - double(tn->value[i])));
          }
          if (tn->requires_grad) {
            tn->ensure_grad();
            for (std::size_t i = 0; i < tn->value.size(); ++i)
              tn->grad[i] -= T(g * scale * (double(pn->value[i]) - double(tn->value[i])));
          }
        };
      });
}

// ---------------------------------------------------------------------------
// Graph glue used by tests and diagnostics.

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  detail::require(a.shape() == b.shape(), "add: shape mismatch");
  std::vector<T> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
  return detail::make_result<T>(
      a.shape(), std::move(out), {a, b}, [&a, &b](detail::Node<T>* self) {
        auto an = a.node();
        auto bn = b.node();
        self->backprop = [self, an, bn]() {
          const T* gy = self->grad.data();
          if (an->requires_grad) {
            an->ensure_grad();
            for (std::size_t i = 0; i < an->value.size(); ++i) an->grad[i] += gy[i];
          }
          if (bn->requires_grad) {
            bn->ensure_grad();
            for (std::size_t i = 0; i < bn->value.size(); ++i) bn->grad[i] += gy[i];
          }
        };
      });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& x) {
  double acc = 0.0;
  for (const T& v : x.data()) acc += double(v);
  return detail::make_result<T>(
      {1}, {T(acc)}, {x}, [&x](detail::Node<T>* self) {
        auto xn = x.node();
        self->backprop = [self, xn]() {
          if (!xn->requires_grad) return;
          xn->ensure_grad();
          const T g = self->grad[0];
          for (std::size_t i = 0; i < xn->value.size(); ++i) xn->grad[i] += g;
        };
      });
}

}  // namespace wunet
