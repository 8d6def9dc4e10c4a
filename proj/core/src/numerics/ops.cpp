#include "storseismic/numerics/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "storseismic/errors.hpp"

namespace storseismic {
namespace {

template <typename T>
using RowMajor =
    Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using ConstMap = Eigen::Map<const RowMajor<T>>;
template <typename T>
using MutMap = Eigen::Map<RowMajor<T>>;

template <typename T>
using NodeT = detail::Node<T>;

template <typename T>
NodeT<T>* grad_target(NodeT<T>& self, std::size_t i) {
  auto* parent = self.parents[i].get();
  if (!parent->requires_grad) {
    return nullptr;
  }
  parent->ensure_grad();
  return parent;
}

std::string both(const Shape& a, const Shape& b) {
  return shape_to_string(a) + " and " + shape_to_string(b);
}

bool is_suffix(const Shape& small, const Shape& big) {
  if (small.size() > big.size()) {
    return false;
  }
  return std::equal(small.rbegin(), small.rend(), big.rbegin());
}

struct AxisSplit {
  std::size_t outer = 1;
  std::size_t len = 1;
  std::size_t inner = 1;
};

AxisSplit split_at(const Shape& shape, std::size_t axis) {
  if (axis >= shape.size()) {
    throw ShapeError("axis " + std::to_string(axis) + " out of range for " +
                     shape_to_string(shape));
  }
  AxisSplit s;
  for (std::size_t i = 0; i < axis; ++i) s.outer *= shape[i];
  s.len = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

// Shared skeleton of add/sub/mul with suffix broadcasting. `da`/`db` return
// d(out)/d(a) and d(out)/d(b) at one element given the operand values.
template <typename T, typename Fwd, typename DA, typename DB>
Tensor<T> broadcast_binary(const Tensor<T>& a, const Tensor<T>& b,
                           const char* name, Fwd fwd, DA da, DB db) {
  Shape out_shape;
  if (a.shape() == b.shape() || is_suffix(b.shape(), a.shape())) {
    out_shape = a.shape();
  } else if (is_suffix(a.shape(), b.shape())) {
    out_shape = b.shape();
  } else {
    throw ShapeError(std::string(name) + ": cannot broadcast " +
                     both(a.shape(), b.shape()));
  }
  const std::size_t n = shape_numel(out_shape);
  const std::size_t na = a.numel();
  const std::size_t nb = b.numel();
  auto av = a.data();
  auto bv = b.data();
  std::vector<T> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = fwd(av[na == n ? i : i % na], bv[nb == n ? i : i % nb]);
  }
  return Tensor<T>::from_op(
      std::move(out_shape), std::move(out), {a, b},
      [n, na, nb, da, db](NodeT<T>& self) {
        const auto& av = self.parents[0]->data;
        const auto& bv = self.parents[1]->data;
        auto* pa = grad_target(self, 0);
        auto* pb = grad_target(self, 1);
        for (std::size_t i = 0; i < n; ++i) {
          const std::size_t ia = na == n ? i : i % na;
          const std::size_t ib = nb == n ? i : i % nb;
          const T g = self.grad[i];
          if (pa) pa->grad[ia] += g * da(av[ia], bv[ib]);
          if (pb) pb->grad[ib] += g * db(av[ia], bv[ib]);
        }
      });
}

template <typename T>
void check_finite(std::span<const T> values, const char* op) {
  for (T v : values) {
    if (!std::isfinite(v)) {
      throw NumericError(std::string(op) + ": non-finite input");
    }
  }
}

}  // namespace

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.rank() < 2 || b.rank() < 2) {
    throw ShapeError("matmul needs rank >= 2 operands, got " +
                     both(a.shape(), b.shape()));
  }
  const std::size_t m = a.dim(a.rank() - 2);
  const std::size_t k = a.dim(a.rank() - 1);
  const std::size_t kb = b.dim(b.rank() - 2);
  const std::size_t n = b.dim(b.rank() - 1);
  if (k != kb) {
    throw ShapeError("matmul inner dimensions differ: " +
                     both(a.shape(), b.shape()));
  }
  Shape out_shape(a.shape().begin(), a.shape().end() - 2);
  const bool shared_rhs = b.rank() == 2;
  if (!shared_rhs) {
    const Shape lead_b(b.shape().begin(), b.shape().end() - 2);
    if (lead_b != out_shape) {
      throw ShapeError("matmul batch dimensions differ: " +
                       both(a.shape(), b.shape()));
    }
  }
  const std::size_t batch = shape_numel(out_shape);
  out_shape.push_back(m);
  out_shape.push_back(n);

  std::vector<T> out(batch * m * n);
  const T* ap = a.data().data();
  const T* bp = b.data().data();
  if (shared_rhs) {
    MutMap<T>(out.data(), batch * m, n).noalias() =
        ConstMap<T>(ap, batch * m, k) * ConstMap<T>(bp, k, n);
  } else {
    for (std::size_t s = 0; s < batch; ++s) {
      MutMap<T>(out.data() + s * m * n, m, n).noalias() =
          ConstMap<T>(ap + s * m * k, m, k) * ConstMap<T>(bp + s * k * n, k, n);
    }
  }

  return Tensor<T>::from_op(
      std::move(out_shape), std::move(out), {a, b},
      [batch, m, k, n, shared_rhs](NodeT<T>& self) {
        const T* ap = self.parents[0]->data.data();
        const T* bp = self.parents[1]->data.data();
        const T* gp = self.grad.data();
        auto* pa = grad_target(self, 0);
        auto* pb = grad_target(self, 1);
        if (shared_rhs) {
          const std::size_t rows = batch * m;
          if (pa) {
            MutMap<T>(pa->grad.data(), rows, k).noalias() +=
                ConstMap<T>(gp, rows, n) * ConstMap<T>(bp, k, n).transpose();
          }
          if (pb) {
            MutMap<T>(pb->grad.data(), k, n).noalias() +=
                ConstMap<T>(ap, rows, k).transpose() * ConstMap<T>(gp, rows, n);
          }
          return;
        }
        for (std::size_t s = 0; s < batch; ++s) {
          const T* g = gp + s * m * n;
          if (pa) {
            MutMap<T>(pa->grad.data() + s * m * k, m, k).noalias() +=
                ConstMap<T>(g, m, n) *
                ConstMap<T>(bp + s * k * n, k, n).transpose();
          }
          if (pb) {
            MutMap<T>(pb->grad.data() + s * k * n, k, n).noalias() +=
                ConstMap<T>(ap + s * m * k, m, k).transpose() *
                ConstMap<T>(g, m, n);
          }
        }
      });
}

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  return broadcast_binary(
      a, b, "add", [](T x, T y) { return x + y; }, [](T, T) { return T(1); },
      [](T, T) { return T(1); });
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  return broadcast_binary(
      a, b, "sub", [](T x, T y) { return x - y; }, [](T, T) { return T(1); },
      [](T, T) { return T(-1); });
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  return broadcast_binary(
      a, b, "mul", [](T x, T y) { return x * y; }, [](T, T y) { return y; },
      [](T x, T) { return x; });
}

template <typename T>
Tensor<T> scale(const Tensor<T>& x, T factor) {
  auto xv = x.data();
  std::vector<T> out(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = xv[i] * factor;
  return Tensor<T>::from_op(x.shape(), std::move(out), {x},
                            [factor](NodeT<T>& self) {
                              if (auto* p = grad_target(self, 0)) {
                                for (std::size_t i = 0; i < self.grad.size(); ++i)
                                  p->grad[i] += self.grad[i] * factor;
                              }
                            });
}

template <typename T>
Tensor<T> transpose(const Tensor<T>& x) {
  if (x.rank() < 2) {
    throw ShapeError("transpose needs rank >= 2, got " +
                     shape_to_string(x.shape()));
  }
  return transpose(x, x.rank() - 2, x.rank() - 1);
}

template <typename T>
Tensor<T> transpose(const Tensor<T>& x, std::size_t axis0, std::size_t axis1) {
  const Shape& in_shape = x.shape();
  const std::size_t r = in_shape.size();
  if (axis0 >= r || axis1 >= r) {
    throw ShapeError("transpose axes out of range for " +
                     shape_to_string(in_shape));
  }
  Shape out_shape = in_shape;
  std::swap(out_shape[axis0], out_shape[axis1]);

  std::vector<std::size_t> in_strides(r, 1);
  for (std::size_t i = r; i-- > 1;) in_strides[i - 1] = in_strides[i] * in_shape[i];
  std::vector<std::size_t> perm_strides = in_strides;
  std::swap(perm_strides[axis0], perm_strides[axis1]);

  // map[out_flat] = in_flat
  const std::size_t n = x.numel();
  std::vector<std::size_t> map(n);
  std::vector<std::size_t> idx(r, 0);
  for (std::size_t o = 0; o < n; ++o) {
    std::size_t src = 0;
    for (std::size_t d = 0; d < r; ++d) src += idx[d] * perm_strides[d];
    map[o] = src;
    for (std::size_t d = r; d-- > 0;) {
      if (++idx[d] < out_shape[d]) break;
      idx[d] = 0;
    }
  }
  auto xv = x.data();
  std::vector<T> out(n);
  for (std::size_t o = 0; o < n; ++o) out[o] = xv[map[o]];
  return Tensor<T>::from_op(std::move(out_shape), std::move(out), {x},
                            [map = std::move(map)](NodeT<T>& self) {
                              if (auto* p = grad_target(self, 0)) {
                                for (std::size_t o = 0; o < map.size(); ++o)
                                  p->grad[map[o]] += self.grad[o];
                              }
                            });
}

template <typename T>
Tensor<T> reshape(const Tensor<T>& x, Shape shape) {
  if (shape_numel(shape) != x.numel()) {
    throw ShapeError("reshape cannot map " + both(x.shape(), shape));
  }
  auto xv = x.data();
  return Tensor<T>::from_op(std::move(shape),
                            std::vector<T>(xv.begin(), xv.end()), {x},
                            [](NodeT<T>& self) {
                              if (auto* p = grad_target(self, 0)) {
                                for (std::size_t i = 0; i < self.grad.size(); ++i)
                                  p->grad[i] += self.grad[i];
                              }
                            });
}

template <typename T>
Tensor<T> slice(const Tensor<T>& x, std::size_t axis, std::size_t begin,
                std::size_t end) {
  const AxisSplit s = split_at(x.shape(), axis);
  if (begin >= end || end > s.len) {
    throw ShapeError("slice [" + std::to_string(begin) + ", " +
                     std::to_string(end) + ") invalid on axis " +
                     std::to_string(axis) + " of " + shape_to_string(x.shape()));
  }
  const std::size_t width = end - begin;
  Shape out_shape = x.shape();
  out_shape[axis] = width;
  auto xv = x.data();
  std::vector<T> out(s.outer * width * s.inner);
  const std::size_t chunk = width * s.inner;
  for (std::size_t o = 0; o < s.outer; ++o) {
    std::copy_n(xv.data() + (o * s.len + begin) * s.inner, chunk,
                out.data() + o * chunk);
  }
  return Tensor<T>::from_op(
      std::move(out_shape), std::move(out), {x},
      [s, begin, chunk](NodeT<T>& self) {
        if (auto* p = grad_target(self, 0)) {
          for (std::size_t o = 0; o < s.outer; ++o) {
            T* dst = p->grad.data() + (o * s.len + begin) * s.inner;
            const T* src = self.grad.data() + o * chunk;
            for (std::size_t i = 0; i < chunk; ++i) dst[i] += src[i];
          }
        }
      });
}

template <typename T>
Tensor<T> concat(const std::vector<Tensor<T>>& parts, std::size_t axis) {
  if (parts.empty()) {
    throw ShapeError("concat of zero tensors");
  }
  const Shape& ref = parts.front().shape();
  split_at(ref, axis);
  Shape out_shape = ref;
  out_shape[axis] = 0;
  std::vector<std::size_t> widths;
  for (const auto& p : parts) {
    const Shape& s = p.shape();
    bool ok = s.size() == ref.size();
    for (std::size_t d = 0; ok && d < s.size(); ++d) {
      ok = d == axis || s[d] == ref[d];
    }
    if (!ok) {
      throw ShapeError("concat along axis " + std::to_string(axis) +
                       " of mismatched " + both(ref, s));
    }
    widths.push_back(s[axis]);
    out_shape[axis] += s[axis];
  }
  const AxisSplit os = split_at(out_shape, axis);
  std::vector<T> out(shape_numel(out_shape));
  std::size_t offset = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    auto pv = parts[i].data();
    const std::size_t chunk = widths[i] * os.inner;
    for (std::size_t o = 0; o < os.outer; ++o) {
      std::copy_n(pv.data() + o * chunk, chunk,
                  out.data() + (o * os.len + offset) * os.inner);
    }
    offset += widths[i];
  }
  return Tensor<T>::from_op(
      std::move(out_shape), std::move(out), parts,
      [os, widths](NodeT<T>& self) {
        std::size_t offset = 0;
        for (std::size_t i = 0; i < widths.size(); ++i) {
          const std::size_t chunk = widths[i] * os.inner;
          if (auto* p = grad_target(self, i)) {
            for (std::size_t o = 0; o < os.outer; ++o) {
              const T* src = self.grad.data() + (o * os.len + offset) * os.inner;
              T* dst = p->grad.data() + o * chunk;
              for (std::size_t j = 0; j < chunk; ++j) dst[j] += src[j];
            }
          }
          offset += widths[i];
        }
      });
}

template <typename T>
Tensor<T> softmax(const Tensor<T>& x, std::size_t axis) {
  const AxisSplit s = split_at(x.shape(), axis);
  auto xv = x.data();
  check_finite(xv, "softmax");
  std::vector<T> out(xv.size());
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t in = 0; in < s.inner; ++in) {
      const std::size_t base = o * s.len * s.inner + in;
      T mx = xv[base];
      for (std::size_t j = 1; j < s.len; ++j) mx = std::max(mx, xv[base + j * s.inner]);
      T total = 0;
      for (std::size_t j = 0; j < s.len; ++j) {
        const T e = std::exp(xv[base + j * s.inner] - mx);
        out[base + j * s.inner] = e;
        total += e;
      }
      const T inv = T(1) / total;
      for (std::size_t j = 0; j < s.len; ++j) out[base + j * s.inner] *= inv;
    }
  }
  return Tensor<T>::from_op(
      x.shape(), std::move(out), {x}, [s](NodeT<T>& self) {
        auto* p = grad_target(self, 0);
        if (!p) return;
        const auto& y = self.data;
        const auto& g = self.grad;
        for (std::size_t o = 0; o < s.outer; ++o) {
          for (std::size_t in = 0; in < s.inner; ++in) {
            const std::size_t base = o * s.len * s.inner + in;
            T dot = 0;
            for (std::size_t j = 0; j < s.len; ++j) {
              const std::size_t at = base + j * s.inner;
              dot += g[at] * y[at];
            }
            for (std::size_t j = 0; j < s.len; ++j) {
              const std::size_t at = base + j * s.inner;
              p->grad[at] += y[at] * (g[at] - dot);
            }
          }
        }
      });
}

template <typename T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gain,
                     const Tensor<T>& bias, double eps) {
  if (x.rank() < 1) {
    throw ShapeError("layer_norm needs rank >= 1");
  }
  const std::size_t d = x.dim(x.rank() - 1);
  if (gain.shape() != Shape{d} || bias.shape() != Shape{d}) {
    throw ShapeError("layer_norm gain/bias must be [" + std::to_string(d) +
                     "], got " + both(gain.shape(), bias.shape()));
  }
  const std::size_t rows = x.numel() / d;
  auto xv = x.data();
  auto gv = gain.data();
  auto bv = bias.data();
  std::vector<T> xhat(xv.size());
  std::vector<T> rstd(rows);
  std::vector<T> out(xv.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const T* row = xv.data() + r * d;
    double mu = 0.0;
    for (std::size_t j = 0; j < d; ++j) mu += row[j];
    mu /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double c = row[j] - mu;
      var += c * c;
    }
    var /= static_cast<double>(d);
    const double inv = 1.0 / std::sqrt(var + eps);
    rstd[r] = static_cast<T>(inv);
    for (std::size_t j = 0; j < d; ++j) {
      const T h = static_cast<T>((row[j] - mu) * inv);
      xhat[r * d + j] = h;
      out[r * d + j] = h * gv[j] + bv[j];
    }
  }
  return Tensor<T>::from_op(
      x.shape(), std::move(out), {x, gain, bias},
      [d, rows, xhat = std::move(xhat), rstd = std::move(rstd)](NodeT<T>& self) {
        auto* px = grad_target(self, 0);
        auto* pg = grad_target(self, 1);
        auto* pb = grad_target(self, 2);
        const auto& gv = self.parents[1]->data;
        std::vector<T> gh(d);
        for (std::size_t r = 0; r < rows; ++r) {
          const T* dy = self.grad.data() + r * d;
          const T* h = xhat.data() + r * d;
          if (pg) for (std::size_t j = 0; j < d; ++j) pg->grad[j] += dy[j] * h[j];
          if (pb) for (std::size_t j = 0; j < d; ++j) pb->grad[j] += dy[j];
          if (!px) continue;
          T mean_g = 0;
          T mean_gh = 0;
          for (std::size_t j = 0; j < d; ++j) {
            gh[j] = dy[j] * gv[j];
            mean_g += gh[j];
            mean_gh += gh[j] * h[j];
          }
          mean_g /= static_cast<T>(d);
          mean_gh /= static_cast<T>(d);
          T* dx = px->grad.data() + r * d;
          for (std::size_t j = 0; j < d; ++j) {
            dx[j] += rstd[r] * (gh[j] - mean_g - h[j] * mean_gh);
          }
        }
      });
}

template <typename T>
Tensor<T> gelu(const Tensor<T>& x) {
  auto xv = x.data();
  std::vector<T> out(xv.size());
  const T inv_sqrt2 = static_cast<T>(1.0 / std::numbers::sqrt2);
  for (std::size_t i = 0; i < xv.size(); ++i) {
    out[i] = xv[i] * T(0.5) * (T(1) + std::erf(xv[i] * inv_sqrt2));
  }
  return Tensor<T>::from_op(
      x.shape(), std::move(out), {x}, [inv_sqrt2](NodeT<T>& self) {
        auto* p = grad_target(self, 0);
        if (!p) return;
        const auto& xv = p->data;
        const T inv_sqrt_2pi = static_cast<T>(0.5 * std::numbers::inv_sqrtpi *
                                              std::numbers::sqrt2);
        for (std::size_t i = 0; i < xv.size(); ++i) {
          const T v = xv[i];
          const T cdf = T(0.5) * (T(1) + std::erf(v * inv_sqrt2));
          const T pdf = inv_sqrt_2pi * std::exp(T(-0.5) * v * v);
          p->grad[i] += self.grad[i] * (cdf + v * pdf);
        }
      });
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x) {
  auto xv = x.data();
  std::vector<T> out(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) {
    out[i] = T(1) / (T(1) + std::exp(-xv[i]));
  }
  return Tensor<T>::from_op(x.shape(), std::move(out), {x},
                            [](NodeT<T>& self) {
                              if (auto* p = grad_target(self, 0)) {
                                for (std::size_t i = 0; i < self.grad.size(); ++i) {
                                  const T y = self.data[i];
                                  p->grad[i] += self.grad[i] * y * (T(1) - y);
                                }
                              }
                            });
}

template <typename T>
Tensor<T> dropout(const Tensor<T>& x, double p, Rng& rng, bool training) {
  if (p < 0.0 || p >= 1.0) {
    throw ContractError("dropout probability must lie in [0, 1)");
  }
  if (!training || p == 0.0) {
    return x;
  }
  const T keep_scale = static_cast<T>(1.0 / (1.0 - p));
  std::vector<T> keep(x.numel());
  for (auto& k : keep) k = rng.uniform() < p ? T(0) : keep_scale;
  return mul(x, Tensor<T>(x.shape(), std::move(keep)));
}

template <typename T>
Tensor<T> sum(const Tensor<T>& x) {
  double total = 0.0;
  for (T v : x.data()) total += v;
  return Tensor<T>::from_op(Shape{}, {static_cast<T>(total)}, {x},
                            [](NodeT<T>& self) {
                              if (auto* p = grad_target(self, 0)) {
                                const T g = self.grad[0];
                                for (auto& v : p->grad) v += g;
                              }
                            });
}

template <typename T>
Tensor<T> mean(const Tensor<T>& x) {
  return scale(sum(x), static_cast<T>(1.0 / static_cast<double>(x.numel())));
}

template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& weight,
                 const Tensor<T>& bias) {
  return add(matmul(x, weight), bias);
}

template <typename T>
Tensor<T> mse_loss(const Tensor<T>& pred, const Tensor<T>& target) {
  if (pred.shape() != target.shape()) {
    throw ShapeError("mse_loss shapes differ: " +
                     both(pred.shape(), target.shape()));
  }
  auto pv = pred.data();
  auto tv = target.data();
  double total = 0.0;
  for (std::size_t i = 0; i < pv.size(); ++i) {
    const double diff = static_cast<double>(pv[i]) - tv[i];
    total += diff * diff;
  }
  const double n = static_cast<double>(pv.size());
  return Tensor<T>::from_op(
      Shape{}, {static_cast<T>(total / n)}, {pred, target},
      [n](NodeT<T>& self) {
        const auto& pv = self.parents[0]->data;
        const auto& tv = self.parents[1]->data;
        const T g = static_cast<T>(2.0 / n) * self.grad[0];
        auto* pp = grad_target(self, 0);
        auto* pt = grad_target(self, 1);
        for (std::size_t i = 0; i < pv.size(); ++i) {
          const T d = g * (pv[i] - tv[i]);
          if (pp) pp->grad[i] += d;
          if (pt) pt->grad[i] -= d;
        }
      });
}

template <typename T>
Tensor<T> mse_loss(const Tensor<T>& pred, const Tensor<T>& target,
                   const Tensor<T>& mask) {
  if (pred.shape() != target.shape() || pred.shape() != mask.shape()) {
    throw ShapeError("masked mse_loss needs equal shapes, got " +
                     both(pred.shape(), target.shape()) + " and mask " +
                     shape_to_string(mask.shape()));
  }
  auto pv = pred.data();
  auto tv = target.data();
  auto mv = mask.data();
  double total = 0.0;
  double weight = 0.0;
  for (std::size_t i = 0; i < pv.size(); ++i) {
    if (mv[i] < T(0)) {
      throw ContractError("mse_loss mask weights must be nonnegative");
    }
    if (mv[i] == T(0)) continue;
    const double diff = static_cast<double>(pv[i]) - tv[i];
    total += mv[i] * diff * diff;
    weight += mv[i];
  }
  if (weight == 0.0) {
    throw ContractError("mse_loss mask selects no entries");
  }
  return Tensor<T>::from_op(
      Shape{}, {static_cast<T>(total / weight)}, {pred, target},
      [weight, mask](NodeT<T>& self) {
        const auto& pv = self.parents[0]->data;
        const auto& tv = self.parents[1]->data;
        auto mv = mask.data();
        const T g = static_cast<T>(2.0 / weight) * self.grad[0];
        auto* pp = grad_target(self, 0);
        auto* pt = grad_target(self, 1);
        for (std::size_t i = 0; i < pv.size(); ++i) {
          if (mv[i] == T(0)) continue;
          const T d = g * mv[i] * (pv[i] - tv[i]);
          if (pp) pp->grad[i] += d;
          if (pt) pt->grad[i] -= d;
        }
      });
}

template <typename T>
Tensor<T> l1_loss(const Tensor<T>& pred, const Tensor<T>& target) {
  if (pred.shape() != target.shape()) {
    throw ShapeError("l1_loss shapes differ: " +
                     both(pred.shape(), target.shape()));
  }
  auto pv = pred.data();
  auto tv = target.data();
  double total = 0.0;
  for (std::size_t i = 0; i < pv.size(); ++i) {
    total += std::abs(static_cast<double>(pv[i]) - tv[i]);
  }
  const double n = static_cast<double>(pv.size());
  return Tensor<T>::from_op(
      Shape{}, {static_cast<T>(total / n)}, {pred, target},
      [n](NodeT<T>& self) {
        const auto& pv = self.parents[0]->data;
        const auto& tv = self.parents[1]->data;
        const T g = static_cast<T>(1.0 / n) * self.grad[0];
        auto* pp = grad_target(self, 0);
        auto* pt = grad_target(self, 1);
        for (std::size_t i = 0; i < pv.size(); ++i) {
          const T diff = pv[i] - tv[i];
          const T sign = diff > T(0) ? T(1) : (diff < T(0) ? T(-1) : T(0));
          if (pp) pp->grad[i] += g * sign;
          if (pt) pt->grad[i] -= g * sign;
        }
      });
}

template <typename T>
Tensor<T> cross_entropy(const Tensor<T>& logits,
                        std::span<const std::int32_t> classes) {
  if (logits.rank() < 1) {
    throw ShapeError("cross_entropy needs rank >= 1 logits");
  }
  const std::size_t c = logits.dim(logits.rank() - 1);
  const std::size_t rows = logits.numel() / c;
  if (classes.size() != rows) {
    throw ShapeError("cross_entropy got " + std::to_string(classes.size()) +
                     " class indices for logits " +
                     shape_to_string(logits.shape()));
  }
  auto lv = logits.data();
  check_finite(lv, "cross_entropy");
  std::vector<T> probs(lv.size());
  double total = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const auto label = classes[r];
    if (label < 0 || static_cast<std::size_t>(label) >= c) {
      throw ContractError("cross_entropy class index " + std::to_string(label) +
                          " outside [0, " + std::to_string(c) + ")");
    }
    const T* row = lv.data() + r * c;
    const T mx = *std::max_element(row, row + c);
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      const double e = std::exp(static_cast<double>(row[j] - mx));
      probs[r * c + j] = static_cast<T>(e);
      z += e;
    }
    for (std::size_t j = 0; j < c; ++j) {
      probs[r * c + j] = static_cast<T>(probs[r * c + j] / z);
    }
    total += std::log(z) + mx - row[label];
  }
  std::vector<std::int32_t> labels(classes.begin(), classes.end());
  return Tensor<T>::from_op(
      Shape{}, {static_cast<T>(total / static_cast<double>(rows))}, {logits},
      [rows, c, probs = std::move(probs),
       labels = std::move(labels)](NodeT<T>& self) {
        auto* p = grad_target(self, 0);
        if (!p) return;
        const T g = self.grad[0] / static_cast<T>(rows);
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t j = 0; j < c; ++j) {
            p->grad[r * c + j] += g * probs[r * c + j];
          }
          p->grad[r * c + static_cast<std::size_t>(labels[r])] -= g;
        }
      });
}

#define STORSEISMIC_INSTANTIATE_OPS(T)                                          \
  template Tensor<T> matmul(const Tensor<T>&, const Tensor<T>&);               \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                  \
  template Tensor<T> sub(const Tensor<T>&, const Tensor<T>&);                  \
  template Tensor<T> mul(const Tensor<T>&, const Tensor<T>&);                  \
  template Tensor<T> scale(const Tensor<T>&, T);                               \
  template Tensor<T> transpose(const Tensor<T>&);                              \
  template Tensor<T> transpose(const Tensor<T>&, std::size_t, std::size_t);    \
  template Tensor<T> reshape(const Tensor<T>&, Shape);                         \
  template Tensor<T> slice(const Tensor<T>&, std::size_t, std::size_t,         \
                           std::size_t);                                       \
  template Tensor<T> concat(const std::vector<Tensor<T>>&, std::size_t);       \
  template Tensor<T> softmax(const Tensor<T>&, std::size_t);                   \
  template Tensor<T> layer_norm(const Tensor<T>&, const Tensor<T>&,            \
                                const Tensor<T>&, double);                     \
  template Tensor<T> gelu(const Tensor<T>&);                                   \
  template Tensor<T> sigmoid(const Tensor<T>&);                                \
  template Tensor<T> dropout(const Tensor<T>&, double, Rng&, bool);            \
  template Tensor<T> sum(const Tensor<T>&);                                    \
  template Tensor<T> mean(const Tensor<T>&);                                   \
  template Tensor<T> linear(const Tensor<T>&, const Tensor<T>&,                \
                            const Tensor<T>&);                                 \
  template Tensor<T> mse_loss(const Tensor<T>&, const Tensor<T>&);             \
  template Tensor<T> mse_loss(const Tensor<T>&, const Tensor<T>&,              \
                              const Tensor<T>&);                               \
  template Tensor<T> l1_loss(const Tensor<T>&, const Tensor<T>&);              \
  template Tensor<T> cross_entropy(const Tensor<T>&,                           \
                                   std::span<const std::int32_t>);

STORSEISMIC_INSTANTIATE_OPS(float)
STORSEISMIC_INSTANTIATE_OPS(double)

#undef STORSEISMIC_INSTANTIATE_OPS

}  // namespace storseismic
