#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "storseismic/numerics/random.hpp"
#include "storseismic/numerics/tensor.hpp"

// Differentiable operations on Tensor<T>. Every op records itself on the tape
// when any input requires grad and a NoGradGuard is not active.
//
// Broadcasting rule for the binary elementwise ops: the shape of one operand
// must equal a trailing suffix of the other's (a bias [H] against [B, X, H],
// a scalar against anything). Nothing else broadcasts.

namespace storseismic {

//! a[..., m, k] x b[k, n] -> [..., m, n] (b shared across leading axes), or
//! a[..., m, k] x b[..., k, n] with identical leading axes (batched).
template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> scale(const Tensor<T>& x, T factor);

//! Swaps two axes (default: the last two).
template <typename T>
Tensor<T> transpose(const Tensor<T>& x);
template <typename T>
Tensor<T> transpose(const Tensor<T>& x, std::size_t axis0, std::size_t axis1);

template <typename T>
Tensor<T> reshape(const Tensor<T>& x, Shape shape);

//! Half-open range [begin, end) along `axis`.
template <typename T>
Tensor<T> slice(const Tensor<T>& x, std::size_t axis, std::size_t begin,
                std::size_t end);
template <typename T>
Tensor<T> concat(const std::vector<Tensor<T>>& parts, std::size_t axis);

//! Max-subtracted softmax along `axis`. Non-finite input raises NumericError.
template <typename T>
Tensor<T> softmax(const Tensor<T>& x, std::size_t axis);

//! Normalizes over the last axis, then applies gain and bias of that length.
template <typename T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gain,
                     const Tensor<T>& bias, double eps = 1e-12);

//! Exact x * Phi(x) with the Gaussian CDF from erf.
template <typename T>
Tensor<T> gelu(const Tensor<T>& x);
template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x);

//! Inverted dropout; identity when p == 0 or when not training.
template <typename T>
Tensor<T> dropout(const Tensor<T>& x, double p, Rng& rng, bool training);

template <typename T>
Tensor<T> sum(const Tensor<T>& x);
template <typename T>
Tensor<T> mean(const Tensor<T>& x);

//! x[..., in] * weight[in, out] + bias[out].
template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& weight,
                 const Tensor<T>& bias);

//! Mean squared error. With a mask (same shape as pred, nonnegative weights)
//! the result is sum(mask * diff^2) / sum(mask); an all-zero mask raises
//! ContractError.
template <typename T>
Tensor<T> mse_loss(const Tensor<T>& pred, const Tensor<T>& target);
template <typename T>
Tensor<T> mse_loss(const Tensor<T>& pred, const Tensor<T>& target,
                   const Tensor<T>& mask);

//! Mean absolute error; the subgradient at zero is zero.
template <typename T>
Tensor<T> l1_loss(const Tensor<T>& pred, const Tensor<T>& target);

//! Mean over rows of -log softmax(logits[row])[class]. logits is [..., C]
//! and `classes` holds one index per leading position.
template <typename T>
Tensor<T> cross_entropy(const Tensor<T>& logits,
                        std::span<const std::int32_t> classes);

}  // namespace storseismic
