#include "storseismic/pretrain/masking.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "storseismic/errors.hpp"

namespace storseismic {

std::size_t masked_count(std::size_t traces, double ratio) {
  // The epsilon absorbs representation error such as 0.15 * 20 = 2.9999...
  return static_cast<std::size_t>(
      std::floor(ratio * static_cast<double>(traces) + 1e-9));
}

std::vector<CorruptionKind> draw_corruptions(std::size_t n,
                                             const MaskOptions& options,
                                             Rng& rng) {
  const double keep_share = 1.0 - options.noise_share - options.swap_share;
  if (options.noise_share < 0.0 || options.swap_share < 0.0 ||
      keep_share < -1e-12) {
    throw ContractError("corruption shares must be nonnegative and sum to <= 1");
  }
  const std::array<double, 3> shares = {options.noise_share, options.swap_share,
                                        std::max(0.0, keep_share)};
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> frac{};
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    const double expected = shares[k] * static_cast<double>(n);
    counts[k] = static_cast<std::size_t>(std::floor(expected + 1e-9));
    frac[k] = std::max(0.0, expected - static_cast<double>(counts[k]));
    assigned += counts[k];
  }
  const std::size_t leftover = n > assigned ? n - assigned : 0;
  if (leftover > 0) {
    // Systematic sampling: points u, u + 1, ... over the cumulative
    // fractional parts. Category k gets each point in its interval.
    const double total = frac[0] + frac[1] + frac[2];
    const double stretch = static_cast<double>(leftover) / total;
    const double u = rng.uniform();
    double lo = 0.0;
    std::size_t placed = 0;
    for (std::size_t k = 0; k < 3; ++k) {
      const double hi = k == 2 ? static_cast<double>(leftover)
                               : lo + frac[k] * stretch;
      // Points p = u + j with lo <= p < hi.
      while (placed < leftover && u + static_cast<double>(placed) < hi) {
        ++counts[k];
        ++placed;
      }
      lo = hi;
    }
  }
  std::vector<CorruptionKind> kinds;
  kinds.reserve(n);
  kinds.insert(kinds.end(), counts[0], CorruptionKind::kNoiseToken);
  kinds.insert(kinds.end(), counts[1], CorruptionKind::kSwapTrace);
  kinds.insert(kinds.end(), counts[2], CorruptionKind::kKeepSame);
  rng.shuffle(std::span<CorruptionKind>(kinds));
  return kinds;
}

PretrainSample apply_mask(const ShotGather& d, const MaskOptions& options,
                          Rng& rng) {
  if (!(options.ratio > 0.0 && options.ratio < 1.0)) {
    throw ContractError("mask ratio must lie in (0, 1)");
  }
  const std::size_t nx = d.traces();
  const std::size_t n = masked_count(nx, options.ratio);
  if (n == 0) {
    throw ContractError("mask ratio selects no trace of a " +
                        std::to_string(nx) + "-trace gather");
  }

  std::vector<std::size_t> order(nx);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < n; ++i) {
    std::swap(order[i], order[i + rng.uniform_index(nx - i)]);
  }
  std::vector<std::size_t> picked(order.begin(),
                                  order.begin() + static_cast<std::ptrdiff_t>(n));
  std::sort(picked.begin(), picked.end());
  const auto kinds = draw_corruptions(n, options, rng);

  PretrainSample sample{d, d, MaskSpec{}};
  sample.mask.masked_idx = picked;
  sample.mask.noise_std = options.noise_std;
  sample.mask.corruption.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t target = picked[j];
    Corruption c{kinds[j], 0};
    if (c.kind == CorruptionKind::kSwapTrace && nx == 1) {
      c.kind = CorruptionKind::kNoiseToken;
    }
    auto dst = sample.corrupted.trace(target);
    if (c.kind == CorruptionKind::kNoiseToken) {
      for (auto& a : dst) a = static_cast<float>(rng.normal(0.0, options.noise_std));
    } else if (c.kind == CorruptionKind::kSwapTrace) {
      c.source = rng.uniform_index(nx - 1);
      if (c.source >= target) ++c.source;
      const auto src = d.trace(c.source);
      std::copy(src.begin(), src.end(), dst.begin());
    }
    sample.mask.corruption[j] = c;
  }
  return sample;
}

std::vector<float> mask_weights(const MaskSpec& mask, std::size_t traces,
                                std::size_t samples) {
  std::vector<float> w(traces * samples, 0.0f);
  for (std::size_t i : mask.masked_idx) {
    if (i >= traces) {
      throw ShapeError("masked trace index " + std::to_string(i) +
                       " out of range");
    }
    std::fill_n(w.begin() + static_cast<std::ptrdiff_t>(i * samples), samples,
                1.0f);
  }
  return w;
}

double masked_loss(const ShotGather& pred, const ShotGather& clean,
                   const MaskSpec& mask) {
  if (pred.traces() != clean.traces() || pred.samples() != clean.samples()) {
    throw ShapeError("masked_loss needs gathers of equal shape");
  }
  if (mask.masked_idx.empty()) {
    throw ContractError("masked_loss needs at least one masked trace");
  }
  double acc = 0.0;
  for (std::size_t i : mask.masked_idx) {
    const auto p = pred.trace(i);
    const auto c = clean.trace(i);
    for (std::size_t t = 0; t < p.size(); ++t) {
      const double diff = static_cast<double>(p[t]) - c[t];
      acc += diff * diff;
    }
  }
  return acc / static_cast<double>(mask.masked_idx.size() * clean.samples());
}

}  // namespace storseismic
