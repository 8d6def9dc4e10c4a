#include "storseismic/pretrain/augment.hpp"

#include <algorithm>

#include "storseismic/errors.hpp"

namespace storseismic {

ShotGather time_shift(const ShotGather& d, std::ptrdiff_t shift) {
  ShotGather out = d;
  const auto n = static_cast<std::ptrdiff_t>(d.samples());
  for (std::size_t x = 0; x < d.traces(); ++x) {
    const auto src = d.trace(x);
    auto dst = out.trace(x);
    for (std::ptrdiff_t t = 0; t < n; ++t) {
      const std::ptrdiff_t from = t - shift;
      dst[static_cast<std::size_t>(t)] =
          from >= 0 && from < n ? src[static_cast<std::size_t>(from)] : 0.0f;
    }
  }
  return out;
}

ShotGather polarity_flip(const ShotGather& d) {
  ShotGather out = d;
  for (auto& a : out.amplitudes()) a = -a;
  return out;
}

ShotGather augment(const ShotGather& d, const AugmentOptions& options,
                   Rng& rng) {
  if (options.max_shift >= d.samples()) {
    throw ContractError("max_shift must be smaller than the trace length");
  }
  ShotGather out = d;
  if (options.max_shift > 0) {
    const auto m = static_cast<std::int64_t>(options.max_shift);
    out = time_shift(out, static_cast<std::ptrdiff_t>(rng.uniform_int(-m, m)));
  }
  if (options.flip_probability > 0.0 && rng.bernoulli(options.flip_probability)) {
    out = polarity_flip(out);
  }
  return out;
}

}  // namespace storseismic
