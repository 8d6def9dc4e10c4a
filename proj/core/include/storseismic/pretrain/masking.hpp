#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "storseismic/numerics/random.hpp"
#include "storseismic/seisgen/gather.hpp"

namespace storseismic {

enum class CorruptionKind : std::uint8_t {
  kNoiseToken = 0,  // trace replaced by i.i.d. N(0, noise_std^2)
  kSwapTrace = 1,   // trace replaced by another trace of the same gather
  kKeepSame = 2,    // left as is, still part of the loss set
};

struct Corruption {
  CorruptionKind kind = CorruptionKind::kNoiseToken;
  //! Source trace for kSwapTrace, never equal to the target.
  std::size_t source = 0;
};

struct MaskSpec {
  std::vector<std::size_t> masked_idx;  // sorted
  std::vector<Corruption> corruption;   // parallel to masked_idx
  double noise_std = 1.0;
};

struct MaskOptions {
  double ratio = 0.15;
  double noise_std = 1.0;
  //! Shares of masked traces per corruption kind; the rest is kept as is.
  double noise_share = 0.8;
  double swap_share = 0.1;
};

struct PretrainSample {
  ShotGather clean;
  ShotGather corrupted;
  MaskSpec mask;
};

//! floor(ratio * traces), so 15% of 20 is 3 and 15% of 324 is 48.
std::size_t masked_count(std::size_t traces, double ratio);

//! Splits `n` masked traces into noise/swap/keep counts: floor of each share,
//! with the leftover traces assigned by systematic sampling on the fractional
//! parts so that expected counts match the shares exactly.
std::vector<CorruptionKind> draw_corruptions(std::size_t n,
                                             const MaskOptions& options,
                                             Rng& rng);

//! Picks masked traces uniformly without replacement and corrupts them. A
//! swap drawn on a single-trace gather becomes a noise token. Throws
//! ContractError unless 0 < ratio < 1 and at least one trace is masked.
PretrainSample apply_mask(const ShotGather& d, const MaskOptions& options,
                          Rng& rng);

//! Per-sample weights [X * T]: 1 on masked traces, 0 elsewhere.
std::vector<float> mask_weights(const MaskSpec& mask, std::size_t traces,
                                std::size_t samples);

//! Mean squared error over the samples of masked traces only. Throws
//! ContractError for an empty mask, ShapeError for mismatched gathers.
double masked_loss(const ShotGather& pred, const ShotGather& clean,
                   const MaskSpec& mask);

}  // namespace storseismic
