#pragma once

#include <cstddef>

#include "storseismic/numerics/random.hpp"
#include "storseismic/seisgen/gather.hpp"

namespace storseismic {

//! Rolls every trace by the same `shift` samples (positive is later) and
//! zero-fills the exposed border.
ShotGather time_shift(const ShotGather& d, std::ptrdiff_t shift);

ShotGather polarity_flip(const ShotGather& d);

//! Random augmentation per gather. Re-drawing masks every epoch, the third
//! augmentation, happens in the pre-training loop itself.
struct AugmentOptions {
  //! Shift drawn uniformly from [-max_shift, max_shift]; 0 disables.
  std::size_t max_shift = 0;
  //! Probability of flipping polarity.
  double flip_probability = 0.0;
};

//! Throws ContractError when max_shift >= T.
ShotGather augment(const ShotGather& d, const AugmentOptions& options, Rng& rng);

}  // namespace storseismic
