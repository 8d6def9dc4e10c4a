#pragma once

#include <vector>

#include "storseismic/model/model.hpp"
#include "storseismic/pretrain/augment.hpp"
#include "storseismic/pretrain/masking.hpp"
#include "storseismic/pretrain/training.hpp"

namespace storseismic {

struct PretrainOptions {
  TrainSchedule schedule;
  MaskOptions mask;
  AugmentOptions augment;
  //! False keeps one mask per training gather for the whole run (drawn from
  //! Rng::stream(schedule.seed, i)) and skips augmentation.
  bool redraw_masks = true;
};

//! Masked-trace pre-training. Training masks (and augmentations) are drawn
//! afresh every epoch; the held-out set keeps one fixed mask per gather so
//! its loss is comparable across epochs. The loss is the mean squared error
//! over the samples of masked traces.
//!
//! Throws ContractError when `train` is empty or the model's head is not a
//! reconstruction head.
TrainingReport pretrain(Model& model, const std::vector<ShotGather>& train,
                        const std::vector<ShotGather>& test,
                        const PretrainOptions& options,
                        AdamOptimizer<float>& optimizer, TrainingState& state,
                        const TrainingHooks& hooks = {});

//! Fixed held-out masks: gather i uses Rng::stream(seed, i) with the mask
//! options only (no augmentation).
std::vector<PretrainSample> fixed_masks(const std::vector<ShotGather>& gathers,
                                        const MaskOptions& options,
                                        std::uint64_t seed);

//! The fixed masks pretrain() scores the held-out set with.
std::vector<PretrainSample> held_out_masks(const std::vector<ShotGather>& test,
                                           const PretrainOptions& options);

//! Masked-trace MSE of the model over fixed samples, batched, no gradients.
double evaluate_masked(const Model& model,
                       const std::vector<PretrainSample>& samples,
                       std::size_t batch_size = 32);

//! The same loss for an all-zero prediction: mean of clean^2 on masked traces.
double zero_prediction_baseline(const std::vector<PretrainSample>& samples);

}  // namespace storseismic
