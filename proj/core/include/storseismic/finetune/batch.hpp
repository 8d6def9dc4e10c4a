#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "storseismic/finetune/finetune.hpp"

namespace storseismic::detail {

//! One assembled fine-tuning batch. `target` holds clean gathers [B, X, T]
//! or normalized profiles [B, T]; `classes` holds first-break picks [B * X].
struct TaskBatch {
  Tensor<float> input;
  Tensor<float> target;
  std::vector<std::int32_t> classes;
};

TaskBatch make_task_batch(std::span<const LabeledSample* const> samples,
                          HeadKind kind, const VelocityScale& scale);

Tensor<float> batch_task_loss(const Tensor<float>& pred, const TaskBatch& batch,
                              HeadKind kind);

}  // namespace storseismic::detail
