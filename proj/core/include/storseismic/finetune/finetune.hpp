#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "storseismic/io/dataset.hpp"
#include "storseismic/model/model.hpp"
#include "storseismic/pretrain/training.hpp"

namespace storseismic {

enum class LossKind : std::uint8_t { kMse, kL1, kCrossEntropy };

std::string to_string(LossKind kind);

//! Fixed task-to-loss binding: denoise MSE, velocity and vrms L1, first
//! break cross-entropy. Reconstruction has no fine-tuning loss.
LossKind loss_for(HeadKind kind);

struct TaskSpec {
  HeadKind kind = HeadKind::kDenoise;
  HeadInit head_init = HeadInit::kZeros;
  std::size_t freeze_k = 0;
  TrainSchedule schedule;

  LossKind loss() const { return loss_for(kind); }
  //! Zero head for denoising, random heads for the other tasks.
  static TaskSpec defaults(HeadKind kind);
};

struct VelocityProfile {
  std::vector<float> mps;  // interval velocity per time sample
};
struct VrmsProfile {
  std::vector<float> mps;
};
struct FirstBreakPicks {
  std::vector<std::uint16_t> index;  // per trace, in [0, T)
};

using Label = std::variant<ShotGather, VelocityProfile, FirstBreakPicks, VrmsProfile>;

struct LabeledSample {
  ShotGather input;
  Label label;
};

//! Affine map of velocities to (0, 1): (v - min) / (max - min).
struct VelocityScale {
  double min = 1500.0;
  double max = 4500.0;

  double normalize(double v) const { return (v - min) / (max - min); }
  double denormalize(double u) const { return min + u * (max - min); }
};

//! The head kind a label type belongs to.
HeadKind label_task(const Label& label);

//! Pairs dataset inputs with one label block. Throws ContractError when the
//! dataset lacks that block.
std::vector<LabeledSample> labeled_samples(const SeismicDataset& dataset,
                                           HeadKind kind);

struct FinetuneOptions {
  //! Swap in a fresh head of task.kind and apply freeze_layers(freeze_k)
  //! before training. Off means the caller prepared the model.
  bool prepare_model = true;
  VelocityScale scale;
};

//! Attaches the task head (fresh, per task.head_init) and freezes the first
//! task.freeze_k encoder layers.
void prepare_for_task(Model& model, const TaskSpec& task, Rng& rng);

//! Supervised fine-tuning. Throws ContractError when `train` is empty or a
//! label does not match task.kind.
TrainingReport finetune(Model& model, const TaskSpec& task,
                        const std::vector<LabeledSample>& train,
                        const std::vector<LabeledSample>& test, Rng& rng,
                        const FinetuneOptions& options,
                        AdamOptimizer<float>& optimizer, TrainingState& state,
                        const TrainingHooks& hooks = {});

//! Task loss over a dataset without gradients (the quantity training
//! minimizes, on normalized labels).
double task_loss(const Model& model, HeadKind kind,
                 const std::vector<LabeledSample>& samples,
                 const VelocityScale& scale, std::size_t batch_size = 32);

}  // namespace storseismic
