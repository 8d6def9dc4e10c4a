#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "storseismic/model/model.hpp"
#include "storseismic/numerics/optimizer.hpp"
#include "storseismic/seisgen/gather.hpp"

namespace storseismic {

struct TrainSchedule {
  std::size_t batch_size = 16;
  double learning_rate = 5e-4;
  std::size_t max_epochs = 400;
  //! Stop after this many epochs without a better test loss; 0 disables.
  std::size_t patience = 20;
  bool rectify = true;
  std::uint64_t seed = 0;
  //! Put the best-test-loss weights back into the model at the end.
  bool restore_best = true;
};

struct EpochStats {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double test_loss = 0.0;
  double seconds = 0.0;
};

//! Loop bookkeeping, enough to resume at an epoch boundary.
struct TrainingState {
  std::size_t next_epoch = 0;
  double best_test_loss = std::numeric_limits<double>::infinity();
  std::size_t best_epoch = 0;
  std::size_t epochs_since_best = 0;
  std::vector<EpochStats> history;
  //! Parameter values at the best epoch, canonical order.
  std::vector<std::vector<float>> best_values;
};

struct TrainingReport {
  std::vector<EpochStats> epochs;
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;
  double best_test_loss = 0.0;
  double wall_seconds = 0.0;
  bool early_stopped = false;
  std::int64_t steps = 0;
};

//! Task plumbing for run_training. Batches are index lists into the
//! training set.
struct TrainingTask {
  std::size_t train_size = 0;
  //! Differentiable mean loss of one training batch. `rng` is the epoch's
  //! stream; draw per-sample randomness from it in batch order.
  std::function<Tensor<float>(const Model&, std::span<const std::size_t>, Rng&)>
      batch_loss;
  //! Held-out loss, evaluated without gradients. Unset means the epoch's
  //! training loss is used for model selection.
  std::function<double(const Model&)> test_loss;
};

struct TrainingHooks {
  //! Called after every epoch with the updated state; `improved` is true when
  //! the epoch set a new best test loss.
  std::function<void(const EpochStats&, const TrainingState&,
                     const AdamOptimizer<float>&, bool improved)>
      on_epoch;
};

//! Mini-batch training with shuffling from Rng::stream(seed, epoch), early
//! stopping on the test loss and best-weight restore. Starting from a
//! non-default `state` (and the optimizer restored to match) continues a run
//! exactly. Throws NumericError naming the step when a loss is not finite.
TrainingReport run_training(Model& model, const TrainingTask& task,
                            const TrainSchedule& schedule,
                            AdamOptimizer<float>& optimizer,
                            TrainingState& state,
                            const TrainingHooks& hooks = {});

//! Stacks gathers [B][X][T] into one tensor.
Tensor<float> stack_gathers(std::span<const ShotGather> gathers);
Tensor<float> stack_gathers(std::span<const ShotGather* const> gathers);

//! Copies parameter values in canonical order.
std::vector<std::vector<float>> snapshot_parameters(const Model& model);
void load_parameters(Model& model, const std::vector<std::vector<float>>& values);

}  // namespace storseismic
