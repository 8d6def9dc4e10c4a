#include "storseismic/pretrain/training.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "storseismic/errors.hpp"

namespace storseismic {

TrainingReport run_training(Model& model, const TrainingTask& task,
                            const TrainSchedule& schedule,
                            AdamOptimizer<float>& optimizer,
                            TrainingState& state, const TrainingHooks& hooks) {
  if (task.train_size == 0) {
    throw ContractError("training set is empty");
  }
  if (schedule.batch_size == 0) {
    throw ContractError("batch size must be positive");
  }
  const auto wall_start = std::chrono::steady_clock::now();
  optimizer.set_learning_rate(schedule.learning_rate);
  optimizer.set_rectify(schedule.rectify);
  auto params = model.parameters();

  TrainingReport report;
  std::vector<std::size_t> order(task.train_size);
  for (std::size_t epoch = state.next_epoch; epoch < schedule.max_epochs; ++epoch) {
    const auto epoch_start = std::chrono::steady_clock::now();
    Rng rng = Rng::stream(schedule.seed, epoch);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));

    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += schedule.batch_size) {
      const std::size_t end = std::min(order.size(), begin + schedule.batch_size);
      const std::span<const std::size_t> batch(order.data() + begin, end - begin);
      Tensor<float> loss = task.batch_loss(model, batch, rng);
      const double value = loss.item();
      if (!std::isfinite(value)) {
        throw NumericError("non-finite loss at step " +
                           std::to_string(optimizer.step_count()) + " (epoch " +
                           std::to_string(epoch) + ")");
      }
      // With every parameter frozen nothing is tracked and nothing moves.
      if (loss.requires_grad()) {
        loss.backward();
        optimizer.step(params);
      }
      loss_sum += value * static_cast<double>(batch.size());
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(order.size());
    stats.test_loss = task.test_loss ? task.test_loss(model) : stats.train_loss;
    if (!std::isfinite(stats.test_loss)) {
      throw NumericError("non-finite test loss after step " +
                         std::to_string(optimizer.step_count()));
    }
    stats.seconds = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - epoch_start)
                        .count();

    const bool improved = stats.test_loss < state.best_test_loss;
    if (improved) {
      state.best_test_loss = stats.test_loss;
      state.best_epoch = epoch;
      state.epochs_since_best = 0;
      state.best_values = snapshot_parameters(model);
    } else {
      ++state.epochs_since_best;
    }
    state.history.push_back(stats);
    state.next_epoch = epoch + 1;
    report.epochs.push_back(stats);
    if (hooks.on_epoch) {
      hooks.on_epoch(stats, state, optimizer, improved);
    }
    if (schedule.patience > 0 && state.epochs_since_best >= schedule.patience) {
      report.early_stopped = true;
      break;
    }
  }

  if (schedule.restore_best && !state.best_values.empty()) {
    load_parameters(model, state.best_values);
  }
  report.epochs_run = state.history.size();
  report.best_epoch = state.best_epoch;
  report.best_test_loss = state.best_test_loss;
  report.steps = optimizer.step_count();
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start)
          .count();
  return report;
}

Tensor<float> stack_gathers(std::span<const ShotGather* const> gathers) {
  if (gathers.empty()) {
    throw ContractError("cannot stack an empty batch");
  }
  const std::size_t nx = gathers[0]->traces();
  const std::size_t nt = gathers[0]->samples();
  std::vector<float> values;
  values.reserve(gathers.size() * nx * nt);
  for (const ShotGather* g : gathers) {
    if (g->traces() != nx || g->samples() != nt) {
      throw ShapeError("batch gathers differ in shape");
    }
    values.insert(values.end(), g->amplitudes().begin(), g->amplitudes().end());
  }
  return Tensor<float>({gathers.size(), nx, nt}, std::move(values));
}

Tensor<float> stack_gathers(std::span<const ShotGather> gathers) {
  std::vector<const ShotGather*> ptrs;
  ptrs.reserve(gathers.size());
  for (const auto& g : gathers) ptrs.push_back(&g);
  return stack_gathers(std::span<const ShotGather* const>(ptrs));
}

std::vector<std::vector<float>> snapshot_parameters(const Model& model) {
  std::vector<std::vector<float>> out;
  for (const auto* p : model.parameters()) {
    auto d = p->value.data();
    out.emplace_back(d.begin(), d.end());
  }
  return out;
}

void load_parameters(Model& model, const std::vector<std::vector<float>>& values) {
  auto params = model.parameters();
  if (params.size() != values.size()) {
    throw ContractError("parameter snapshot does not match the model");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto dst = params[i]->value.mutable_data();
    if (dst.size() != values[i].size()) {
      throw ShapeError("parameter snapshot size mismatch for " + params[i]->name);
    }
    std::copy(values[i].begin(), values[i].end(), dst.begin());
  }
}

}  // namespace storseismic
