#include "storseismic/pretrain/pretrain.hpp"

#include "storseismic/errors.hpp"
#include "storseismic/numerics/ops.hpp"

namespace storseismic {
namespace {

struct MaskedBatch {
  Tensor<float> input;
  Tensor<float> target;
  Tensor<float> weights;
};

MaskedBatch assemble(std::span<const PretrainSample* const> samples) {
  const std::size_t nx = samples[0]->clean.traces();
  const std::size_t nt = samples[0]->clean.samples();
  std::vector<const ShotGather*> inputs;
  std::vector<const ShotGather*> targets;
  std::vector<float> w;
  w.reserve(samples.size() * nx * nt);
  for (const auto* s : samples) {
    inputs.push_back(&s->corrupted);
    targets.push_back(&s->clean);
    const auto m = mask_weights(s->mask, nx, nt);
    w.insert(w.end(), m.begin(), m.end());
  }
  return {stack_gathers(std::span<const ShotGather* const>(inputs)),
          stack_gathers(std::span<const ShotGather* const>(targets)),
          Tensor<float>({samples.size(), nx, nt}, std::move(w))};
}

}  // namespace

std::vector<PretrainSample> fixed_masks(const std::vector<ShotGather>& gathers,
                                        const MaskOptions& options,
                                        std::uint64_t seed) {
  std::vector<PretrainSample> out;
  out.reserve(gathers.size());
  for (std::size_t i = 0; i < gathers.size(); ++i) {
    Rng rng = Rng::stream(seed, i);
    out.push_back(apply_mask(gathers[i], options, rng));
  }
  return out;
}

std::vector<PretrainSample> held_out_masks(const std::vector<ShotGather>& test,
                                           const PretrainOptions& options) {
  // A stream family disjoint from the epoch streams.
  return fixed_masks(test, options.mask,
                     options.schedule.seed ^ 0x9e3779b97f4a7c15ULL);
}

double evaluate_masked(const Model& model,
                       const std::vector<PretrainSample>& samples,
                       std::size_t batch_size) {
  if (samples.empty()) {
    throw ContractError("evaluation set is empty");
  }
  NoGradGuard guard;
  double weighted = 0.0;
  double entries = 0.0;
  for (std::size_t begin = 0; begin < samples.size(); begin += batch_size) {
    const std::size_t end = std::min(samples.size(), begin + batch_size);
    std::vector<const PretrainSample*> ptrs;
    for (std::size_t i = begin; i < end; ++i) ptrs.push_back(&samples[i]);
    const MaskedBatch b = assemble(ptrs);
    const auto pred = model.forward(b.input).output;
    double count = 0.0;
    for (float v : b.weights.data()) count += v;
    weighted += static_cast<double>(mse_loss(pred, b.target, b.weights).item()) * count;
    entries += count;
  }
  return weighted / entries;
}

double zero_prediction_baseline(const std::vector<PretrainSample>& samples) {
  double acc = 0.0;
  double count = 0.0;
  for (const auto& s : samples) {
    for (std::size_t i : s.mask.masked_idx) {
      for (float a : s.clean.trace(i)) acc += static_cast<double>(a) * a;
    }
    count += static_cast<double>(s.mask.masked_idx.size() * s.clean.samples());
  }
  if (count == 0.0) {
    throw ContractError("no masked entries");
  }
  return acc / count;
}

TrainingReport pretrain(Model& model, const std::vector<ShotGather>& train,
                        const std::vector<ShotGather>& test,
                        const PretrainOptions& options,
                        AdamOptimizer<float>& optimizer, TrainingState& state,
                        const TrainingHooks& hooks) {
  if (train.empty()) {
    throw ContractError("pre-training set is empty");
  }
  if (!model.has_head() || model.head().kind != HeadKind::kReconstruction) {
    throw ContractError("pre-training needs a reconstruction head");
  }
  const std::vector<PretrainSample> held_out = held_out_masks(test, options);

  const std::vector<PretrainSample> fixed_train =
      options.redraw_masks
          ? std::vector<PretrainSample>{}
          : fixed_masks(train, options.mask, options.schedule.seed);

  TrainingTask task;
  task.train_size = train.size();
  task.batch_loss = [&](const Model& m, std::span<const std::size_t> idx,
                        Rng& rng) {
    std::vector<PretrainSample> samples;
    std::vector<const PretrainSample*> ptrs;
    if (options.redraw_masks) {
      samples.reserve(idx.size());
      for (std::size_t i : idx) {
        samples.push_back(apply_mask(augment(train[i], options.augment, rng),
                                     options.mask, rng));
      }
      for (const auto& s : samples) ptrs.push_back(&s);
    } else {
      for (std::size_t i : idx) ptrs.push_back(&fixed_train[i]);
    }
    const MaskedBatch b = assemble(ptrs);
    ForwardOptions fo;
    fo.training = true;
    fo.rng = &rng;
    return mse_loss(m.forward(b.input, fo).output, b.target, b.weights);
  };
  if (!held_out.empty()) {
    task.test_loss = [&](const Model& m) {
      return evaluate_masked(m, held_out, options.schedule.batch_size);
    };
  }
  return run_training(model, task, options.schedule, optimizer, state, hooks);
}

}  // namespace storseismic
