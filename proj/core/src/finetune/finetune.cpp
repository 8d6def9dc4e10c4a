#include "storseismic/finetune/finetune.hpp"

#include <string>

#include "storseismic/errors.hpp"
#include "storseismic/numerics/ops.hpp"
#include "storseismic/finetune/batch.hpp"

namespace storseismic {

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::kMse: return "mse";
    case LossKind::kL1: return "l1";
    case LossKind::kCrossEntropy: return "cross_entropy";
  }
  return "unknown";
}

LossKind loss_for(HeadKind kind) {
  switch (kind) {
    case HeadKind::kDenoise: return LossKind::kMse;
    case HeadKind::kVelocity: return LossKind::kL1;
    case HeadKind::kFirstBreak: return LossKind::kCrossEntropy;
    case HeadKind::kVrms: return LossKind::kL1;
    case HeadKind::kReconstruction: break;
  }
  throw ContractError("reconstruction is not a fine-tuning task");
}

TaskSpec TaskSpec::defaults(HeadKind kind) {
  TaskSpec t;
  t.kind = kind;
  loss_for(kind);
  t.head_init = kind == HeadKind::kDenoise ? HeadInit::kZeros : HeadInit::kRandom;
  return t;
}

HeadKind label_task(const Label& label) {
  switch (label.index()) {
    case 0: return HeadKind::kDenoise;
    case 1: return HeadKind::kVelocity;
    case 2: return HeadKind::kFirstBreak;
    default: return HeadKind::kVrms;
  }
}

std::vector<LabeledSample> labeled_samples(const SeismicDataset& dataset,
                                           HeadKind kind) {
  const LabelKind needed = [&] {
    switch (kind) {
      case HeadKind::kDenoise: return LabelKind::kClean;
      case HeadKind::kVelocity: return LabelKind::kVelocity;
      case HeadKind::kFirstBreak: return LabelKind::kFirstBreak;
      case HeadKind::kVrms: return LabelKind::kVrms;
      case HeadKind::kReconstruction: break;
    }
    throw ContractError("reconstruction is not a fine-tuning task");
  }();
  if (!dataset.has(needed)) {
    throw ContractError("dataset has no " + to_string(kind) + " labels");
  }
  std::vector<LabeledSample> out;
  out.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    LabeledSample s{dataset.inputs[i], ShotGather{}};
    switch (kind) {
      case HeadKind::kDenoise: s.label = dataset.clean[i]; break;
      case HeadKind::kVelocity: s.label = VelocityProfile{dataset.velocity[i]}; break;
      case HeadKind::kFirstBreak: s.label = FirstBreakPicks{dataset.first_break[i]}; break;
      default: s.label = VrmsProfile{dataset.vrms[i]}; break;
    }
    out.push_back(std::move(s));
  }
  return out;
}

void prepare_for_task(Model& model, const TaskSpec& task, Rng& rng) {
  loss_for(task.kind);
  model.replace_head(make_head<float>(task.kind, model.config(), task.head_init, rng));
  model.freeze_layers(task.freeze_k);
}

namespace detail {

TaskBatch make_task_batch(std::span<const LabeledSample* const> samples,
                          HeadKind kind, const VelocityScale& scale) {
  TaskBatch b;
  std::vector<const ShotGather*> inputs;
  inputs.reserve(samples.size());
  for (const auto* s : samples) inputs.push_back(&s->input);
  b.input = stack_gathers(std::span<const ShotGather* const>(inputs));
  const std::size_t nx = b.input.dim(1);
  const std::size_t nt = b.input.dim(2);

  for (const auto* s : samples) {
    if (label_task(s->label) != kind) {
      throw ContractError("label type does not match task " + to_string(kind));
    }
  }
  switch (kind) {
    case HeadKind::kDenoise: {
      std::vector<const ShotGather*> clean;
      for (const auto* s : samples) {
        const auto& g = std::get<ShotGather>(s->label);
        if (g.traces() != nx || g.samples() != nt) {
          throw ShapeError("clean label shape differs from its input");
        }
        clean.push_back(&g);
      }
      b.target = stack_gathers(std::span<const ShotGather* const>(clean));
      break;
    }
    case HeadKind::kVelocity:
    case HeadKind::kVrms: {
      std::vector<float> values;
      values.reserve(samples.size() * nt);
      for (const auto* s : samples) {
        const auto& mps = kind == HeadKind::kVelocity
                              ? std::get<VelocityProfile>(s->label).mps
                              : std::get<VrmsProfile>(s->label).mps;
        if (mps.size() != nt) {
          throw ShapeError("velocity label length differs from T");
        }
        for (float v : mps) {
          if (!(v > 0.0f)) throw ContractError("velocity labels must be positive");
          values.push_back(static_cast<float>(scale.normalize(v)));
        }
      }
      b.target = Tensor<float>({samples.size(), nt}, std::move(values));
      break;
    }
    case HeadKind::kFirstBreak: {
      for (const auto* s : samples) {
        const auto& picks = std::get<FirstBreakPicks>(s->label).index;
        if (picks.size() != nx) {
          throw ShapeError("first-break label needs one pick per trace");
        }
        for (auto p : picks) {
          if (p >= nt) throw ContractError("first-break pick outside [0, T)");
          b.classes.push_back(static_cast<std::int32_t>(p));
        }
      }
      break;
    }
    case HeadKind::kReconstruction:
      throw ContractError("reconstruction is not a fine-tuning task");
  }
  return b;
}

Tensor<float> batch_task_loss(const Tensor<float>& pred, const TaskBatch& b,
                              HeadKind kind) {
  switch (loss_for(kind)) {
    case LossKind::kMse: return mse_loss(pred, b.target);
    case LossKind::kL1: return l1_loss(pred, b.target);
    case LossKind::kCrossEntropy: return cross_entropy(pred, b.classes);
  }
  throw ContractError("unhandled loss");
}

}  // namespace detail

double task_loss(const Model& model, HeadKind kind,
                 const std::vector<LabeledSample>& samples,
                 const VelocityScale& scale, std::size_t batch_size) {
  if (samples.empty()) {
    throw ContractError("evaluation set is empty");
  }
  NoGradGuard guard;
  double acc = 0.0;
  for (std::size_t begin = 0; begin < samples.size(); begin += batch_size) {
    const std::size_t end = std::min(samples.size(), begin + batch_size);
    std::vector<const LabeledSample*> ptrs;
    for (std::size_t i = begin; i < end; ++i) ptrs.push_back(&samples[i]);
    const auto b = detail::make_task_batch(ptrs, kind, scale);
    const auto pred = model.forward(b.input).output;
    acc += static_cast<double>(detail::batch_task_loss(pred, b, kind).item()) *
           static_cast<double>(ptrs.size());
  }
  return acc / static_cast<double>(samples.size());
}

TrainingReport finetune(Model& model, const TaskSpec& task,
                        const std::vector<LabeledSample>& train,
                        const std::vector<LabeledSample>& test, Rng& rng,
                        const FinetuneOptions& options,
                        AdamOptimizer<float>& optimizer, TrainingState& state,
                        const TrainingHooks& hooks) {
  if (train.empty()) {
    throw ContractError("fine-tuning set is empty");
  }
  loss_for(task.kind);
  for (const auto* set : {&train, &test}) {
    for (const auto& s : *set) {
      if (label_task(s.label) != task.kind) {
        throw ContractError("label type does not match task " +
                            to_string(task.kind));
      }
    }
  }
  if (options.prepare_model) {
    prepare_for_task(model, task, rng);
  } else if (!model.has_head() || model.head().kind != task.kind) {
    throw ContractError("model head does not match task " + to_string(task.kind));
  }

  TrainingTask t;
  t.train_size = train.size();
  t.batch_loss = [&](const Model& m, std::span<const std::size_t> idx, Rng& epoch_rng) {
    std::vector<const LabeledSample*> ptrs;
    for (std::size_t i : idx) ptrs.push_back(&train[i]);
    const auto b = detail::make_task_batch(ptrs, task.kind, options.scale);
    ForwardOptions fo;
    fo.training = true;
    fo.rng = &epoch_rng;
    return detail::batch_task_loss(m.forward(b.input, fo).output, b, task.kind);
  };
  if (!test.empty()) {
    t.test_loss = [&](const Model& m) {
      return task_loss(m, task.kind, test, options.scale, task.schedule.batch_size);
    };
  }
  return run_training(model, t, task.schedule, optimizer, state, hooks);
}

}  // namespace storseismic
