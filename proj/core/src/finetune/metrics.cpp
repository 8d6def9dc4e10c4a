#include "storseismic/finetune/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "storseismic/errors.hpp"
#include "storseismic/finetune/batch.hpp"

namespace storseismic {
namespace {

// Runs the model over `samples` in batches and hands each batch's output and
// sample range to `visit`.
template <typename Visit>
void for_each_batch(const Model& model, const std::vector<LabeledSample>& samples,
                    std::size_t batch_size, Visit&& visit) {
  NoGradGuard guard;
  for (std::size_t begin = 0; begin < samples.size(); begin += batch_size) {
    const std::size_t end = std::min(samples.size(), begin + batch_size);
    std::vector<const ShotGather*> inputs;
    for (std::size_t i = begin; i < end; ++i) inputs.push_back(&samples[i].input);
    const auto out =
        model.forward(stack_gathers(std::span<const ShotGather* const>(inputs))).output;
    visit(out, begin, end);
  }
}

ProfileMetrics eval_profile(const Model& model,
                            const std::vector<LabeledSample>& samples,
                            const VelocityScale& scale, std::size_t batch_size,
                            HeadKind kind) {
  if (!model.has_head() || model.head().kind != kind) {
    throw ContractError("model head is not a " + to_string(kind) + " head");
  }
  double acc = 0.0;
  double count = 0.0;
  for_each_batch(model, samples, batch_size,
                 [&](const Tensor<float>& out, std::size_t begin, std::size_t end) {
    const std::size_t nt = out.dim(1);
    const auto pred = out.data();
    for (std::size_t i = begin; i < end; ++i) {
      const auto& mps = kind == HeadKind::kVelocity
                            ? std::get<VelocityProfile>(samples[i].label).mps
                            : std::get<VrmsProfile>(samples[i].label).mps;
      for (std::size_t t = 0; t < nt; ++t) {
        const double v = scale.denormalize(pred[(i - begin) * nt + t]);
        acc += std::abs(v - mps[t]);
      }
      count += static_cast<double>(nt);
    }
  });
  return {count > 0.0 ? acc / count : 0.0};
}

}  // namespace

DenoiseMetrics eval_denoise(const Model& model,
                            const std::vector<LabeledSample>& samples,
                            std::size_t batch_size) {
  if (!model.has_head() || is_profile_head(model.head().kind) ||
      model.head().kind == HeadKind::kFirstBreak) {
    throw ContractError("denoise evaluation needs a per-trace amplitude head");
  }
  double acc = 0.0;
  double count = 0.0;
  for_each_batch(model, samples, batch_size,
                 [&](const Tensor<float>& out, std::size_t begin, std::size_t end) {
    const auto pred = out.data();
    std::size_t offset = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const auto label = std::get<ShotGather>(samples[i].label).amplitudes();
      for (float c : label) {
        const double d = static_cast<double>(pred[offset++]) - c;
        acc += d * d;
      }
      count += static_cast<double>(label.size());
    }
  });
  return {count > 0.0 ? acc / count : 0.0};
}

ProfileMetrics eval_velocity(const Model& model,
                             const std::vector<LabeledSample>& samples,
                             const VelocityScale& scale, std::size_t batch_size) {
  return eval_profile(model, samples, scale, batch_size, HeadKind::kVelocity);
}

ProfileMetrics eval_vrms(const Model& model,
                         const std::vector<LabeledSample>& samples,
                         const VelocityScale& scale, std::size_t batch_size) {
  return eval_profile(model, samples, scale, batch_size, HeadKind::kVrms);
}

std::vector<Pick> picks_from_logits(std::span<const float> logits,
                                    std::size_t traces, std::size_t samples) {
  if (logits.size() != traces * samples) {
    throw ShapeError("logit count does not match traces x samples");
  }
  std::vector<Pick> out(traces);
  for (std::size_t x = 0; x < traces; ++x) {
    const auto row = logits.subspan(x * samples, samples);
    const auto best = static_cast<std::size_t>(
        std::max_element(row.begin(), row.end()) - row.begin());
    double z = 0.0;
    for (float v : row) z += std::exp(static_cast<double>(v) - row[best]);
    out[x] = {best, 1.0 / z};
  }
  return out;
}

FirstBreakMetrics score_firstbreak(std::span<const std::vector<float>> logits,
                                   const std::vector<LabeledSample>& samples,
                                   const FirstBreakEvalOptions& options) {
  if (logits.size() != samples.size()) {
    throw ShapeError("one logit block per sample expected");
  }
  FirstBreakMetrics m;
  double exact = 0.0;
  double hits = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& g = samples[i].input;
    const auto& labels = std::get<FirstBreakPicks>(samples[i].label).index;
    const auto picks = picks_from_logits(logits[i], g.traces(), g.samples());
    for (std::size_t x = 0; x < g.traces(); ++x) {
      if (options.max_offset && std::abs(g.offsets()[x]) > *options.max_offset) {
        continue;
      }
      const auto label = static_cast<std::ptrdiff_t>(labels[x]);
      const auto pick = static_cast<std::ptrdiff_t>(picks[x].index);
      if (pick == label && picks[x].probability >= options.threshold) exact += 1.0;
      if (static_cast<std::size_t>(std::abs(pick - label)) <= options.tolerance) {
        hits += 1.0;
      }
      ++m.traces;
    }
  }
  if (m.traces > 0) {
    m.accuracy = exact / static_cast<double>(m.traces);
    m.hit_rate = hits / static_cast<double>(m.traces);
  }
  return m;
}

FirstBreakMetrics eval_firstbreak(const Model& model,
                                  const std::vector<LabeledSample>& samples,
                                  const FirstBreakEvalOptions& options,
                                  std::size_t batch_size) {
  if (!model.has_head() || model.head().kind != HeadKind::kFirstBreak) {
    throw ContractError("model head is not a firstbreak head");
  }
  std::vector<std::vector<float>> logits(samples.size());
  for_each_batch(model, samples, batch_size,
                 [&](const Tensor<float>& out, std::size_t begin, std::size_t end) {
    const std::size_t per = out.dim(1) * out.dim(2);
    const auto data = out.data();
    for (std::size_t i = begin; i < end; ++i) {
      const auto block = data.subspan((i - begin) * per, per);
      logits[i].assign(block.begin(), block.end());
    }
  });
  return score_firstbreak(logits, samples, options);
}

MeanVelocity label_mean_velocity(const GridModel& model, double shot_x,
                                 double half_max_offset, double dt,
                                 std::size_t samples) {
  model.validate();
  if (!(dt > 0.0) || samples == 0) {
    throw ContractError("label_mean_velocity needs dt > 0 and samples > 0");
  }
  const double x_last = model.origin_x + static_cast<double>(model.nx - 1) * model.dx;
  if (shot_x < model.origin_x || shot_x > x_last) {
    throw ContractError("shot position lies outside the grid");
  }
  MeanVelocity out;
  double lo = std::min(shot_x, shot_x + half_max_offset);
  double hi = std::max(shot_x, shot_x + half_max_offset);
  if (lo < model.origin_x || hi > x_last) {
    out.clipped = true;
    std::cerr << "warning: averaging window [" << lo << ", " << hi
              << "] clipped to the grid\n";
    lo = std::max(lo, model.origin_x);
    hi = std::min(hi, x_last);
  }
  // Columns whose x lies in [lo, hi]; a window narrower than a cell takes the
  // nearest column.
  const auto first = static_cast<std::size_t>(std::ceil((lo - model.origin_x) / model.dx - 1e-9));
  const auto last = static_cast<std::size_t>(std::floor((hi - model.origin_x) / model.dx + 1e-9));
  std::size_t c0 = first;
  std::size_t c1 = last;
  if (c1 < c0) {
    c0 = c1 = static_cast<std::size_t>(std::llround((shot_x - model.origin_x) / model.dx));
  }

  std::vector<double> depth_mean(model.nz);
  for (std::size_t iz = 0; iz < model.nz; ++iz) {
    double acc = 0.0;
    for (std::size_t ix = c0; ix <= c1; ++ix) acc += model.at(ix, iz);
    depth_mean[iz] = acc / static_cast<double>(c1 - c0 + 1);
  }

  // Row iz spans depths [iz dz, (iz + 1) dz) and takes 2 dz / v of two-way time.
  out.profile.resize(samples);
  std::size_t row = 0;
  double row_end = 2.0 * model.dz / depth_mean[0];
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = static_cast<double>(k) * dt;
    while (row + 1 < model.nz && t >= row_end) {
      ++row;
      row_end += 2.0 * model.dz / depth_mean[row];
    }
    out.profile[k] = depth_mean[row];
  }
  return out;
}

}  // namespace storseismic
