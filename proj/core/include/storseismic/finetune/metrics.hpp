#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "storseismic/finetune/finetune.hpp"
#include "storseismic/seisgen/grid_model.hpp"

namespace storseismic {

struct DenoiseMetrics {
  double mse = 0.0;
};

struct ProfileMetrics {
  double mae = 0.0;  // m/s
};

struct FirstBreakMetrics {
  //! Traces whose argmax pick equals the label and has probability >= threshold.
  double accuracy = 0.0;
  //! Traces whose argmax pick lies within `tolerance` samples of the label.
  double hit_rate = 0.0;
  std::size_t traces = 0;
};

struct FirstBreakEvalOptions {
  double threshold = 0.5;
  std::size_t tolerance = 2;
  //! Only traces with |offset| <= this count; unset keeps all.
  std::optional<double> max_offset;
};

//! Mean squared error over whole gathers. Works with a denoise head or a
//! reconstruction head (the pre-fine-tune reference).
DenoiseMetrics eval_denoise(const Model& model,
                            const std::vector<LabeledSample>& samples,
                            std::size_t batch_size = 32);

//! MAE in m/s after de-normalizing predictions with `scale`.
ProfileMetrics eval_velocity(const Model& model,
                             const std::vector<LabeledSample>& samples,
                             const VelocityScale& scale,
                             std::size_t batch_size = 32);
ProfileMetrics eval_vrms(const Model& model,
                         const std::vector<LabeledSample>& samples,
                         const VelocityScale& scale,
                         std::size_t batch_size = 32);

FirstBreakMetrics eval_firstbreak(const Model& model,
                                  const std::vector<LabeledSample>& samples,
                                  const FirstBreakEvalOptions& options = {},
                                  std::size_t batch_size = 32);

//! Same scores from precomputed logits [X][T] per gather.
FirstBreakMetrics score_firstbreak(std::span<const std::vector<float>> logits,
                                   const std::vector<LabeledSample>& samples,
                                   const FirstBreakEvalOptions& options = {});

//! Per-trace argmax pick and its softmax probability.
struct Pick {
  std::size_t index = 0;
  double probability = 0.0;
};
std::vector<Pick> picks_from_logits(std::span<const float> logits,
                                    std::size_t traces, std::size_t samples);

struct MeanVelocity {
  std::vector<double> profile;  // m/s per time sample
  //! True when the averaging window had to be clipped to the grid.
  bool clipped = false;
};

//! Lateral mean of v(x, z) over x in [shot_x, shot_x + half_max_offset],
//! resampled from depth to two-way time k * dt. Below the grid the deepest
//! row's value holds. Throws ContractError when the shot lies off the grid.
MeanVelocity label_mean_velocity(const GridModel& model, double shot_x,
                                 double half_max_offset, double dt,
                                 std::size_t samples);

}  // namespace storseismic
