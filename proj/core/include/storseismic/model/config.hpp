#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace storseismic {

enum class AttentionScale : std::uint8_t {
  kPerHead = 0,      // sqrt(H / A), the per-head key width
  kFullWidth = 1     // sqrt(H), the whole hidden width
};

//! Encoder hyperparameters. `samples` is the trace length T (input and
//! reconstruction width); `max_traces` bounds the sequence length X.
struct ModelConfig {
  std::size_t hidden = 256;
  std::size_t layers = 4;
  std::size_t heads = 4;
  std::size_t samples = 376;
  std::size_t max_traces = 324;
  std::size_t intermediate_ratio = 4;
  AttentionScale scale_mode = AttentionScale::kPerHead;
  double dropout = 0.0;

  std::size_t head_dim() const { return hidden / heads; }
  std::size_t intermediate() const { return hidden * intermediate_ratio; }

  //! Throws ContractError when a field is out of range or H % A != 0.
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

//! Exact trainable-parameter count of a model with a linear H -> T head.
//! Head count A does not enter: the Q/K/V/O projections are H x H whatever
//! the split.
std::size_t param_count(const ModelConfig& config);

std::string to_string(AttentionScale mode);
AttentionScale attention_scale_from_string(const std::string& name);

}  // namespace storseismic
