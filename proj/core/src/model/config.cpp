#include "storseismic/model/config.hpp"

#include "storseismic/errors.hpp"

namespace storseismic {

void ModelConfig::validate() const {
  if (hidden == 0 || layers == 0 || heads == 0 || samples == 0 ||
      max_traces == 0 || intermediate_ratio == 0) {
    throw ContractError("model config fields must be positive");
  }
  if (hidden % heads != 0) {
    throw ContractError("hidden size " + std::to_string(hidden) +
                        " is not divisible by head count " +
                        std::to_string(heads));
  }
  if (dropout < 0.0 || dropout >= 1.0) {
    throw ContractError("dropout must lie in [0, 1)");
  }
}

std::size_t param_count(const ModelConfig& c) {
  const std::size_t h = c.hidden;
  const std::size_t t = c.samples;
  const std::size_t ffn = c.intermediate();
  const std::size_t embedding = t * h + h + 2 * h;
  const std::size_t attention = 4 * (h * h + h);
  const std::size_t norms = 2 * 2 * h;
  const std::size_t feed_forward = h * ffn + ffn + ffn * h + h;
  const std::size_t head = h * t + t;
  return embedding + c.layers * (attention + norms + feed_forward) + head;
}

std::string to_string(AttentionScale mode) {
  return mode == AttentionScale::kPerHead ? "per_head" : "full_width";
}

AttentionScale attention_scale_from_string(const std::string& name) {
  if (name == "per_head") return AttentionScale::kPerHead;
  if (name == "full_width") return AttentionScale::kFullWidth;
  throw ContractError("unknown attention scale mode '" + name + "'");
}

}  // namespace storseismic
