#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "storseismic/model/config.hpp"
#include "storseismic/numerics/parameter.hpp"
#include "storseismic/numerics/random.hpp"
#include "storseismic/numerics/tensor.hpp"

namespace storseismic {

enum class HeadKind : std::uint8_t {
  kReconstruction = 0,
  kDenoise = 1,
  kVelocity = 2,
  kFirstBreak = 3,
  kVrms = 4,
};

enum class HeadInit : std::uint8_t { kZeros = 0, kRandom = 1 };

std::string to_string(HeadKind kind);
HeadKind head_kind_from_string(const std::string& name);

//! True for heads that emit one length-T profile per gather (read from
//! sequence position 0) rather than one row per trace.
constexpr bool is_profile_head(HeadKind kind) {
  return kind == HeadKind::kVelocity || kind == HeadKind::kVrms;
}

//! y = x W + b with W stored [in, out].
template <typename T>
struct Linear {
  Parameter<T> weight;
  Parameter<T> bias;
};

template <typename T>
struct LayerNormParams {
  Parameter<T> gain;
  Parameter<T> bias;
};

template <typename T>
struct EmbeddingBlock {
  Linear<T> projection;  // T -> H per trace
  LayerNormParams<T> norm;
  bool frozen = false;
};

//! Pre-norm encoder block: x + Attn(LN1(x)), then x + FFN(LN2(x)).
template <typename T>
struct EncoderLayer {
  Linear<T> query;
  Linear<T> key;
  Linear<T> value;
  Linear<T> output;
  LayerNormParams<T> attention_norm;
  LayerNormParams<T> ffn_norm;
  Linear<T> ffn_in;
  Linear<T> ffn_out;
  bool frozen = false;
};

template <typename T>
struct PredictionHead {
  HeadKind kind = HeadKind::kReconstruction;
  HeadInit init = HeadInit::kZeros;
  Linear<T> projection;  // H -> T
};

//! Softmax weights of one head for one gather: size x size, row-major.
struct AttentionMap {
  std::size_t size = 0;
  std::vector<double> weights;

  double operator()(std::size_t row, std::size_t col) const {
    return weights[row * size + col];
  }
};

//! All attention maps of one forward pass over one gather, layer-major.
struct AttentionRecord {
  std::size_t layers = 0;
  std::size_t heads = 0;
  std::vector<AttentionMap> maps;

  const AttentionMap& at(std::size_t layer, std::size_t head) const {
    return maps[layer * heads + head];
  }
};

struct ForwardOptions {
  bool capture_attention = false;
  //! Enables dropout (needs `rng`). Inference leaves it off.
  bool training = false;
  Rng* rng = nullptr;
  //! Positional index per trace; empty means 0..X-1.
  std::span<const std::size_t> positions;
};

template <typename T>
struct ForwardResult {
  //! [B, X, T] for per-trace heads, [B, T] for profile heads.
  Tensor<T> output;
  //! One record per batch element when capture was requested.
  std::vector<AttentionRecord> attention;
};

//! Sinusoidal positional encoding value for trace position `pos` and hidden
//! channel `channel`: channels 2k and 2k+1 share the frequency
//! 1 / 10000^(2k / H), the even one taking sin and the odd one cos.
double positional_encoding(std::size_t pos, std::size_t channel,
                           std::size_t hidden);

//! Trace-sequence encoder with a detachable prediction head.
template <typename T>
class BasicModel {
 public:
  //! Projections truncated-normal(0.02), biases zero, layer norms (1, 0).
  BasicModel(const ModelConfig& config, Rng& rng,
             HeadKind head = HeadKind::kReconstruction,
             HeadInit head_init = HeadInit::kZeros);

  //! Same structure with every weight zero; filled in by checkpoint loading.
  static BasicModel zeros(const ModelConfig& config,
                          std::optional<HeadKind> head);

  const ModelConfig& config() const { return config_; }

  //! input [B, X, T] (or [X, T]) -> encoder features [B, X, H].
  Tensor<T> encode(const Tensor<T>& input, const ForwardOptions& options,
                   std::vector<AttentionRecord>* records) const;

  //! Embedding block only: projection, positional encoding, layer norm.
  Tensor<T> embed(const Tensor<T>& input,
                  std::span<const std::size_t> positions) const;

  //! One attention sub-block with its residual. `records` may be null.
  Tensor<T> attention(const Tensor<T>& x, std::size_t layer,
                      const ForwardOptions& options,
                      std::vector<AttentionRecord>* records) const;

  //! One feed-forward sub-block with its residual.
  Tensor<T> feed_forward(const Tensor<T>& x, std::size_t layer,
                         const ForwardOptions& options) const;

  Tensor<T> apply_head(const Tensor<T>& features) const;

  //! Embedding, encoder stack, then the attached head. Throws ContractError
  //! when no head is attached.
  ForwardResult<T> forward(const Tensor<T>& input,
                           const ForwardOptions& options = {}) const;

  bool has_head() const { return head_.has_value(); }
  const PredictionHead<T>& head() const;
  //! Swaps the head; encoder weights are not touched.
  void replace_head(PredictionHead<T> head);
  void detach_head() { head_.reset(); }

  //! Freezes layers [0, k) and, for k > 0, the embedding block. Everything
  //! else becomes trainable. Throws std::out_of_range when k > L.
  void freeze_layers(std::size_t k);
  std::size_t frozen_layers() const;
  void set_head_frozen(bool frozen);

  const EmbeddingBlock<T>& embedding() const { return embedding_; }
  const EncoderLayer<T>& layer(std::size_t i) const { return layers_.at(i); }

  //! Canonical order: embedding, layers 0..L-1, head.
  std::vector<Parameter<T>*> parameters();
  std::vector<const Parameter<T>*> parameters() const;
  Parameter<T>* find_parameter(const std::string& name);
  std::size_t parameter_count() const;

  template <typename U>
  BasicModel<U> cast() const {
    auto out = BasicModel<U>::zeros(
        config_, head_ ? std::optional<HeadKind>(head_->kind) : std::nullopt);
    auto src = parameters();
    auto dst = out.parameters();
    for (std::size_t i = 0; i < src.size(); ++i) {
      auto from = src[i]->value.data();
      auto to = dst[i]->value.mutable_data();
      for (std::size_t j = 0; j < from.size(); ++j) {
        to[j] = static_cast<U>(from[j]);
      }
    }
    out.freeze_layers(frozen_layers());
    return out;
  }

  //! Deep copy. Plain copies share parameter storage.
  BasicModel clone() const {
    BasicModel out = cast<T>();
    if (head_) {
      out.head_->init = head_->init;
      out.set_head_frozen(head_->projection.weight.frozen);
    }
    return out;
  }

 private:
  explicit BasicModel(const ModelConfig& config);

  ModelConfig config_;
  EmbeddingBlock<T> embedding_;
  std::vector<EncoderLayer<T>> layers_;
  std::optional<PredictionHead<T>> head_;
};

//! New head of `kind` for `config`; random init draws truncated-normal(0.02).
template <typename T>
PredictionHead<T> make_head(HeadKind kind, const ModelConfig& config,
                            HeadInit init, Rng& rng);

using Model = BasicModel<float>;

extern template class BasicModel<float>;
extern template class BasicModel<double>;

}  // namespace storseismic
