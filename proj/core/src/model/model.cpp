#include "storseismic/model/model.hpp"

#include <cmath>
#include <stdexcept>

#include "storseismic/errors.hpp"
#include "storseismic/numerics/ops.hpp"

namespace storseismic {
namespace {

constexpr double kInitStd = 0.02;

template <typename T>
Tensor<T> random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  std::vector<T> values(rows * cols);
  for (auto& v : values) v = static_cast<T>(rng.truncated_normal(kInitStd));
  return Tensor<T>({rows, cols}, std::move(values));
}

template <typename T>
Linear<T> make_linear(const std::string& name, std::size_t in, std::size_t out,
                      Rng* rng) {
  Linear<T> lin;
  lin.weight = Parameter<T>(name + ".weight",
                            rng ? random_matrix<T>(in, out, *rng)
                                : Tensor<T>({in, out}));
  lin.bias = Parameter<T>(name + ".bias", Tensor<T>({out}));
  return lin;
}

template <typename T>
LayerNormParams<T> make_norm(const std::string& name, std::size_t width,
                             bool ones) {
  return {Parameter<T>(name + ".gain", Tensor<T>({width}, ones ? T(1) : T(0))),
          Parameter<T>(name + ".bias", Tensor<T>({width}))};
}

template <typename T>
Tensor<T> apply(const Linear<T>& lin, const Tensor<T>& x) {
  return linear(x, lin.weight.value, lin.bias.value);
}

template <typename T>
Tensor<T> apply(const LayerNormParams<T>& norm, const Tensor<T>& x) {
  return layer_norm(x, norm.gain.value, norm.bias.value);
}

template <typename T>
void collect(Linear<T>& lin, std::vector<Parameter<T>*>& out) {
  out.push_back(&lin.weight);
  out.push_back(&lin.bias);
}

template <typename T>
void collect(LayerNormParams<T>& norm, std::vector<Parameter<T>*>& out) {
  out.push_back(&norm.gain);
  out.push_back(&norm.bias);
}

template <typename T>
void set_frozen(EncoderLayer<T>& layer, bool frozen) {
  layer.frozen = frozen;
  for (auto* lin : {&layer.query, &layer.key, &layer.value, &layer.output,
                    &layer.ffn_in, &layer.ffn_out}) {
    lin->weight.set_frozen(frozen);
    lin->bias.set_frozen(frozen);
  }
  for (auto* norm : {&layer.attention_norm, &layer.ffn_norm}) {
    norm->gain.set_frozen(frozen);
    norm->bias.set_frozen(frozen);
  }
}

template <typename T>
Tensor<T> as_batch(const Tensor<T>& input) {
  if (input.rank() == 2) {
    return reshape(input, {1, input.dim(0), input.dim(1)});
  }
  if (input.rank() != 3) {
    throw ShapeError("model input must be [B, X, T] or [X, T], got " +
                     shape_to_string(input.shape()));
  }
  return input;
}

}  // namespace

std::string to_string(HeadKind kind) {
  switch (kind) {
    case HeadKind::kReconstruction: return "reconstruction";
    case HeadKind::kDenoise: return "denoise";
    case HeadKind::kVelocity: return "velocity";
    case HeadKind::kFirstBreak: return "firstbreak";
    case HeadKind::kVrms: return "vrms";
  }
  return "unknown";
}

HeadKind head_kind_from_string(const std::string& name) {
  for (auto kind : {HeadKind::kReconstruction, HeadKind::kDenoise,
                    HeadKind::kVelocity, HeadKind::kFirstBreak, HeadKind::kVrms}) {
    if (to_string(kind) == name) return kind;
  }
  throw ContractError("unknown head kind '" + name + "'");
}

double positional_encoding(std::size_t pos, std::size_t channel,
                           std::size_t hidden) {
  const double pair = static_cast<double>(channel / 2 * 2);
  const double angle = static_cast<double>(pos) /
                       std::pow(10000.0, pair / static_cast<double>(hidden));
  return channel % 2 == 0 ? std::sin(angle) : std::cos(angle);
}

template <typename T>
PredictionHead<T> make_head(HeadKind kind, const ModelConfig& config,
                            HeadInit init, Rng& rng) {
  PredictionHead<T> head;
  head.kind = kind;
  head.init = init;
  head.projection = make_linear<T>("head." + to_string(kind), config.hidden,
                                   config.samples,
                                   init == HeadInit::kRandom ? &rng : nullptr);
  return head;
}

template <typename T>
BasicModel<T>::BasicModel(const ModelConfig& config) : config_(config) {
  config_.validate();
}

template <typename T>
BasicModel<T>::BasicModel(const ModelConfig& config, Rng& rng, HeadKind head,
                          HeadInit head_init)
    : BasicModel(config) {
  const std::size_t h = config_.hidden;
  embedding_.projection = make_linear<T>("embedding.projection",
                                         config_.samples, h, &rng);
  embedding_.norm = make_norm<T>("embedding.norm", h, true);
  layers_.resize(config_.layers);
  for (std::size_t l = 0; l < config_.layers; ++l) {
    const std::string p = "encoder." + std::to_string(l);
    auto& layer = layers_[l];
    layer.query = make_linear<T>(p + ".attention.query", h, h, &rng);
    layer.key = make_linear<T>(p + ".attention.key", h, h, &rng);
    layer.value = make_linear<T>(p + ".attention.value", h, h, &rng);
    layer.output = make_linear<T>(p + ".attention.output", h, h, &rng);
    layer.attention_norm = make_norm<T>(p + ".attention_norm", h, true);
    layer.ffn_norm = make_norm<T>(p + ".ffn_norm", h, true);
    layer.ffn_in = make_linear<T>(p + ".ffn.in", h, config_.intermediate(), &rng);
    layer.ffn_out = make_linear<T>(p + ".ffn.out", config_.intermediate(), h, &rng);
  }
  head_ = make_head<T>(head, config_, head_init, rng);
}

template <typename T>
BasicModel<T> BasicModel<T>::zeros(const ModelConfig& config,
                                   std::optional<HeadKind> head) {
  BasicModel model(config);
  const std::size_t h = config.hidden;
  model.embedding_.projection =
      make_linear<T>("embedding.projection", config.samples, h, nullptr);
  model.embedding_.norm = make_norm<T>("embedding.norm", h, false);
  model.layers_.resize(config.layers);
  for (std::size_t l = 0; l < config.layers; ++l) {
    const std::string p = "encoder." + std::to_string(l);
    auto& layer = model.layers_[l];
    layer.query = make_linear<T>(p + ".attention.query", h, h, nullptr);
    layer.key = make_linear<T>(p + ".attention.key", h, h, nullptr);
    layer.value = make_linear<T>(p + ".attention.value", h, h, nullptr);
    layer.output = make_linear<T>(p + ".attention.output", h, h, nullptr);
    layer.attention_norm = make_norm<T>(p + ".attention_norm", h, false);
    layer.ffn_norm = make_norm<T>(p + ".ffn_norm", h, false);
    layer.ffn_in = make_linear<T>(p + ".ffn.in", h, config.intermediate(), nullptr);
    layer.ffn_out =
        make_linear<T>(p + ".ffn.out", config.intermediate(), h, nullptr);
  }
  if (head) {
    Rng unused(0);
    model.head_ = make_head<T>(*head, config, HeadInit::kZeros, unused);
  }
  return model;
}

template <typename T>
Tensor<T> BasicModel<T>::embed(const Tensor<T>& input,
                               std::span<const std::size_t> positions) const {
  const Tensor<T> batch = as_batch(input);
  const std::size_t x = batch.dim(1);
  if (batch.dim(2) != config_.samples) {
    throw ShapeError("trace length " + std::to_string(batch.dim(2)) +
                     " does not match model T = " +
                     std::to_string(config_.samples));
  }
  if (x > config_.max_traces) {
    throw ShapeError(std::to_string(x) + " traces exceed model X = " +
                     std::to_string(config_.max_traces));
  }
  if (!positions.empty() && positions.size() != x) {
    throw ShapeError("need one position per trace");
  }
  const std::size_t h = config_.hidden;
  std::vector<T> enc(x * h);
  for (std::size_t i = 0; i < x; ++i) {
    const std::size_t pos = positions.empty() ? i : positions[i];
    for (std::size_t c = 0; c < h; ++c) {
      enc[i * h + c] = static_cast<T>(positional_encoding(pos, c, h));
    }
  }
  const Tensor<T> projected = apply(embedding_.projection, batch);
  return apply(embedding_.norm,
               add(projected, Tensor<T>({x, h}, std::move(enc))));
}

template <typename T>
Tensor<T> BasicModel<T>::attention(const Tensor<T>& x, std::size_t layer_index,
                                   const ForwardOptions& options,
                                   std::vector<AttentionRecord>* records) const {
  const auto& layer = layers_.at(layer_index);
  const std::size_t heads = config_.heads;
  const std::size_t dh = config_.head_dim();
  const std::size_t batch = x.dim(0);
  const std::size_t traces = x.dim(1);
  const double width = config_.scale_mode == AttentionScale::kPerHead
                           ? static_cast<double>(dh)
                           : static_cast<double>(config_.hidden);
  const T inv_scale = static_cast<T>(1.0 / std::sqrt(width));

  const Tensor<T> normed = apply(layer.attention_norm, x);
  const Tensor<T> q = apply(layer.query, normed);
  const Tensor<T> k = apply(layer.key, normed);
  const Tensor<T> v = apply(layer.value, normed);

  std::vector<Tensor<T>> per_head;
  per_head.reserve(heads);
  for (std::size_t a = 0; a < heads; ++a) {
    const Tensor<T> qh = slice(q, 2, a * dh, (a + 1) * dh);
    const Tensor<T> kh = slice(k, 2, a * dh, (a + 1) * dh);
    const Tensor<T> vh = slice(v, 2, a * dh, (a + 1) * dh);
    const Tensor<T> weights =
        softmax(scale(matmul(qh, transpose(kh)), inv_scale), 2);
    if (records) {
      auto w = weights.data();
      for (std::size_t b = 0; b < batch; ++b) {
        auto& map = (*records)[b].maps[layer_index * heads + a];
        map.size = traces;
        map.weights.assign(w.begin() + b * traces * traces,
                           w.begin() + (b + 1) * traces * traces);
      }
    }
    per_head.push_back(matmul(weights, vh));
  }
  Tensor<T> merged = heads == 1 ? per_head.front() : concat(per_head, 2);
  Tensor<T> projected = apply(layer.output, merged);
  if (options.training && config_.dropout > 0.0) {
    projected = dropout(projected, config_.dropout, *options.rng, true);
  }
  return add(x, projected);
}

template <typename T>
Tensor<T> BasicModel<T>::feed_forward(const Tensor<T>& x, std::size_t layer_index,
                                      const ForwardOptions& options) const {
  const auto& layer = layers_.at(layer_index);
  Tensor<T> hidden = gelu(apply(layer.ffn_in, apply(layer.ffn_norm, x)));
  Tensor<T> out = apply(layer.ffn_out, hidden);
  if (options.training && config_.dropout > 0.0) {
    out = dropout(out, config_.dropout, *options.rng, true);
  }
  return add(x, out);
}

template <typename T>
Tensor<T> BasicModel<T>::encode(const Tensor<T>& input,
                                const ForwardOptions& options,
                                std::vector<AttentionRecord>* records) const {
  if (options.training && config_.dropout > 0.0 && options.rng == nullptr) {
    throw ContractError("training with dropout needs an rng");
  }
  Tensor<T> h = embed(input, options.positions);
  if (records) {
    const std::size_t batch = h.dim(0);
    records->assign(batch, AttentionRecord{config_.layers, config_.heads, {}});
    for (auto& r : *records) r.maps.resize(config_.layers * config_.heads);
  }
  if (options.training && config_.dropout > 0.0) {
    h = dropout(h, config_.dropout, *options.rng, true);
  }
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    h = attention(h, l, options, records);
    h = feed_forward(h, l, options);
  }
  return h;
}

template <typename T>
Tensor<T> BasicModel<T>::apply_head(const Tensor<T>& features) const {
  const auto& hd = head();
  switch (hd.kind) {
    case HeadKind::kReconstruction:
    case HeadKind::kDenoise:
      return apply(hd.projection, features);
    case HeadKind::kFirstBreak:
      return apply(hd.projection, sigmoid(features));
    case HeadKind::kVelocity:
    case HeadKind::kVrms: {
      const std::size_t batch = features.dim(0);
      const Tensor<T> first = slice(features, 1, 0, 1);
      return reshape(apply(hd.projection, first), {batch, config_.samples});
    }
  }
  throw ContractError("unhandled head kind");
}

template <typename T>
ForwardResult<T> BasicModel<T>::forward(const Tensor<T>& input,
                                        const ForwardOptions& options) const {
  if (!head_) {
    throw ContractError("forward() needs an attached prediction head");
  }
  ForwardResult<T> result;
  const Tensor<T> features = encode(
      input, options, options.capture_attention ? &result.attention : nullptr);
  result.output = apply_head(features);
  return result;
}

template <typename T>
const PredictionHead<T>& BasicModel<T>::head() const {
  if (!head_) {
    throw ContractError("model has no prediction head attached");
  }
  return *head_;
}

template <typename T>
void BasicModel<T>::replace_head(PredictionHead<T> head) {
  if (head.projection.weight.value.shape() !=
      Shape{config_.hidden, config_.samples}) {
    throw ShapeError("head projection must be [H, T]");
  }
  head_ = std::move(head);
}

template <typename T>
void BasicModel<T>::freeze_layers(std::size_t k) {
  if (k > config_.layers) {
    throw std::out_of_range("cannot freeze " + std::to_string(k) +
                            " of " + std::to_string(config_.layers) +
                            " layers");
  }
  const bool embed_frozen = k > 0;
  embedding_.frozen = embed_frozen;
  for (auto* p : {&embedding_.projection.weight, &embedding_.projection.bias,
                  &embedding_.norm.gain, &embedding_.norm.bias}) {
    p->set_frozen(embed_frozen);
  }
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    set_frozen(layers_[l], l < k);
  }
}

template <typename T>
std::size_t BasicModel<T>::frozen_layers() const {
  std::size_t k = 0;
  while (k < layers_.size() && layers_[k].frozen) ++k;
  return k;
}

template <typename T>
void BasicModel<T>::set_head_frozen(bool frozen) {
  if (!head_) return;
  head_->projection.weight.set_frozen(frozen);
  head_->projection.bias.set_frozen(frozen);
}

template <typename T>
std::vector<Parameter<T>*> BasicModel<T>::parameters() {
  std::vector<Parameter<T>*> out;
  collect(embedding_.projection, out);
  collect(embedding_.norm, out);
  for (auto& layer : layers_) {
    collect(layer.query, out);
    collect(layer.key, out);
    collect(layer.value, out);
    collect(layer.output, out);
    collect(layer.attention_norm, out);
    collect(layer.ffn_norm, out);
    collect(layer.ffn_in, out);
    collect(layer.ffn_out, out);
  }
  if (head_) collect(head_->projection, out);
  return out;
}

template <typename T>
std::vector<const Parameter<T>*> BasicModel<T>::parameters() const {
  auto mutable_params = const_cast<BasicModel*>(this)->parameters();
  return {mutable_params.begin(), mutable_params.end()};
}

template <typename T>
Parameter<T>* BasicModel<T>::find_parameter(const std::string& name) {
  for (auto* p : parameters()) {
    if (p->name == name) return p;
  }
  return nullptr;
}

template <typename T>
std::size_t BasicModel<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto* p : parameters()) n += p->value.numel();
  return n;
}

template PredictionHead<float> make_head(HeadKind, const ModelConfig&, HeadInit,
                                         Rng&);
template PredictionHead<double> make_head(HeadKind, const ModelConfig&,
                                          HeadInit, Rng&);
template class BasicModel<float>;
template class BasicModel<double>;

}  // namespace storseismic
