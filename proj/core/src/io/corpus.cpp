#include "storseismic/io/corpus.hpp"

#include "storseismic/errors.hpp"

namespace storseismic {
namespace {

constexpr std::uint64_t kGaussianStreamKey = 0x6761757373ULL;

std::vector<float> to_float(const std::vector<double>& v) {
  return {v.begin(), v.end()};
}

void scale(ShotGather& g, double s) {
  for (auto& a : g.amplitudes()) a = static_cast<float>(a * s);
}

}  // namespace

std::string to_string(NoiseRecipe recipe) {
  switch (recipe) {
    case NoiseRecipe::kNone: return "none";
    case NoiseRecipe::kGaussianMix: return "gaussian";
    case NoiseRecipe::kFieldProxy: return "field_proxy";
  }
  return "unknown";
}

NoiseRecipe noise_recipe_from_string(const std::string& name) {
  for (auto r : {NoiseRecipe::kNone, NoiseRecipe::kGaussianMix,
                 NoiseRecipe::kFieldProxy}) {
    if (to_string(r) == name) return r;
  }
  throw ContractError("unknown noise recipe '" + name +
                      "' (expected none, gaussian or field_proxy)");
}

SeismicDataset generate_dataset(const GenerationPreset& preset, std::size_t n,
                                std::uint64_t seed,
                                const CorpusOptions& options) {
  if (n == 0) throw ContractError("dataset size must be positive");
  SeismicDataset ds;
  ds.traces = preset.traces;
  ds.samples = preset.samples;
  ds.dt = preset.dt;
  const auto bounds = preset.model_bounds();
  ds.velocity_min = bounds.min_velocity;
  ds.velocity_max = bounds.max_velocity;
  ds.offsets = preset.geometry().offsets();

  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t index = options.first_index + i;
    GeneratedSample s = generate_sample(preset, seed, index, options.synth);
    ShotGather clean = s.synth.gather;
    ShotGather input = clean;
    switch (options.noise) {
      case NoiseRecipe::kNone:
        break;
      case NoiseRecipe::kGaussianMix: {
        const std::size_t slot = index % 5;
        if (slot < 4) {
          Rng rng = Rng::stream(seed ^ kGaussianStreamKey, index);
          const double sigma = slot < 2 ? 1.0 : 2.0;
          input = add_noise(clean, NoiseSpec{NoiseSpec::Kind::kGaussian, sigma},
                            rng);
        }
        break;
      }
      case NoiseRecipe::kFieldProxy: {
        Rng rng = Rng::stream(seed ^ kFieldProxyStreamKey, index);
        input = add_noise(clean, NoiseSpec{NoiseSpec::Kind::kFieldProxy, 0.0},
                          rng);
        const double peak = input.max_abs();
        input.normalize();
        if (peak > 0.0) scale(clean, 1.0 / peak);
        break;
      }
    }
    ds.inputs.push_back(std::move(input));
    ds.clean.push_back(std::move(clean));
    ds.velocity.push_back(to_float(s.synth.labels.interval_velocity));
    ds.first_break.push_back(s.synth.labels.first_break);
    ds.vrms.push_back(to_float(s.synth.labels.vrms));
  }
  return ds;
}

}  // namespace storseismic
