#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "storseismic/io/dataset.hpp"
#include "storseismic/seisgen/synthesis.hpp"

namespace storseismic {

enum class NoiseRecipe : std::uint8_t {
  kNone = 0,
  //! Gaussian noise by index: i % 5 in {0, 1} gets 1 sigma, {2, 3} gets
  //! 2 sigma, 4 stays clean. Inputs are not renormalized, so they share the
  //! clean label's amplitude scale.
  kGaussianMix = 1,
  //! The field-proxy recipe. Input and clean label are both divided by the
  //! noisy gather's max|a|.
  kFieldProxy = 2,
};

std::string to_string(NoiseRecipe recipe);
NoiseRecipe noise_recipe_from_string(const std::string& name);

struct CorpusOptions {
  SynthOptions synth;
  NoiseRecipe noise = NoiseRecipe::kNone;
  //! Index of the first sample; lets train and test sets share one seed.
  std::uint64_t first_index = 0;
};

//! `n` fully labelled gathers. Sample i is generate_sample(preset, seed,
//! first_index + i); noise draws from Rng::stream(seed ^ noise key, index).
//! Velocity bounds in the header are the preset's model bounds.
SeismicDataset generate_dataset(const GenerationPreset& preset, std::size_t n,
                                std::uint64_t seed,
                                const CorpusOptions& options = {});

}  // namespace storseismic
