#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "storseismic/finetune/metrics.hpp"
#include "storseismic/io/corpus.hpp"
#include "storseismic/model/config.hpp"
#include "storseismic/pretrain/pretrain.hpp"

namespace storseismic::cli {

//! Bad or inconsistent configuration; exits with code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DataConfig {
  //! Generation preset; used for inline corpora and mixing top-up.
  std::string preset = "desk";
  //! Overrides the preset's trace count when set.
  std::optional<std::size_t> traces;
  //! SSDS paths. An empty train path generates train_size + test_size
  //! gathers from the preset instead.
  std::string train;
  std::string test;
  //! Share of `train` held out when no test path is given.
  double test_fraction = 0.1;
  std::size_t train_size = 600;
  std::size_t test_size = 100;
  std::uint64_t seed = 0;
  NoiseRecipe noise = NoiseRecipe::kNone;
  FirstArrivalModel first_arrivals = FirstArrivalModel::kDirect;
  //! Second-domain gathers. Pre-training mixes them in at field_fraction;
  //! fine-tuning reports the task metrics on them as well.
  std::string field;
  double field_fraction = 0.0;
  //! Size of the mixed pre-training corpus; 0 means the train set size.
  std::size_t total = 0;
};

struct EvalConfig {
  double threshold = 0.5;
  std::size_t tolerance = 2;
  //! First-break scoring keeps |offset| <= this fraction of the max offset.
  double max_offset_fraction = 0.5;
};

struct RunConfig {
  ModelConfig model;
  std::uint64_t model_seed = 0;
  DataConfig data;
  TrainSchedule schedule;
  std::size_t freeze_k = 0;
  //! Empty keeps the task default (zeros for denoise, random otherwise).
  std::optional<HeadInit> head_init;
  MaskOptions mask;
  AugmentOptions augment;
  bool redraw_masks = true;
  EvalConfig eval;
  //! Fine-tuning task name; empty for pre-training.
  std::string task;
  std::string output_dir = "run";

  GenerationPreset preset() const;
  PretrainOptions pretrain_options() const;
  FirstBreakEvalOptions firstbreak_options(const std::vector<double>& offsets) const;
};

//! Parses a JSON config. Missing keys keep their defaults; unknown keys and
//! ill-typed values raise ConfigError naming the dotted key.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const RunConfig& config);

//! Writes `resolved_config.json` into `dir`.
void write_resolved(const RunConfig& config, const std::filesystem::path& dir);

}  // namespace storseismic::cli
