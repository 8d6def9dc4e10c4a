#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "run_config.hpp"
#include "storseismic/io/dataset.hpp"
#include "storseismic/model/model.hpp"
#include "storseismic/pretrain/training.hpp"

namespace storseismic::cli {

namespace fs = std::filesystem;

void write_json(const fs::path& path, const nlohmann::json& j);
nlohmann::json read_json(const fs::path& path);

//! epoch,train_loss,test_loss,seconds; one row per epoch.
void write_loss_csv(const fs::path& path, const std::vector<EpochStats>& history);

//! One row per gather: the gather index, then one value per time sample.
void write_profiles_csv(const fs::path& path,
                        const std::vector<std::vector<double>>& rows);
//! Reads write_profiles_csv output back, row i must carry gather index i.
std::vector<std::vector<double>> read_profiles_csv(const fs::path& path);

//! Metadata stored next to a checkpoint as <name>.json.
fs::path sidecar_path(const fs::path& checkpoint);

struct Splits {
  SeismicDataset train;
  SeismicDataset test;
};

//! Train/test sets per the data section: files when given (holding out
//! test_fraction of train when there is no test file), else generated from
//! the preset with the test set following the train set's indices.
Splits load_splits(const RunConfig& config);

SeismicDataset load_field(const RunConfig& config);

//! Batched inference without gradients; one flat output per gather.
std::vector<std::vector<float>> predict(const Model& model,
                                        const std::vector<ShotGather>& gathers,
                                        std::size_t batch_size = 32);

//! Throws ConfigError when the data does not fit the model.
void check_fits(const ModelConfig& model, const SeismicDataset& data);

}  // namespace storseismic::cli
