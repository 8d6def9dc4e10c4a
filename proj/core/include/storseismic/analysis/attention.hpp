#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "storseismic/model/model.hpp"
#include "storseismic/seisgen/gather.hpp"

namespace storseismic {

//! Attention maps of every layer and head for one gather. The capture does
//! not change the forward computation.
AttentionRecord attention_maps(const Model& model, const ShotGather& gather);

enum class RolloutMode : std::uint8_t {
  //! R_l = rownorm(0.5 A_l + 0.5 I) R_{l-1}, accounting for the residual path.
  kWithIdentity = 0,
  //! R_l = A_l R_{l-1}.
  kRaw = 1,
};

std::string to_string(RolloutMode mode);
RolloutMode rollout_mode_from_string(const std::string& name);

//! Cumulative rollout after each layer; layers[l] is size x size row-major.
struct RolloutResult {
  std::size_t size = 0;
  RolloutMode mode = RolloutMode::kWithIdentity;
  std::vector<std::vector<double>> layers;

  double at(std::size_t layer, std::size_t row, std::size_t col) const {
    return layers[layer][row * size + col];
  }
};

//! A_l is the head average of layer l; R_0 = I.
RolloutResult attention_rollout(const AttentionRecord& record, RolloutMode mode);

//! Frobenius norm of a - b for equal-size square matrices.
double frobenius_distance(std::span<const double> a, std::span<const double> b);

//! Per-layer Frobenius distance between two rollouts of the same input.
std::vector<double> rollout_distance(const RolloutResult& a, const RolloutResult& b);

//! Writes an 8-bit binary PGM, mapping [0, 1] linearly onto [0, 255]
//! (values outside are clamped).
void write_pgm(const std::filesystem::path& path, std::span<const double> values,
               std::size_t rows, std::size_t cols);

//! Comma-separated rows with round-trip precision.
void write_matrix_csv(const std::filesystem::path& path,
                      std::span<const double> values, std::size_t rows,
                      std::size_t cols);
std::vector<std::vector<double>> read_matrix_csv(const std::filesystem::path& path);

//! attention_l{l}_h{h}.pgm/.csv per map. Returns the files written.
std::vector<std::filesystem::path> export_maps(const AttentionRecord& record,
                                               const std::filesystem::path& dir);
//! rollout_l{l}.pgm/.csv per layer.
std::vector<std::filesystem::path> export_rollout(const RolloutResult& rollout,
                                                  const std::filesystem::path& dir);

}  // namespace storseismic
