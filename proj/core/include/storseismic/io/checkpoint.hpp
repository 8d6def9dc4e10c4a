#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "storseismic/model/model.hpp"
#include "storseismic/numerics/optimizer.hpp"

// SSCK checkpoint format, version 1. All integers and floats little-endian.
//
//   char[4]  "SSCK"
//   u16      version
//   u32      hidden, layers, heads, samples, max_traces, intermediate_ratio
//   u8       attention scale mode (0 per_head, 1 full_width)
//   f64      dropout
//   u8       head kind (0..4, 255 = no head)
//   u32      record count
//   record*: u32 name length, name bytes (UTF-8), u32 rank, u32 dims[rank],
//            f32 values[product(dims)]
//
// Model parameters use their dotted names. Records prefixed "optimizer."
// carry Adam moments ("optimizer.first.<param>", "optimizer.second.<param>")
// so that training can resume; model loading ignores them.

namespace storseismic {

inline constexpr std::uint16_t kCheckpointVersion = 1;

struct CheckpointRecord {
  std::string name;
  Shape shape;
  std::vector<float> values;
};

struct Checkpoint {
  ModelConfig config;
  std::optional<HeadKind> head;
  std::vector<CheckpointRecord> records;
};

void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path,
                     const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

//! Parameters in canonical order, optionally followed by optimizer moments.
Checkpoint make_checkpoint(const Model& model,
                           const AdamOptimizer<float>* optimizer = nullptr);

//! Rebuilds a model. Every model parameter must be present with its exact
//! shape; unknown non-optimizer records raise DataError.
Model model_from_checkpoint(const Checkpoint& checkpoint);

//! Restores Adam moments saved by make_checkpoint.
void restore_optimizer(const Checkpoint& checkpoint, std::int64_t step,
                       AdamOptimizer<float>& optimizer);

}  // namespace storseismic
