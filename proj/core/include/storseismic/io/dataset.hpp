#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "storseismic/seisgen/gather.hpp"

// SSDS dataset format, version 1. All values little-endian.
//
//   char[4]  "SSDS"
//   u16      version
//   u32      gather count N, traces X, samples T
//   f32      dt (s), velocity_min, velocity_max (m/s, corpus-wide bounds
//            used to scale velocity labels to (0, 1))
//   f32      offsets[X] (m)
//   u8       domain tag per gather [N] (0 clean, 1 field_proxy)
//   f32      amplitudes [N][X][T], row-major
//   u32      label block count
//   block*:  u8 type tag, then
//              1 clean       f32 [N][X][T]
//              2 velocity    f32 [N][T]   interval velocity, m/s
//              3 firstbreak  u16 [N][X]   sample index of the first arrival
//              4 vrms        f32 [N][T]   m/s

namespace storseismic {

inline constexpr std::uint16_t kDatasetVersion = 1;

enum class LabelKind : std::uint8_t {
  kClean = 1,
  kVelocity = 2,
  kFirstBreak = 3,
  kVrms = 4,
};

struct SeismicDataset {
  std::size_t traces = 0;
  std::size_t samples = 0;
  double dt = 0.0;
  double velocity_min = 1500.0;
  double velocity_max = 4500.0;
  std::vector<double> offsets;

  std::vector<ShotGather> inputs;
  // Label blocks; each is either empty or holds one entry per gather.
  std::vector<ShotGather> clean;
  std::vector<std::vector<float>> velocity;
  std::vector<std::vector<std::uint16_t>> first_break;
  std::vector<std::vector<float>> vrms;

  std::size_t size() const { return inputs.size(); }
  bool has(LabelKind kind) const;
  //! Checks that every gather and label block agrees with the header.
  void validate() const;

  //! Rows [begin, end) with their labels.
  SeismicDataset subset(std::size_t begin, std::size_t end) const;
};

void write_dataset(std::ostream& out, const SeismicDataset& dataset);
SeismicDataset read_dataset(std::istream& in);

void save_dataset(const std::filesystem::path& path,
                  const SeismicDataset& dataset);
SeismicDataset load_dataset(const std::filesystem::path& path);

}  // namespace storseismic
