#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace storseismic {

enum class Domain : std::uint8_t { kClean = 0, kFieldProxy = 1 };

std::string to_string(Domain domain);

//! One shot record: `traces` receiver channels of `samples` time samples,
//! stored trace-major (row i is trace i).
class ShotGather {
 public:
  ShotGather() = default;
  //! Offsets must be strictly increasing, one per trace.
  ShotGather(std::size_t traces, std::size_t samples, double dt,
             std::vector<double> offsets, Domain domain = Domain::kClean);

  std::size_t traces() const { return traces_; }
  std::size_t samples() const { return samples_; }
  double dt() const { return dt_; }
  const std::vector<double>& offsets() const { return offsets_; }
  Domain domain() const { return domain_; }
  void set_domain(Domain domain) { domain_ = domain; }

  std::span<float> trace(std::size_t i) {
    return {amplitudes_.data() + i * samples_, samples_};
  }
  std::span<const float> trace(std::size_t i) const {
    return {amplitudes_.data() + i * samples_, samples_};
  }
  float& at(std::size_t trace, std::size_t sample) {
    return amplitudes_[trace * samples_ + sample];
  }
  float at(std::size_t trace, std::size_t sample) const {
    return amplitudes_[trace * samples_ + sample];
  }
  std::span<float> amplitudes() { return amplitudes_; }
  std::span<const float> amplitudes() const { return amplitudes_; }

  double max_abs() const;
  //! Population standard deviation over every sample.
  double stddev() const;
  //! Scales by 1 / max|a| so amplitudes lie in [-1, 1]; all-zero gathers are
  //! left untouched.
  void normalize();

  bool same_geometry(const ShotGather& other) const;

 private:
  std::size_t traces_ = 0;
  std::size_t samples_ = 0;
  double dt_ = 0.0;
  std::vector<double> offsets_;
  Domain domain_ = Domain::kClean;
  std::vector<float> amplitudes_;
};

//! Receiver line: trace i sits at near_offset + i * spacing from the source.
struct AcquisitionGeom {
  std::size_t receivers = 32;
  double near_offset = 0.0;
  double spacing = 50.0;
  double source_x = 0.0;

  std::vector<double> offsets() const;
  double max_offset() const {
    return near_offset + spacing * static_cast<double>(receivers - 1);
  }
};

}  // namespace storseismic
