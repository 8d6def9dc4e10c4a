#include "storseismic/seisgen/gather.hpp"

#include <algorithm>
#include <cmath>

#include "storseismic/errors.hpp"

namespace storseismic {

std::string to_string(Domain domain) {
  return domain == Domain::kClean ? "clean" : "field_proxy";
}

ShotGather::ShotGather(std::size_t traces, std::size_t samples, double dt,
                       std::vector<double> offsets, Domain domain)
    : traces_(traces),
      samples_(samples),
      dt_(dt),
      offsets_(std::move(offsets)),
      domain_(domain),
      amplitudes_(traces * samples, 0.0f) {
  if (traces == 0 || samples == 0) {
    throw ContractError("a gather needs at least one trace and one sample");
  }
  if (!(dt > 0.0)) {
    throw ContractError("sample interval must be positive");
  }
  if (offsets_.size() != traces) {
    throw ContractError("need one offset per trace");
  }
  for (std::size_t i = 1; i < offsets_.size(); ++i) {
    if (!(offsets_[i] > offsets_[i - 1])) {
      throw ContractError("offsets must be strictly increasing");
    }
  }
}

double ShotGather::max_abs() const {
  float m = 0.0f;
  for (float a : amplitudes_) m = std::max(m, std::abs(a));
  return m;
}

double ShotGather::stddev() const {
  if (amplitudes_.empty()) return 0.0;
  double mean = 0.0;
  for (float a : amplitudes_) mean += a;
  mean /= static_cast<double>(amplitudes_.size());
  double var = 0.0;
  for (float a : amplitudes_) var += (a - mean) * (a - mean);
  return std::sqrt(var / static_cast<double>(amplitudes_.size()));
}

void ShotGather::normalize() {
  const double m = max_abs();
  if (m == 0.0) return;
  const double inv = 1.0 / m;
  for (auto& a : amplitudes_) {
    a = static_cast<float>(std::clamp(a * inv, -1.0, 1.0));
  }
}

bool ShotGather::same_geometry(const ShotGather& other) const {
  return traces_ == other.traces_ && samples_ == other.samples_ &&
         dt_ == other.dt_ && offsets_ == other.offsets_;
}

std::vector<double> AcquisitionGeom::offsets() const {
  std::vector<double> out(receivers);
  for (std::size_t i = 0; i < receivers; ++i) {
    out[i] = near_offset + spacing * static_cast<double>(i);
  }
  return out;
}

}  // namespace storseismic
