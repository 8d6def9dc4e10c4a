#include "storseismic/seisgen/layered_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "storseismic/errors.hpp"

namespace storseismic {

double LayeredModel::interface_time(std::size_t i) const {
  double t = 0.0;
  for (std::size_t j = 0; j <= i && j < two_way_times.size(); ++j) {
    t += two_way_times[j];
  }
  return t;
}

void LayeredModel::validate() const {
  if (velocities.empty() || velocities.size() != two_way_times.size()) {
    throw ContractError("layered model needs one two-way time per velocity");
  }
  for (std::size_t i = 0; i < velocities.size(); ++i) {
    if (!(velocities[i] > 0.0) || !(two_way_times[i] > 0.0)) {
      throw ContractError("layer velocities and times must be positive");
    }
  }
}

LayeredModel random_layered_model(Rng& rng, const LayeredModelBounds& b) {
  if (b.min_layers == 0 || b.min_layers > b.max_layers) {
    throw ContractError("invalid layer count bounds");
  }
  if (!(b.min_velocity > 0.0) || b.min_velocity > b.max_velocity) {
    throw ContractError("invalid velocity bounds");
  }
  std::size_t n = static_cast<std::size_t>(
      rng.uniform_int(static_cast<std::int64_t>(b.min_layers),
                      static_cast<std::int64_t>(b.max_layers)));
  // Shrink the count if the time span cannot hold that many minimum layers.
  const auto fit = static_cast<std::size_t>(
      std::max(1.0, std::floor(b.total_time / b.min_layer_time)));
  n = std::min(n, fit);

  LayeredModel m;
  m.velocities.resize(n);
  m.two_way_times.resize(n);

  // n - 1 interfaces in (0, total): draw the free time left after reserving
  // the minimum thickness for every layer, then sort.
  const double slack = b.total_time - b.min_layer_time * static_cast<double>(n);
  std::vector<double> cuts(n - 1);
  for (auto& c : cuts) c = rng.uniform() * slack;
  std::sort(cuts.begin(), cuts.end());
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double cut = i + 1 < n ? cuts[i] : slack;
    m.two_way_times[i] = b.min_layer_time + (cut - prev);
    prev = cut;
  }

  m.velocities[0] = rng.uniform(b.min_velocity, b.max_velocity);
  for (std::size_t i = 1; i < n; ++i) {
    const double v = m.velocities[i - 1];
    if (rng.bernoulli(b.increase_probability)) {
      m.velocities[i] = rng.uniform(v, b.max_velocity);
    } else {
      m.velocities[i] = rng.uniform(b.min_velocity, v);
    }
  }
  return m;
}

double vrms(const LayeredModel& model, std::size_t n) {
  model.validate();
  if (n < 1 || n > model.layers()) {
    throw std::out_of_range("vrms layer index " + std::to_string(n) +
                            " outside [1, " + std::to_string(model.layers()) +
                            "]");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += model.velocities[i] * model.velocities[i] * model.two_way_times[i];
    den += model.two_way_times[i];
  }
  return std::sqrt(num / den);
}

std::vector<double> interval_velocity_profile(const LayeredModel& model,
                                              double dt, std::size_t samples) {
  model.validate();
  std::vector<double> out(samples);
  std::size_t layer = 0;
  double bottom = model.two_way_times[0];
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = static_cast<double>(k) * dt;
    while (layer + 1 < model.layers() && t >= bottom) {
      ++layer;
      bottom += model.two_way_times[layer];
    }
    out[k] = model.velocities[layer];
  }
  return out;
}

std::vector<double> vrms_profile(const LayeredModel& model, double dt,
                                 std::size_t samples) {
  model.validate();
  std::vector<double> out(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = static_cast<double>(k) * dt;
    if (t == 0.0) {
      out[k] = model.velocities[0];
      continue;
    }
    double num = 0.0;
    double covered = 0.0;
    for (std::size_t i = 0; i < model.layers() && covered < t; ++i) {
      const bool last = i + 1 == model.layers();
      const double span =
          last ? t - covered : std::min(model.two_way_times[i], t - covered);
      num += model.velocities[i] * model.velocities[i] * span;
      covered += span;
    }
    out[k] = std::sqrt(num / covered);
  }
  return out;
}

}  // namespace storseismic
