#include "storseismic/seisgen/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "storseismic/errors.hpp"
#include "storseismic/seisgen/eikonal.hpp"
#include "storseismic/seisgen/grid_model.hpp"

namespace storseismic {
namespace {

// Adds amp * ricker(t - t_event) to one trace, touching only the samples
// where the wavelet is non-negligible.
void add_wavelet(std::span<float> trace, double dt, double t_event, double amp,
                 double peak_hz) {
  const double half_width = 3.0 / peak_hz;
  const auto n = static_cast<std::ptrdiff_t>(trace.size());
  const auto first = std::max<std::ptrdiff_t>(
      0, static_cast<std::ptrdiff_t>(std::floor((t_event - half_width) / dt)));
  const auto last = std::min<std::ptrdiff_t>(
      n - 1, static_cast<std::ptrdiff_t>(std::ceil((t_event + half_width) / dt)));
  for (std::ptrdiff_t k = first; k <= last; ++k) {
    const double t = static_cast<double>(k) * dt;
    trace[static_cast<std::size_t>(k)] +=
        static_cast<float>(amp * ricker(t - t_event, peak_hz));
  }
}

std::vector<double> eikonal_first_arrivals(const LayeredModel& model,
                                           const std::vector<double>& offsets,
                                           double spacing) {
  const double width = offsets.back() + 2.0 * spacing;
  const GridModel grid = grid_from_layered(model, width, spacing);
  const TimeField field = travel_times(grid, GridNode{0, 0});
  std::vector<double> out(offsets.size());
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    const double pos = std::abs(offsets[i]) / spacing;
    const auto i0 = std::min(static_cast<std::size_t>(pos), grid.nx - 2);
    const double w = pos - static_cast<double>(i0);
    out[i] = (1.0 - w) * field.at(i0, 0) + w * field.at(i0 + 1, 0);
  }
  return out;
}

}  // namespace

double ricker(double t, double peak_hz) {
  const double a = std::numbers::pi * std::numbers::pi * peak_hz * peak_hz * t * t;
  return (1.0 - 2.0 * a) * std::exp(-a);
}

SynthResult synth_gather(const LayeredModel& model, const AcquisitionGeom& geom,
                         std::size_t samples, double dt,
                         const SynthOptions& options) {
  model.validate();
  if (samples == 0 || !(dt > 0.0)) {
    throw ContractError("synth_gather needs samples > 0 and dt > 0");
  }
  if (geom.receivers == 0) {
    throw ContractError("synth_gather needs at least one receiver");
  }
  if (!(options.peak_hz > 0.0)) {
    throw ContractError("wavelet peak frequency must be positive");
  }
  const std::vector<double> offsets = geom.offsets();
  ShotGather gather(geom.receivers, samples, dt, offsets);

  for (std::size_t i = 0; i + 1 < model.layers(); ++i) {
    const double v1 = model.velocities[i];
    const double v2 = model.velocities[i + 1];
    const double r = (v2 - v1) / (v2 + v1);
    if (r == 0.0) continue;
    const double t0 = model.interface_time(i);
    const double v = vrms(model, i + 1);
    for (std::size_t x = 0; x < offsets.size(); ++x) {
      const double t = std::sqrt(t0 * t0 + offsets[x] * offsets[x] / (v * v));
      add_wavelet(gather.trace(x), dt, t, r, options.peak_hz);
    }
  }

  std::vector<double> first_arrival(offsets.size());
  if (options.first_arrivals == FirstArrivalModel::kEikonal) {
    first_arrival = eikonal_first_arrivals(model, offsets, options.eikonal_spacing);
  } else {
    for (std::size_t x = 0; x < offsets.size(); ++x) {
      first_arrival[x] = std::abs(offsets[x]) / model.velocities[0];
    }
  }
  for (std::size_t x = 0; x < offsets.size(); ++x) {
    add_wavelet(gather.trace(x), dt, first_arrival[x], options.direct_amplitude,
                options.peak_hz);
  }
  if (options.normalize) {
    gather.normalize();
  }

  GatherLabels labels;
  labels.interval_velocity = interval_velocity_profile(model, dt, samples);
  labels.vrms = vrms_profile(model, dt, samples);
  labels.first_break = first_break_labels(first_arrival, dt, samples);
  labels.first_arrival_time = std::move(first_arrival);
  return {std::move(gather), std::move(labels)};
}

AcquisitionGeom GenerationPreset::geometry() const {
  return AcquisitionGeom{traces, near_offset, spacing, 0.0};
}

LayeredModelBounds GenerationPreset::model_bounds() const {
  LayeredModelBounds b;
  b.total_time = static_cast<double>(samples) * dt;
  return b;
}

GenerationPreset generation_preset(const std::string& name) {
  GenerationPreset p;
  p.name = name;
  if (name == "snist") {
    p.traces = 20;
    p.samples = 271;
    p.dt = 0.008;
    p.spacing = 100.0;
    p.peak_hz = 15.0;
  } else if (name == "field") {
    p.traces = 324;
    p.samples = 376;
    p.dt = 0.016;
    p.spacing = 12.5;
    p.peak_hz = 10.0;
  } else if (name == "desk") {
    p.traces = 32;
    p.samples = 128;
    p.dt = 0.008;
    p.spacing = 12.5;
    p.peak_hz = 15.0;
  } else {
    throw std::invalid_argument("unknown generation preset '" + name +
                                "' (expected snist, field or desk)");
  }
  return p;
}

GeneratedSample generate_sample(const GenerationPreset& preset,
                                std::uint64_t seed, std::uint64_t index,
                                const SynthOptions& options) {
  Rng rng = Rng::stream(seed, index);
  LayeredModel model = random_layered_model(rng, preset.model_bounds());
  SynthOptions opts = options;
  opts.peak_hz = preset.peak_hz;
  SynthResult synth = synth_gather(model, preset.geometry(), preset.samples,
                                   preset.dt, opts);
  return {std::move(model), std::move(synth)};
}

GeneratedSample generate_field_proxy_sample(const GenerationPreset& preset,
                                            std::uint64_t seed,
                                            std::uint64_t index,
                                            const SynthOptions& options) {
  GeneratedSample sample = generate_sample(preset, seed, index, options);
  // Separate stream so the clean part matches generate_sample exactly.
  Rng rng = Rng::stream(seed ^ kFieldProxyStreamKey, index);
  ShotGather noisy =
      add_noise(sample.synth.gather, NoiseSpec{NoiseSpec::Kind::kFieldProxy, 0.0}, rng);
  noisy.normalize();
  sample.synth.gather = std::move(noisy);
  return sample;
}

}  // namespace storseismic
