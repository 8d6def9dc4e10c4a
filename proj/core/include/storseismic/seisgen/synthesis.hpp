#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "storseismic/numerics/random.hpp"
#include "storseismic/seisgen/gather.hpp"
#include "storseismic/seisgen/layered_model.hpp"

// Convolutional shot-gather synthesis. This is a deliberately simple stand-in
// for wave-equation modeling: primaries only, each reflection a Ricker
// wavelet placed on its NMO hyperbola t(x) = sqrt(t0^2 + x^2 / Vrms^2) with
// the velocity-only reflection coefficient (V2 - V1) / (V2 + V1), plus a
// direct arrival. Labels are therefore exact.

namespace storseismic {

//! Zero-phase Ricker wavelet (1 - 2 pi^2 f^2 t^2) exp(-pi^2 f^2 t^2).
double ricker(double t, double peak_hz);

enum class FirstArrivalModel : std::uint8_t {
  //! Direct wave along the surface, t = offset / V1.
  kDirect = 0,
  //! Fast-marching travel times through the depth-converted model, which
  //! also captures head waves that overtake the direct wave.
  kEikonal = 1,
};

struct SynthOptions {
  double peak_hz = 25.0;
  double direct_amplitude = 0.5;
  FirstArrivalModel first_arrivals = FirstArrivalModel::kDirect;
  //! Cell size for the eikonal grid, metres.
  double eikonal_spacing = 10.0;
  bool normalize = true;
};

struct GatherLabels {
  std::vector<double> interval_velocity;  // m/s on the T grid
  std::vector<double> vrms;               // m/s on the T grid
  std::vector<std::uint16_t> first_break; // sample index per trace
  std::vector<double> first_arrival_time; // s per trace
};

struct SynthResult {
  ShotGather gather;
  GatherLabels labels;
};

//! Synthesizes one gather of `samples` x `dt` for the given model and
//! receiver line. Events past the record end are truncated.
SynthResult synth_gather(const LayeredModel& model, const AcquisitionGeom& geom,
                         std::size_t samples, double dt,
                         const SynthOptions& options = {});

struct NoiseSpec {
  enum class Kind : std::uint8_t { kGaussian, kFieldProxy };
  Kind kind = Kind::kGaussian;
  //! Gaussian only: noise std as a multiple of the gather's std.
  double sigma_mult = 1.0;
};

//! Gaussian: i.i.d. N(0, (sigma_mult * std(d))^2) per sample.
//!
//! Field proxy, a fixed recipe emulating a second acquisition domain:
//!   1. colored noise: white N(0,1) smoothed along time by the binomial
//!      filter [1 4 6 4 1]/16 and across traces by [1 2 1]/4, rescaled to
//!      0.5 * std(d);
//!   2. three linear coda events with intercept U(0, 0.8 * record length),
//!      apparent velocity U(800, 2500) m/s, 12 Hz Ricker, amplitude
//!      U(0.1, 0.3) * max|d| and random polarity;
//!   3. per-trace gain 1 + 0.15 N(0,1), clamped to [0.5, 1.5].
//! The output is tagged Domain::kFieldProxy; amplitudes are not renormalized.
ShotGather add_noise(const ShotGather& d, const NoiseSpec& spec, Rng& rng);

//! Acquisition/recording presets.
struct GenerationPreset {
  std::string name;
  std::size_t traces = 32;
  std::size_t samples = 128;
  double dt = 0.008;
  double near_offset = 0.0;
  double spacing = 50.0;
  double peak_hz = 25.0;

  AcquisitionGeom geometry() const;
  LayeredModelBounds model_bounds() const;
};

//! "snist" (X=20, T=271, dt=8 ms), "field" (X=324, T=376, dt=16 ms) and
//! "desk" (X=32, T=128, dt=8 ms, 12.5 m spacing, 15 Hz).
GenerationPreset generation_preset(const std::string& name);

//! One fully labelled clean sample: gather, labels and the model behind it.
struct GeneratedSample {
  LayeredModel model;
  SynthResult synth;
};

//! Sample `index` of a corpus. Each index draws from its own stream
//! Rng::stream(seed, index) so generation order never matters.
GeneratedSample generate_sample(const GenerationPreset& preset,
                                std::uint64_t seed, std::uint64_t index,
                                const SynthOptions& options = {});

//! XORed into the corpus seed to key the field-proxy noise streams.
inline constexpr std::uint64_t kFieldProxyStreamKey = 0x6669656c64ULL;

//! Clean synthesis followed by the field-proxy recipe and renormalization.
GeneratedSample generate_field_proxy_sample(const GenerationPreset& preset,
                                            std::uint64_t seed,
                                            std::uint64_t index,
                                            const SynthOptions& options = {});

struct MixedCorpus {
  std::vector<ShotGather> gathers;
  std::size_t from_a = 0;       // synthetic-domain gathers taken from A
  std::size_t from_b = 0;       // field-proxy gathers taken from B
  std::size_t synthesized = 0;  // extra domain-A gathers made by top-up
};

//! Corpus of `total` gathers of which round(field_fraction * total) come from
//! domainB. The rest come from domainA, topped up with `synthesize_extra(i)`
//! when domainA is short. Result is shuffled. Throws ContractError when a
//! domain cannot supply its share.
MixedCorpus build_mixed_corpus(
    std::span<const ShotGather> domain_a, std::span<const ShotGather> domain_b,
    double field_fraction, std::size_t total, Rng& rng,
    const std::function<ShotGather(std::size_t)>& synthesize_extra = {});

}  // namespace storseismic
