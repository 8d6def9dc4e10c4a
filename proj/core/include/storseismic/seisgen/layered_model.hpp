#pragma once

#include <cstddef>
#include <vector>

#include "storseismic/numerics/random.hpp"

namespace storseismic {

//! Horizontally layered earth described in vertical two-way time. The last
//! layer is a half-space as far as reflections go: no interface below it.
struct LayeredModel {
  std::vector<double> velocities;       // m/s, top to bottom
  std::vector<double> two_way_times;    // s, per layer

  std::size_t layers() const { return velocities.size(); }
  //! Two-way time to the bottom of layer `i` (0-based).
  double interface_time(std::size_t i) const;
  //! Throws ContractError on non-positive entries or mismatched lengths.
  void validate() const;
};

struct LayeredModelBounds {
  std::size_t min_layers = 2;
  std::size_t max_layers = 8;
  double min_velocity = 1500.0;
  double max_velocity = 4500.0;
  //! Total two-way time the layers span (usually T * dt).
  double total_time = 1.0;
  //! Thinnest layer, in seconds of two-way time.
  double min_layer_time = 0.04;
  //! Probability that each next layer is faster than the one above.
  double increase_probability = 0.5;
};

//! Random model: layer count uniform in [min, max], interface times uniform
//! with a minimum spacing, velocities uniform in bounds. With
//! increase_probability > 0.5 velocity tends to grow with depth.
LayeredModel random_layered_model(Rng& rng, const LayeredModelBounds& bounds);

//! RMS velocity down to the bottom of layer n (1-based):
//! sqrt(sum_i V_i^2 dt_i / sum_i dt_i) over i = 1..n.
double vrms(const LayeredModel& model, std::size_t n);

//! Interval velocity at each sample time k * dt (k < samples); samples below
//! the last interface take the last layer's velocity.
std::vector<double> interval_velocity_profile(const LayeredModel& model,
                                              double dt, std::size_t samples);

//! RMS velocity from the surface to each sample time k * dt, integrating
//! partial layers; sample 0 takes V_1.
std::vector<double> vrms_profile(const LayeredModel& model, double dt,
                                 std::size_t samples);

}  // namespace storseismic
