#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "storseismic/seisgen/grid_model.hpp"

namespace storseismic {

struct TimeField {
  std::size_t nx = 0;
  std::size_t nz = 0;
  double dx = 0.0;
  double dz = 0.0;
  std::vector<double> time;  // iz * nx + ix, seconds
  //! Node indices in the order the march froze them.
  std::vector<std::size_t> accepted_order;

  double at(std::size_t ix, std::size_t iz) const { return time[iz * nx + ix]; }
  //! Times along iz = 0.
  std::vector<double> surface() const;
};

struct GridNode {
  std::size_t ix = 0;
  std::size_t iz = 0;
};

//! First-order fast marching solution of |grad t| = 1 / v from a point
//! source, 4-neighbour upwind stencil with the quadratic update.
//!
//! Nodes within `init_radius` cells of the source are seeded with the exact
//! straight-ray time through the source velocity, which removes most of the
//! point-source singularity error. Set it to 0 for a bare one-node start.
TimeField travel_times(const GridModel& model, GridNode source,
                       std::size_t init_radius = 5);

//! round(t / dt) clipped to [0, samples).
std::vector<std::uint16_t> first_break_labels(std::span<const double> times,
                                              double dt, std::size_t samples);

}  // namespace storseismic
