#pragma once

#include <cstddef>
#include <vector>

#include "storseismic/numerics/random.hpp"
#include "storseismic/seisgen/layered_model.hpp"

namespace storseismic {

//! Velocity on a regular 2D grid. Node (ix, iz) sits at
//! (origin_x + ix * dx, iz * dz); storage is row-major in z (iz * nx + ix).
struct GridModel {
  std::size_t nx = 0;
  std::size_t nz = 0;
  double dx = 10.0;
  double dz = 10.0;
  double origin_x = 0.0;
  std::vector<double> velocity;

  GridModel() = default;
  GridModel(std::size_t nx, std::size_t nz, double dx, double dz,
            double fill = 2000.0, double origin_x = 0.0);

  double& at(std::size_t ix, std::size_t iz) { return velocity[iz * nx + ix]; }
  double at(std::size_t ix, std::size_t iz) const {
    return velocity[iz * nx + ix];
  }
  //! Throws ContractError when sizes disagree or any velocity is <= 0.
  void validate() const;
};

//! Depth-converts a layered model (thickness V_i * dt_i / 2) onto a grid of
//! `width` metres starting at origin_x, spacing h, deep enough for every
//! layer.
GridModel grid_from_layered(const LayeredModel& model, double width,
                            double spacing, double origin_x = 0.0);

struct GridModelBounds {
  std::size_t nx = 201;
  std::size_t nz = 101;
  double spacing = 10.0;
  LayeredModelBounds layers;
  //! Number of smooth Gaussian velocity perturbations.
  std::size_t blobs = 4;
  //! Peak relative amplitude of each perturbation.
  double blob_amplitude = 0.1;
  //! Maximum interface dip, metres of depth change per metre of x.
  double max_dip = 0.05;
};

//! Layered model with mildly dipping interfaces plus smooth Gaussian
//! perturbations. An approximation of a generic random-earth sampler.
GridModel random_grid_model(Rng& rng, const GridModelBounds& bounds);

}  // namespace storseismic
