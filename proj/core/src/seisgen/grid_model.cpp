#include "storseismic/seisgen/grid_model.hpp"

#include <algorithm>
#include <cmath>

#include "storseismic/errors.hpp"

namespace storseismic {

GridModel::GridModel(std::size_t nx_, std::size_t nz_, double dx_, double dz_,
                     double fill, double origin)
    : nx(nx_), nz(nz_), dx(dx_), dz(dz_), origin_x(origin),
      velocity(nx_ * nz_, fill) {}

void GridModel::validate() const {
  if (nx == 0 || nz == 0 || velocity.size() != nx * nz) {
    throw ContractError("grid model size does not match its velocity buffer");
  }
  if (!(dx > 0.0) || !(dz > 0.0)) {
    throw ContractError("grid spacing must be positive");
  }
  for (double v : velocity) {
    if (!(v > 0.0)) {
      throw ContractError("grid velocities must be positive");
    }
  }
}

GridModel grid_from_layered(const LayeredModel& model, double width,
                            double spacing, double origin_x) {
  model.validate();
  std::vector<double> bottoms(model.layers());
  double depth = 0.0;
  for (std::size_t i = 0; i < model.layers(); ++i) {
    depth += model.velocities[i] * model.two_way_times[i] / 2.0;
    bottoms[i] = depth;
  }
  const auto nx = static_cast<std::size_t>(std::ceil(width / spacing)) + 1;
  const auto nz = static_cast<std::size_t>(std::ceil(depth / spacing)) + 1;
  GridModel grid(nx, nz, spacing, spacing, model.velocities[0], origin_x);
  std::size_t layer = 0;
  for (std::size_t iz = 0; iz < nz; ++iz) {
    const double z = static_cast<double>(iz) * spacing;
    while (layer + 1 < model.layers() && z >= bottoms[layer]) ++layer;
    for (std::size_t ix = 0; ix < nx; ++ix) {
      grid.at(ix, iz) = model.velocities[layer];
    }
  }
  return grid;
}

GridModel random_grid_model(Rng& rng, const GridModelBounds& b) {
  if (b.nx == 0 || b.nz == 0 || !(b.spacing > 0.0)) {
    throw ContractError("invalid grid bounds");
  }
  const LayeredModel base = random_layered_model(rng, b.layers);
  const double depth = static_cast<double>(b.nz - 1) * b.spacing;
  const double width = static_cast<double>(b.nx - 1) * b.spacing;
  double total_time = 0.0;
  for (double t : base.two_way_times) total_time += t;

  // Interface depths proportional to the layer times, each with its own dip
  // about the grid centre.
  std::vector<double> tops;
  std::vector<double> dips;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < base.layers(); ++i) {
    acc += base.two_way_times[i];
    tops.push_back(acc / total_time * depth);
    dips.push_back(rng.uniform(-b.max_dip, b.max_dip));
  }

  GridModel grid(b.nx, b.nz, b.spacing, b.spacing);
  for (std::size_t ix = 0; ix < b.nx; ++ix) {
    const double x = static_cast<double>(ix) * b.spacing - width / 2.0;
    for (std::size_t iz = 0; iz < b.nz; ++iz) {
      const double z = static_cast<double>(iz) * b.spacing;
      std::size_t layer = 0;
      while (layer < tops.size() && z >= tops[layer] + dips[layer] * x) ++layer;
      grid.at(ix, iz) = base.velocities[layer];
    }
  }

  for (std::size_t k = 0; k < b.blobs; ++k) {
    const double cx = rng.uniform(0.0, width);
    const double cz = rng.uniform(0.0, depth);
    const double sigma = rng.uniform(5.0, 20.0) * b.spacing;
    const double amp = rng.uniform(-b.blob_amplitude, b.blob_amplitude);
    for (std::size_t iz = 0; iz < b.nz; ++iz) {
      for (std::size_t ix = 0; ix < b.nx; ++ix) {
        const double ddx = static_cast<double>(ix) * b.spacing - cx;
        const double ddz = static_cast<double>(iz) * b.spacing - cz;
        const double w = std::exp(-(ddx * ddx + ddz * ddz) / (2 * sigma * sigma));
        grid.at(ix, iz) *= 1.0 + amp * w;
      }
    }
  }
  for (auto& v : grid.velocity) v = std::max(v, 100.0);
  return grid;
}

}  // namespace storseismic
