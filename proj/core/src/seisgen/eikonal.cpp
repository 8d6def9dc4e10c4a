#include "storseismic/seisgen/eikonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "storseismic/errors.hpp"

namespace storseismic {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Larger root of (t - a)^2 / dx^2 + (t - b)^2 / dz^2 = s^2, falling back to
// the one-sided update when the two-sided root is not upwind of both.
double solve_update(double a, double b, double s, double dx, double dz) {
  const double one_sided = std::min(a + s * dx, b + s * dz);
  if (a == kInf || b == kInf) {
    return one_sided;
  }
  const double wx = 1.0 / (dx * dx);
  const double wz = 1.0 / (dz * dz);
  const double qa = wx + wz;
  const double qb = a * wx + b * wz;
  const double qc = a * a * wx + b * b * wz - s * s;
  const double disc = qb * qb - qa * qc;
  if (disc < 0.0) {
    return one_sided;
  }
  const double t = (qb + std::sqrt(disc)) / qa;
  if (t < std::max(a, b)) {
    return one_sided;
  }
  return t;
}

}  // namespace

std::vector<double> TimeField::surface() const {
  return {time.begin(), time.begin() + static_cast<std::ptrdiff_t>(nx)};
}

TimeField travel_times(const GridModel& model, GridNode source,
                       std::size_t init_radius) {
  model.validate();
  if (source.ix >= model.nx || source.iz >= model.nz) {
    throw ContractError("source lies outside the grid");
  }
  const std::size_t nx = model.nx;
  const std::size_t nz = model.nz;
  TimeField field;
  field.nx = nx;
  field.nz = nz;
  field.dx = model.dx;
  field.dz = model.dz;
  field.time.assign(nx * nz, kInf);
  field.accepted_order.reserve(nx * nz);

  std::vector<double> slowness(nx * nz);
  for (std::size_t i = 0; i < slowness.size(); ++i) {
    slowness[i] = 1.0 / model.velocity[i];
  }
  std::vector<char> accepted(nx * nz, 0);

  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;

  const double s0 = slowness[source.iz * nx + source.ix];
  const auto r = static_cast<std::ptrdiff_t>(init_radius);
  for (std::ptrdiff_t diz = -r; diz <= r; ++diz) {
    for (std::ptrdiff_t dix = -r; dix <= r; ++dix) {
      const auto ix = static_cast<std::ptrdiff_t>(source.ix) + dix;
      const auto iz = static_cast<std::ptrdiff_t>(source.iz) + diz;
      if (ix < 0 || iz < 0 || ix >= static_cast<std::ptrdiff_t>(nx) ||
          iz >= static_cast<std::ptrdiff_t>(nz)) {
        continue;
      }
      if (dix * dix + diz * diz > r * r) continue;
      const double ddx = static_cast<double>(dix) * model.dx;
      const double ddz = static_cast<double>(diz) * model.dz;
      const std::size_t idx =
          static_cast<std::size_t>(iz) * nx + static_cast<std::size_t>(ix);
      field.time[idx] = std::sqrt(ddx * ddx + ddz * ddz) * s0;
      heap.emplace(field.time[idx], idx);
    }
  }

  auto known = [&](std::size_t idx) {
    return accepted[idx] ? field.time[idx] : kInf;
  };

  while (!heap.empty()) {
    const auto [t, idx] = heap.top();
    heap.pop();
    if (accepted[idx] || t > field.time[idx]) continue;
    accepted[idx] = 1;
    field.accepted_order.push_back(idx);
    const std::size_t ix = idx % nx;
    const std::size_t iz = idx / nx;
    const std::size_t nbrs[4][2] = {
        {ix - 1, iz}, {ix + 1, iz}, {ix, iz - 1}, {ix, iz + 1}};
    for (const auto& nb : nbrs) {
      const std::size_t jx = nb[0];
      const std::size_t jz = nb[1];
      if (jx >= nx || jz >= nz) continue;  // wraps for -1
      const std::size_t j = jz * nx + jx;
      if (accepted[j]) continue;
      const double a = std::min(jx > 0 ? known(j - 1) : kInf,
                                jx + 1 < nx ? known(j + 1) : kInf);
      const double b = std::min(jz > 0 ? known(j - nx) : kInf,
                                jz + 1 < nz ? known(j + nx) : kInf);
      const double candidate = solve_update(a, b, slowness[j], model.dx, model.dz);
      if (candidate < field.time[j]) {
        field.time[j] = candidate;
        heap.emplace(candidate, j);
      }
    }
  }
  return field;
}

std::vector<std::uint16_t> first_break_labels(std::span<const double> times,
                                              double dt, std::size_t samples) {
  if (!(dt > 0.0)) {
    throw ContractError("first_break_labels needs dt > 0");
  }
  if (samples == 0 || samples > 65536) {
    throw ContractError("sample count must lie in [1, 65536]");
  }
  std::vector<std::uint16_t> out(times.size());
  const double last = static_cast<double>(samples - 1);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double idx = std::round(times[i] / dt);
    out[i] = static_cast<std::uint16_t>(std::isnan(idx) ? last
                                                        : std::clamp(idx, 0.0, last));
  }
  return out;
}

}  // namespace storseismic
