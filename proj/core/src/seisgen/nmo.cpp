#include "storseismic/seisgen/nmo.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "storseismic/errors.hpp"

namespace storseismic {
namespace {

void check_profile(const ShotGather& d, std::span<const double> vrms) {
  if (vrms.size() != d.samples()) {
    throw ShapeError("vrms profile has " + std::to_string(vrms.size()) +
                     " samples, gather has " + std::to_string(d.samples()));
  }
  for (double v : vrms) {
    if (!(v > 0.0)) {
      throw ContractError("vrms profile must be positive");
    }
  }
}

double offset_limit(const ShotGather& d, const NmoOptions& options) {
  double max_offset = 0.0;
  for (double x : d.offsets()) max_offset = std::max(max_offset, std::abs(x));
  return options.offset_fraction * max_offset;
}

// Moveout time for zero-offset time t0 at offset x, and whether the sample
// survives the stretch mute.
struct Moveout {
  double t;
  bool kept;
};

Moveout moveout(double t0, double x, double v, double stretch_mute) {
  const double t = std::sqrt(t0 * t0 + (x * x) / (v * v));
  if (t0 == 0.0) {
    return {t, x == 0.0 || std::isinf(v)};
  }
  return {t, t / t0 - 1.0 <= stretch_mute};
}

float interpolate(std::span<const float> trace, double pos) {
  const double last = static_cast<double>(trace.size() - 1);
  if (pos < 0.0 || pos > last) return 0.0f;
  const auto i0 = static_cast<std::size_t>(pos);
  if (i0 + 1 == trace.size()) return trace[i0];
  const double w = pos - static_cast<double>(i0);
  return static_cast<float>((1.0 - w) * trace[i0] + w * trace[i0 + 1]);
}

}  // namespace

ShotGather nmo_correct(const ShotGather& d, std::span<const double> vrms,
                       const NmoOptions& options) {
  check_profile(d, vrms);
  ShotGather out = d;
  const double limit = offset_limit(d, options);
  const double dt = d.dt();
  for (std::size_t x = 0; x < d.traces(); ++x) {
    const double off = d.offsets()[x];
    auto dst = out.trace(x);
    if (std::abs(off) > limit) {
      if (options.exclude_far) std::fill(dst.begin(), dst.end(), 0.0f);
      continue;
    }
    const auto src = d.trace(x);
    for (std::size_t k = 0; k < d.samples(); ++k) {
      const double t0 = static_cast<double>(k) * dt;
      const Moveout m = moveout(t0, off, vrms[k], options.stretch_mute);
      dst[k] = m.kept ? interpolate(src, m.t / dt) : 0.0f;
    }
  }
  return out;
}

ShotGather inverse_nmo(const ShotGather& d, std::span<const double> vrms,
                       const NmoOptions& options) {
  check_profile(d, vrms);
  ShotGather out = d;
  const double limit = offset_limit(d, options);
  const double dt = d.dt();
  const std::size_t n = d.samples();
  std::vector<Moveout> map(n);
  for (std::size_t x = 0; x < d.traces(); ++x) {
    const double off = d.offsets()[x];
    auto dst = out.trace(x);
    if (std::abs(off) > limit) {
      if (options.exclude_far) std::fill(dst.begin(), dst.end(), 0.0f);
      continue;
    }
    const auto src = d.trace(x);
    for (std::size_t k = 0; k < n; ++k) {
      map[k] = moveout(static_cast<double>(k) * dt, off, vrms[k],
                       options.stretch_mute);
    }
    std::fill(dst.begin(), dst.end(), 0.0f);
    // Walk output times and the t0 segments that bracket them together.
    std::size_t seg = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const double t = static_cast<double>(j) * dt;
      while (seg + 1 < n && map[seg + 1].t < t) ++seg;
      if (seg + 1 >= n) break;
      const Moveout& a = map[seg];
      const Moveout& b = map[seg + 1];
      if (t < a.t || t > b.t || !a.kept || !b.kept) continue;
      const double span = b.t - a.t;
      const double w = span > 0.0 ? (t - a.t) / span : 0.0;
      dst[j] = static_cast<float>((1.0 - w) * src[seg] + w * src[seg + 1]);
    }
  }
  return out;
}

}  // namespace storseismic
