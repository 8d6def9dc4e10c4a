#include <algorithm>
#include <array>
#include <cmath>

#include "storseismic/errors.hpp"
#include "storseismic/seisgen/synthesis.hpp"

namespace storseismic {
namespace {

void add_field_proxy(ShotGather& out, const ShotGather& d, Rng& rng) {
  const std::size_t nx = d.traces();
  const std::size_t nt = d.samples();
  const double sd = d.stddev();
  const double peak = d.max_abs();

  // 1. Colored noise.
  std::vector<double> white(nx * nt);
  for (auto& w : white) w = rng.normal();
  constexpr std::array<double, 5> kTime = {1.0 / 16, 4.0 / 16, 6.0 / 16,
                                           4.0 / 16, 1.0 / 16};
  constexpr std::array<double, 3> kSpace = {0.25, 0.5, 0.25};
  std::vector<double> along(nx * nt, 0.0);
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t t = 0; t < nt; ++t) {
      double acc = 0.0;
      for (std::size_t k = 0; k < kTime.size(); ++k) {
        const auto tt = static_cast<std::ptrdiff_t>(t + k) - 2;
        if (tt >= 0 && tt < static_cast<std::ptrdiff_t>(nt)) {
          acc += kTime[k] * white[x * nt + static_cast<std::size_t>(tt)];
        }
      }
      along[x * nt + t] = acc;
    }
  }
  std::vector<double> colored(nx * nt, 0.0);
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t t = 0; t < nt; ++t) {
      double acc = 0.0;
      for (std::size_t k = 0; k < kSpace.size(); ++k) {
        const auto xx = static_cast<std::ptrdiff_t>(x + k) - 1;
        if (xx >= 0 && xx < static_cast<std::ptrdiff_t>(nx)) {
          acc += kSpace[k] * along[static_cast<std::size_t>(xx) * nt + t];
        }
      }
      colored[x * nt + t] = acc;
    }
  }
  double sq = 0.0;
  for (double c : colored) sq += c * c;
  const double colored_sd = std::sqrt(sq / static_cast<double>(colored.size()));
  const double gain = colored_sd > 0.0 ? 0.5 * sd / colored_sd : 0.0;
  auto amps = out.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    amps[i] += static_cast<float>(gain * colored[i]);
  }

  // 2. Linear coda events.
  const double length = static_cast<double>(nt) * d.dt();
  for (int e = 0; e < 3; ++e) {
    const double intercept = rng.uniform(0.0, 0.8 * length);
    const double velocity = rng.uniform(800.0, 2500.0);
    const double amp = rng.uniform(0.1, 0.3) * peak * (rng.bernoulli(0.5) ? 1.0 : -1.0);
    for (std::size_t x = 0; x < nx; ++x) {
      const double te = intercept + std::abs(d.offsets()[x]) / velocity;
      auto trace = out.trace(x);
      for (std::size_t t = 0; t < nt; ++t) {
        const double tau = static_cast<double>(t) * d.dt() - te;
        if (std::abs(tau) < 0.25) {
          trace[t] += static_cast<float>(amp * ricker(tau, 12.0));
        }
      }
    }
  }

  // 3. Trace gain jitter.
  for (std::size_t x = 0; x < nx; ++x) {
    const double g = std::clamp(1.0 + 0.15 * rng.normal(), 0.5, 1.5);
    for (auto& a : out.trace(x)) a = static_cast<float>(a * g);
  }
  out.set_domain(Domain::kFieldProxy);
}

}  // namespace

ShotGather add_noise(const ShotGather& d, const NoiseSpec& spec, Rng& rng) {
  ShotGather out = d;
  if (spec.kind == NoiseSpec::Kind::kFieldProxy) {
    add_field_proxy(out, d, rng);
    return out;
  }
  if (spec.sigma_mult < 0.0) {
    throw ContractError("noise sigma multiplier must be nonnegative");
  }
  if (spec.sigma_mult == 0.0) {
    return out;
  }
  const double sigma = spec.sigma_mult * d.stddev();
  for (auto& a : out.amplitudes()) {
    a = static_cast<float>(a + sigma * rng.normal());
  }
  return out;
}

}  // namespace storseismic
