#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "storseismic/errors.hpp"
#include "storseismic/seisgen/eikonal.hpp"
#include "storseismic/seisgen/grid_model.hpp"
#include "storseismic/seisgen/layered_model.hpp"
#include "storseismic/seisgen/nmo.hpp"
#include "storseismic/seisgen/synthesis.hpp"

namespace storseismic {
namespace {

long double brute_vrms(const LayeredModel& m, std::size_t n) {
  long double num = 0.0L, den = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    num += static_cast<long double>(m.velocities[i]) * m.velocities[i] * m.two_way_times[i];
    den += m.two_way_times[i];
  }
  return std::sqrt(num / den);
}

// Peak time of the largest |amplitude| within [lo, hi], refined by a
// parabola through the neighbours. Returned in samples.
double pick_peak(std::span<const float> trace, std::size_t lo, std::size_t hi) {
  hi = std::min(hi, trace.size() - 1);
  std::size_t best = lo;
  for (std::size_t k = lo; k <= hi; ++k) {
    if (std::abs(trace[k]) > std::abs(trace[best])) best = k;
  }
  if (best == 0 || best + 1 >= trace.size()) return static_cast<double>(best);
  const double a = std::abs(trace[best - 1]), b = std::abs(trace[best]), c = std::abs(trace[best + 1]);
  const double denom = a - 2 * b + c;
  return static_cast<double>(best) + (denom != 0.0 ? 0.5 * (a - c) / denom : 0.0);
}

TEST(LayeredModel, VrmsHandValue) {
  const LayeredModel m{{2000, 3000}, {1, 1}};
  EXPECT_NEAR(vrms(m, 2), std::sqrt((4e6 + 9e6) / 2), 1e-9);
  EXPECT_NEAR(vrms(m, 2), 2549.51, 0.005);
  EXPECT_EQ(vrms(m, 1), 2000.0);
  EXPECT_THROW(vrms(m, 0), std::out_of_range);
  EXPECT_THROW(vrms(m, 3), std::out_of_range);
}

TEST(LayeredModel, VrmsMatchesBruteForceOnRandomModels) {
  Rng rng(2024);
  LayeredModelBounds b;
  b.max_layers = 12;
  b.total_time = 2.0;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto m = random_layered_model(rng, b);
    for (std::size_t n = 1; n <= m.layers(); ++n) {
      worst = std::max(worst, static_cast<double>(std::abs(vrms(m, n) - brute_vrms(m, n))));
      const double lo = *std::min_element(m.velocities.begin(), m.velocities.begin() + n);
      const double hi = *std::max_element(m.velocities.begin(), m.velocities.begin() + n);
      EXPECT_GE(vrms(m, n), lo - 1e-9);
      EXPECT_LE(vrms(m, n), hi + 1e-9);
    }
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(LayeredModel, PrependingLayerAtVrmsKeepsValue) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    auto m = random_layered_model(rng, {});
    const double before = vrms(m, m.layers());
    m.velocities.insert(m.velocities.begin(), before);
    m.two_way_times.insert(m.two_way_times.begin(), rng.uniform(0.01, 0.5));
    EXPECT_NEAR(vrms(m, m.layers()), before, 1e-9 * before);
  }
}

TEST(LayeredModel, RandomModelsRespectBounds) {
  Rng rng(11);
  LayeredModelBounds b;
  b.min_velocity = 1800;
  b.max_velocity = 3200;
  b.total_time = 1.024;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto m = random_layered_model(rng, b);
    ASSERT_GE(m.layers(), b.min_layers);
    ASSERT_LE(m.layers(), b.max_layers);
    for (double v : m.velocities) {
      EXPECT_GE(v, b.min_velocity);
      EXPECT_LE(v, b.max_velocity);
    }
    for (double t : m.two_way_times) EXPECT_GE(t, b.min_layer_time - 1e-12);
  }
  b.min_layers = b.max_layers = 1;
  const auto one = random_layered_model(rng, b);
  EXPECT_EQ(one.layers(), 1u);

  Rng r1(3), r2(3);
  const auto m1 = random_layered_model(r1, {});
  const auto m2 = random_layered_model(r2, {});
  EXPECT_EQ(m1.velocities, m2.velocities);
  EXPECT_EQ(m1.two_way_times, m2.two_way_times);
}

TEST(LayeredModel, Profiles) {
  const LayeredModel m{{2000, 3000}, {0.4, 0.4}};
  const auto iv = interval_velocity_profile(m, 0.1, 10);
  EXPECT_EQ(iv[0], 2000.0);
  EXPECT_EQ(iv[3], 2000.0);
  EXPECT_EQ(iv[5], 3000.0);
  EXPECT_EQ(iv[9], 3000.0);
  const auto vr = vrms_profile(m, 0.1, 10);
  EXPECT_EQ(vr[0], 2000.0);
  EXPECT_NEAR(vr[4], 2000.0, 1e-9);
  EXPECT_NEAR(vr[8], vrms(m, 2), 1e-9);
  EXPECT_NEAR(vr[6], std::sqrt((4e6 * 0.4 + 9e6 * 0.2) / 0.6), 1e-9);
}

TEST(Synthesis, ZeroContrastHasDirectArrivalOnly) {
  const LayeredModel m{{2500, 2500, 2500}, {0.2, 0.3, 0.5}};
  AcquisitionGeom g{16, 0.0, 50.0, 0.0};
  SynthOptions opts;
  opts.normalize = false;
  const auto res = synth_gather(m, g, 128, 0.008, opts);
  ShotGather expect(16, 128, 0.008, g.offsets());
  for (std::size_t x = 0; x < 16; ++x) {
    const double tx = g.offsets()[x] / 2500.0;
    for (std::size_t k = 0; k < 128; ++k) {
      const double tau = static_cast<double>(k) * 0.008 - tx;
      const double w = std::abs(tau) <= 3.0 / 25.0 ? 0.5 * ricker(tau, 25.0) : 0.0;
      EXPECT_NEAR(res.gather.at(x, k), w, 1e-6);
    }
  }
}

TEST(Synthesis, SingleReflectorPeaksOnHyperbola) {
  const LayeredModel m{{2000, 3000}, {0.304, 0.7}};
  const AcquisitionGeom g{32, 0.0, 50.0, 0.0};
  const double dt = 0.008;
  const auto res = synth_gather(m, g, 128, dt);
  // Zero offset: exactly at t0.
  EXPECT_EQ(pick_peak(res.gather.trace(0), 30, 46), 38.0);
  for (std::size_t x = 0; x < 32; ++x) {
    const double off = g.offsets()[x];
    const double t = std::sqrt(0.304 * 0.304 + off * off / (2000.0 * 2000.0));
    if (t / dt > 125 || std::abs(t - off / 2000.0) < 0.1) continue;
    const auto k = static_cast<std::size_t>(std::lround(t / dt));
    EXPECT_NEAR(pick_peak(res.gather.trace(x), k - 3, k + 3), t / dt, 1.0) << "trace " << x;
  }
  EXPECT_LE(res.gather.max_abs(), 1.0 + 1e-6);
  EXPECT_NEAR(res.gather.max_abs(), 1.0, 1e-6);
}

TEST(Synthesis, DirectArrivalMatchesFirstBreakLabels) {
  for (auto mode : {FirstArrivalModel::kDirect, FirstArrivalModel::kEikonal}) {
    // A deep weak reflector keeps reflections clear of the direct wave.
    const LayeredModel m{{1800, 1900}, {0.9, 0.2}};
    const AcquisitionGeom g{32, 0.0, 25.0, 0.0};
    SynthOptions opts;
    opts.first_arrivals = mode;
    const auto res = synth_gather(m, g, 128, 0.008, opts);
    ASSERT_EQ(res.labels.first_break.size(), 32u);
    for (std::size_t x = 0; x < 32; ++x) {
      const std::size_t label = res.labels.first_break[x];
      const std::size_t lo = label >= 3 ? label - 3 : 0;
      const double picked = pick_peak(res.gather.trace(x), lo, label + 3);
      EXPECT_LE(std::abs(picked - static_cast<double>(label)), 1.0) << "trace " << x;
      if (x > 0) EXPECT_GE(label, res.labels.first_break[x - 1]);
    }
  }
}

TEST(Synthesis, GenerationIsDeterministicPerIndex) {
  const auto preset = generation_preset("desk");
  const auto a = generate_sample(preset, 42, 7);
  const auto b = generate_sample(preset, 42, 7);
  const auto c = generate_sample(preset, 42, 8);
  EXPECT_TRUE(std::equal(a.synth.gather.amplitudes().begin(), a.synth.gather.amplitudes().end(),
                         b.synth.gather.amplitudes().begin()));
  EXPECT_NE(a.model.velocities, c.model.velocities);
  EXPECT_EQ(a.synth.gather.traces(), 32u);
  EXPECT_EQ(a.synth.gather.samples(), 128u);
  EXPECT_EQ(generation_preset("snist").traces, 20u);
  EXPECT_EQ(generation_preset("snist").samples, 271u);
  EXPECT_EQ(generation_preset("field").traces, 324u);
  EXPECT_EQ(generation_preset("field").dt, 0.016);
  EXPECT_THROW(generation_preset("nope"), std::invalid_argument);

  const auto f1 = generate_field_proxy_sample(preset, 42, 3);
  const auto f2 = generate_field_proxy_sample(preset, 42, 3);
  EXPECT_EQ(f1.synth.gather.domain(), Domain::kFieldProxy);
  EXPECT_TRUE(std::equal(f1.synth.gather.amplitudes().begin(), f1.synth.gather.amplitudes().end(),
                         f2.synth.gather.amplitudes().begin()));
}

ShotGather big_gather(std::uint64_t seed) {
  const auto preset = generation_preset("desk");
  GenerationPreset p = preset;
  p.traces = 64;
  p.samples = 512;
  p.dt = 0.004;
  return generate_sample(p, seed, 0).synth.gather;
}

TEST(Noise, GaussianStdScales) {
  const auto d = big_gather(1);
  const double s = d.stddev();
  for (double mult : {0.5, 1.0, 2.0}) {
    Rng rng(9);
    const auto noisy = add_noise(d, {NoiseSpec::Kind::kGaussian, mult}, rng);
    EXPECT_NEAR(noisy.stddev() / (std::sqrt(1 + mult * mult) * s), 1.0, 0.05) << mult;
  }
  Rng rng(9);
  const auto same = add_noise(d, {NoiseSpec::Kind::kGaussian, 0.0}, rng);
  EXPECT_TRUE(std::equal(same.amplitudes().begin(), same.amplitudes().end(), d.amplitudes().begin()));
  EXPECT_THROW(add_noise(d, {NoiseSpec::Kind::kGaussian, -1.0}, rng), ContractError);
}

TEST(Noise, FieldProxyIsDeterministicAndTagged) {
  const auto d = big_gather(2);
  Rng r1(77), r2(77);
  const auto a = add_noise(d, {NoiseSpec::Kind::kFieldProxy, 0.0}, r1);
  const auto b = add_noise(d, {NoiseSpec::Kind::kFieldProxy, 0.0}, r2);
  EXPECT_EQ(a.domain(), Domain::kFieldProxy);
  EXPECT_TRUE(std::equal(a.amplitudes().begin(), a.amplitudes().end(), b.amplitudes().begin()));
  double diff = 0.0;
  for (std::size_t i = 0; i < d.amplitudes().size(); ++i) {
    diff = std::max(diff, static_cast<double>(std::abs(a.amplitudes()[i] - d.amplitudes()[i])));
  }
  EXPECT_GT(diff, 0.01);
}

TEST(Eikonal, ConstantVelocityMatchesDistance) {
  GridModel g(201, 201, 10.0, 10.0, 2000.0);
  const auto tf = travel_times(g, {100, 100});
  double worst = 0.0;
  for (std::size_t iz = 0; iz < 201; ++iz) {
    for (std::size_t ix = 0; ix < 201; ++ix) {
      const double r = std::hypot(static_cast<double>(ix) - 100.0, static_cast<double>(iz) - 100.0);
      if (r < 10.0) continue;
      const double exact = r * 10.0 / 2000.0;
      worst = std::max(worst, std::abs(tf.at(ix, iz) - exact) / exact);
    }
  }
  EXPECT_LE(worst, 0.03);
  EXPECT_EQ(tf.at(100, 100), 0.0);
}

TEST(Eikonal, DoublingVelocityHalvesTimesExactly) {
  Rng rng(4);
  GridModelBounds b;
  b.nx = 61;
  b.nz = 41;
  auto g = random_grid_model(rng, b);
  auto fast = g;
  for (auto& v : fast.velocity) v *= 2.0;
  const auto t1 = travel_times(g, {5, 0});
  const auto t2 = travel_times(fast, {5, 0});
  for (std::size_t i = 0; i < t1.time.size(); ++i) EXPECT_EQ(t2.time[i], 0.5 * t1.time[i]);
}

TEST(Eikonal, AcceptedTimesNeverDecrease) {
  Rng rng(6);
  GridModelBounds b;
  b.nx = 81;
  b.nz = 61;
  const auto g = random_grid_model(rng, b);
  const auto tf = travel_times(g, {40, 0});
  ASSERT_EQ(tf.accepted_order.size(), 81u * 61u);
  for (std::size_t i = 1; i < tf.accepted_order.size(); ++i) {
    EXPECT_GE(tf.time[tf.accepted_order[i]], tf.time[tf.accepted_order[i - 1]]);
  }
}

std::vector<double> dijkstra8(const GridModel& g, GridNode src) {
  std::vector<double> t(g.nx * g.nz, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  const std::size_t s = src.iz * g.nx + src.ix;
  t[s] = 0.0;
  heap.push({0.0, s});
  while (!heap.empty()) {
    const auto [d, n] = heap.top();
    heap.pop();
    if (d > t[n]) continue;
    const long ix = static_cast<long>(n % g.nx), iz = static_cast<long>(n / g.nx);
    for (long dz = -1; dz <= 1; ++dz) {
      for (long dx = -1; dx <= 1; ++dx) {
        const long jx = ix + dx, jz = iz + dz;
        if ((dx == 0 && dz == 0) || jx < 0 || jz < 0 || jx >= static_cast<long>(g.nx) ||
            jz >= static_cast<long>(g.nz)) continue;
        const std::size_t m = static_cast<std::size_t>(jz) * g.nx + static_cast<std::size_t>(jx);
        const double len = std::hypot(dx * g.dx, dz * g.dz);
        const double w = len * 0.5 * (1.0 / g.velocity[n] + 1.0 / g.velocity[m]);
        if (d + w < t[m]) {
          t[m] = d + w;
          heap.push({t[m], m});
        }
      }
    }
  }
  return t;
}

TEST(Eikonal, TwoLayerSurfaceTimesBoundedByGraphPaths) {
  GridModel g(201, 61, 10.0, 10.0, 1500.0);
  for (std::size_t iz = 30; iz < 61; ++iz) {
    for (std::size_t ix = 0; ix < 201; ++ix) g.at(ix, iz) = 3000.0;
  }
  const auto tf = travel_times(g, {0, 0});
  const auto graph = dijkstra8(g, {0, 0});
  // Three cells at the slow velocity covers both first-order and graph
  // discretization error.
  const double bound = 3.0 * 10.0 / 1500.0;
  const auto surface = tf.surface();
  for (std::size_t ix = 0; ix < 201; ++ix) {
    EXPECT_LE(surface[ix], graph[ix] + bound) << ix;
    EXPECT_GE(surface[ix], 0.9 * graph[ix] - 1e-12) << ix;
  }
  // Head wave overtakes the direct wave at long offset.
  const double direct = 2000.0 / 1500.0;
  EXPECT_LT(surface[200], direct - 0.05);
}

TEST(Eikonal, Errors) {
  GridModel g(10, 10, 10.0, 10.0, 2000.0);
  g.at(3, 3) = 0.0;
  EXPECT_THROW(travel_times(g, {0, 0}), ContractError);
  GridModel ok(10, 10, 10.0, 10.0, 2000.0);
  EXPECT_THROW(travel_times(ok, {10, 0}), ContractError);
}

TEST(FirstBreakLabels, Arithmetic) {
  const std::vector<double> t = {0.0, 0.128, 0.1279, 5.0, -0.1};
  const auto idx = first_break_labels(t, 0.016, 100);
  EXPECT_EQ(idx[0], 0);
  EXPECT_EQ(idx[1], 8);
  EXPECT_EQ(idx[2], 8);
  EXPECT_EQ(idx[3], 99);
  EXPECT_EQ(idx[4], 0);
  EXPECT_THROW(first_break_labels(t, 0.0, 100), ContractError);
}

TEST(FirstBreakLabels, MonotoneForLayeredModels) {
  const auto grid = grid_from_layered(LayeredModel{{1500, 2500, 3500}, {0.1, 0.2, 0.4}}, 1600, 10);
  const auto tf = travel_times(grid, {0, 0});
  const auto idx = first_break_labels(tf.surface(), 0.004, 500);
  for (std::size_t i = 1; i < idx.size(); ++i) EXPECT_GE(idx[i], idx[i - 1]);
}

TEST(GridModel, FromLayeredDepthConversion) {
  const auto g = grid_from_layered(LayeredModel{{2000, 3000}, {0.1, 0.2}}, 100, 10);
  // Layer 1 is 100 m thick, layer 2 300 m.
  EXPECT_EQ(g.nx, 11u);
  EXPECT_GE(g.nz, 41u);
  EXPECT_EQ(g.at(0, 5), 2000.0);
  EXPECT_EQ(g.at(0, 15), 3000.0);
  Rng rng(1);
  const auto r = random_grid_model(rng, {});
  EXPECT_NO_THROW(r.validate());
  EXPECT_EQ(r.nx, 201u);
  EXPECT_EQ(r.nz, 101u);
}

// Gather of Ricker events on exact hyperbolas for a given vrms profile.
ShotGather hyperbola_gather(const std::vector<double>& vr, const std::vector<std::size_t>& events,
                            double dt, std::size_t nt, const std::vector<double>& offsets) {
  ShotGather g(offsets.size(), nt, dt, offsets);
  for (std::size_t x = 0; x < offsets.size(); ++x) {
    for (std::size_t e : events) {
      const double t0 = static_cast<double>(e) * dt;
      const double t = std::sqrt(t0 * t0 + offsets[x] * offsets[x] / (vr[e] * vr[e]));
      for (std::size_t k = 0; k < nt; ++k) {
        g.at(x, k) += static_cast<float>(ricker(static_cast<double>(k) * dt - t, 15.0));
      }
    }
  }
  return g;
}

TEST(Nmo, ZeroOffsetAndInfiniteVelocityAreIdentity) {
  const std::vector<double> offsets = {0, 100, 200, 300};
  std::vector<double> vr(64, 2000.0);
  const auto g = hyperbola_gather(vr, {20, 40}, 0.008, 64, offsets);
  const auto out = nmo_correct(g, vr);
  EXPECT_TRUE(std::equal(out.trace(0).begin(), out.trace(0).end(), g.trace(0).begin()));
  std::vector<double> inf(64, std::numeric_limits<double>::infinity());
  const auto same = nmo_correct(g, inf);
  EXPECT_TRUE(std::equal(same.amplitudes().begin(), same.amplitudes().end(), g.amplitudes().begin()));
  EXPECT_THROW(nmo_correct(g, std::vector<double>(63, 2000.0)), ShapeError);
  EXPECT_THROW(nmo_correct(g, std::vector<double>(64, -1.0)), ContractError);
}

TEST(Nmo, FlattensIdealHyperbolas) {
  const double dt = 0.008;
  const std::size_t nt = 160;
  std::vector<double> offsets;
  for (int i = 0; i < 24; ++i) offsets.push_back(50.0 * i);
  std::vector<double> vr(nt);
  for (std::size_t k = 0; k < nt; ++k) vr[k] = 1800.0 + 6.0 * static_cast<double>(k);
  const std::vector<std::size_t> events = {40, 80, 120};
  const auto g = hyperbola_gather(vr, events, dt, nt, offsets);
  const auto out = nmo_correct(g, vr);
  for (std::size_t e : events) {
    for (std::size_t x = 0; x < offsets.size(); ++x) {
      const double t0 = static_cast<double>(e) * dt;
      const double t = std::sqrt(t0 * t0 + offsets[x] * offsets[x] / (vr[e] * vr[e]));
      if (t / t0 - 1.0 > 0.5) continue;
      EXPECT_LT(std::abs(pick_peak(out.trace(x), e - 4, e + 4) - static_cast<double>(e)), 1.0)
          << "event " << e << " trace " << x;
    }
  }
}

TEST(Nmo, StretchMuteAndOffsetFraction) {
  std::vector<double> offsets = {0, 500, 1000, 2000};
  std::vector<double> vr(50, 1500.0);
  ShotGather g(4, 50, 0.008, offsets);
  for (auto& a : g.amplitudes()) a = 1.0f;
  const auto out = nmo_correct(g, vr);
  // Trace 3 at 2000 m: t0 = 0.2 gives stretch 2.9, muted.
  EXPECT_EQ(out.at(3, 25), 0.0f);
  EXPECT_EQ(out.at(3, 0), 0.0f);
  NmoOptions half;
  half.offset_fraction = 0.5;
  const auto part = nmo_correct(g, vr, half);
  EXPECT_EQ(part.at(3, 25), 1.0f);
  half.exclude_far = true;
  const auto excl = nmo_correct(g, vr, half);
  EXPECT_EQ(excl.at(3, 25), 0.0f);
  EXPECT_EQ(excl.at(0, 49), 1.0f);
}

TEST(Nmo, InverseRoundTripWithinInterpolationBound) {
  const double dt = 0.004;
  const std::size_t nt = 256;
  std::vector<double> offsets;
  for (int i = 0; i < 16; ++i) offsets.push_back(60.0 * i);
  std::vector<double> vr(nt);
  for (std::size_t k = 0; k < nt; ++k) vr[k] = 1700.0 + 4.0 * static_cast<double>(k);
  const auto g = hyperbola_gather(vr, {60, 110, 170, 220}, dt, nt, offsets);
  const auto fwd = nmo_correct(g, vr);
  const auto back = inverse_nmo(fwd, vr);

  auto second_diff = [](std::span<const float> s) {
    double m = 0.0;
    for (std::size_t k = 1; k + 1 < s.size(); ++k) m = std::max(m, std::abs(s[k - 1] - 2.0 * s[k] + s[k + 1]));
    return m;
  };
  double bound_in = 0.0, bound_fwd = 0.0;
  for (std::size_t x = 0; x < offsets.size(); ++x) {
    bound_in = std::max(bound_in, second_diff(g.trace(x)));
    bound_fwd = std::max(bound_fwd, second_diff(fwd.trace(x)));
  }
  const double tolerance = 2.0 * (bound_in + bound_fwd) / 8.0;

  double worst = 0.0;
  for (std::size_t x = 0; x < offsets.size(); ++x) {
    const double off = offsets[x];
    auto tx = [&](std::size_t k) {
      const double t0 = static_cast<double>(k) * dt;
      return std::sqrt(t0 * t0 + off * off / (vr[k] * vr[k]));
    };
    // First t0 from which every later sample escapes the mute.
    std::size_t k_lo = nt - 1;
    while (k_lo > 0 && tx(k_lo - 1) / (static_cast<double>(k_lo - 1) * dt) - 1.0 <= 0.5) --k_lo;
    const double t_lo = tx(k_lo), t_hi = tx(nt - 1);
    for (std::size_t j = 0; j < nt; ++j) {
      const double t = static_cast<double>(j) * dt;
      if (t < t_lo || t > t_hi) continue;
      worst = std::max(worst, static_cast<double>(std::abs(back.at(x, j) - g.at(x, j))));
    }
  }
  EXPECT_LE(worst, tolerance);
  EXPECT_GT(worst, 0.0);
}

std::vector<ShotGather> domain(std::size_t n, Domain d) {
  std::vector<ShotGather> out;
  for (std::size_t i = 0; i < n; ++i) {
    ShotGather g(2, 4, 0.008, {0.0, 10.0}, d);
    g.at(0, 0) = static_cast<float>(i);
    out.push_back(g);
  }
  return out;
}

std::size_t count_domain(const MixedCorpus& c, Domain d) {
  return static_cast<std::size_t>(std::count_if(c.gathers.begin(), c.gathers.end(),
                                                [&](const ShotGather& g) { return g.domain() == d; }));
}

TEST(Mixing, ExactCompositionCounts) {
  const auto a = domain(200, Domain::kClean);
  const auto b = domain(200, Domain::kFieldProxy);
  Rng rng(12);
  auto pure = build_mixed_corpus(a, b, 0.0, 100, rng);
  EXPECT_EQ(count_domain(pure, Domain::kFieldProxy), 0u);
  EXPECT_EQ(pure.gathers.size(), 100u);
  const auto half = build_mixed_corpus(std::span(a).first(100), std::span(b).first(100), 0.5, 100, rng);
  EXPECT_EQ(half.from_a, 50u);
  EXPECT_EQ(half.from_b, 50u);
  EXPECT_EQ(count_domain(half, Domain::kFieldProxy), 50u);
  for (double f : {0.15, 0.30, 0.50}) {
    const auto c = build_mixed_corpus(a, b, f, 200, rng);
    EXPECT_EQ(c.gathers.size(), 200u);
    EXPECT_EQ(count_domain(c, Domain::kFieldProxy), static_cast<std::size_t>(std::lround(f * 200)));
    EXPECT_EQ(c.from_a + c.synthesized + c.from_b, 200u);
  }
}

TEST(Mixing, TopsUpAndRejectsShortfalls) {
  const auto a = domain(10, Domain::kClean);
  const auto b = domain(10, Domain::kFieldProxy);
  Rng rng(13);
  std::size_t calls = 0;
  const auto c = build_mixed_corpus(a, b, 0.3, 30, rng, [&](std::size_t) {
    ++calls;
    return domain(1, Domain::kClean)[0];
  });
  EXPECT_EQ(c.from_b, 9u);
  EXPECT_EQ(c.from_a, 10u);
  EXPECT_EQ(c.synthesized, 11u);
  EXPECT_EQ(calls, 11u);
  EXPECT_THROW(build_mixed_corpus(a, b, 0.3, 30, rng), ContractError);
  EXPECT_THROW(build_mixed_corpus(a, b, 0.9, 20, rng), ContractError);
  EXPECT_THROW(build_mixed_corpus(a, b, 1.5, 10, rng), ContractError);
}

}  // namespace
}  // namespace storseismic
