#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "storseismic/analysis/attention.hpp"
#include "storseismic/errors.hpp"

namespace storseismic {
namespace {

namespace fs = std::filesystem;

ModelConfig small(std::size_t layers, std::size_t heads) {
  ModelConfig c;
  c.hidden = 16;
  c.layers = layers;
  c.heads = heads;
  c.samples = 12;
  c.max_traces = 8;
  return c;
}

ShotGather random_gather(std::size_t x, Rng& rng) {
  std::vector<double> offsets;
  for (std::size_t i = 0; i < x; ++i) offsets.push_back(25.0 * static_cast<double>(i));
  ShotGather g(x, 12, 0.004, offsets);
  for (auto& a : g.amplitudes()) a = static_cast<float>(rng.normal(0.0, 1.0));
  return g;
}

// Random row-stochastic record with the given shape.
AttentionRecord random_record(std::size_t layers, std::size_t heads, std::size_t n, Rng& rng) {
  AttentionRecord r{layers, heads, {}};
  for (std::size_t m = 0; m < layers * heads; ++m) {
    AttentionMap map{n, std::vector<double>(n * n)};
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += map.weights[i * n + j] = rng.uniform(0.0, 1.0);
      for (std::size_t j = 0; j < n; ++j) map.weights[i * n + j] /= s;
    }
    r.maps.push_back(std::move(map));
  }
  return r;
}

TEST(AttentionMaps, SingleTraceIsOne) {
  Rng rng(1);
  Model m(small(3, 2), rng);
  const auto rec = attention_maps(m, random_gather(1, rng));
  ASSERT_EQ(rec.maps.size(), 6u);
  for (const auto& map : rec.maps) {
    ASSERT_EQ(map.size, 1u);
    EXPECT_EQ(map(0, 0), 1.0);
  }
}

TEST(AttentionMaps, RowsSumToOneAndCaptureIsObservationOnly) {
  Rng rng(2);
  Model m(small(3, 4), rng, HeadKind::kReconstruction, HeadInit::kRandom);
  const auto g = random_gather(7, rng);
  const auto rec = attention_maps(m, g);
  for (const auto& map : rec.maps) {
    for (std::size_t r = 0; r < 7; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < 7; ++c) s += map(r, c);
      EXPECT_NEAR(s, 1.0, 1e-6);
    }
  }
  Tensor<float> x({1, 7, 12}, std::vector<float>(g.amplitudes().begin(), g.amplitudes().end()));
  ForwardOptions on;
  on.capture_attention = true;
  const auto a = m.forward(x).output;
  const auto b = m.forward(x, on).output;
  for (std::size_t i = 0; i < a.numel(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(Rollout, SingleLayerRawIsHeadAverage) {
  Rng rng(3);
  const auto rec = random_record(1, 3, 5, rng);
  const auto ro = attention_rollout(rec, RolloutMode::kRaw);
  ASSERT_EQ(ro.layers.size(), 1u);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      const double avg = (rec.at(0, 0)(i, j) + rec.at(0, 1)(i, j) + rec.at(0, 2)(i, j)) / 3.0;
      EXPECT_NEAR(ro.at(0, i, j), avg, 1e-15);
    }
  }
}

TEST(Rollout, IdentityMapsGiveIdentity) {
  AttentionRecord rec{3, 2, {}};
  for (int m = 0; m < 6; ++m) {
    AttentionMap map{4, std::vector<double>(16, 0.0)};
    for (int i = 0; i < 4; ++i) map.weights[i * 5] = 1.0;
    rec.maps.push_back(map);
  }
  for (auto mode : {RolloutMode::kRaw, RolloutMode::kWithIdentity}) {
    const auto ro = attention_rollout(rec, mode);
    for (std::size_t l = 0; l < 3; ++l) {
      for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(ro.at(l, i, j), i == j ? 1.0 : 0.0);
      }
    }
  }
}

TEST(Rollout, WithIdentityHandValue) {
  // One layer, one head, A = [[0, 1], [1, 0]]: 0.5 A + 0.5 I = 0.5 everywhere.
  AttentionRecord rec{1, 1, {AttentionMap{2, {0.0, 1.0, 1.0, 0.0}}}};
  const auto ro = attention_rollout(rec, RolloutMode::kWithIdentity);
  for (double v : ro.layers[0]) EXPECT_DOUBLE_EQ(v, 0.5);
  // Two layers: R_2 = A_2 R_1.
  AttentionRecord two{2, 1, {AttentionMap{2, {0.0, 1.0, 1.0, 0.0}}, AttentionMap{2, {1.0, 0.0, 0.25, 0.75}}}};
  const auto raw = attention_rollout(two, RolloutMode::kRaw);
  EXPECT_DOUBLE_EQ(raw.at(1, 0, 0), 0.0);
  EXPECT_DOUBLE_EQ(raw.at(1, 0, 1), 1.0);
  EXPECT_DOUBLE_EQ(raw.at(1, 1, 0), 0.75);
  EXPECT_DOUBLE_EQ(raw.at(1, 1, 1), 0.25);
}

TEST(Rollout, RowStochasticSweep) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = rng.uniform_index(12) + 1;
    const std::size_t layers = rng.uniform_index(6) + 1;
    const auto rec = random_record(layers, rng.uniform_index(4) + 1, n, rng);
    const auto ro = attention_rollout(rec, RolloutMode::kWithIdentity);
    for (std::size_t l = 0; l < layers; ++l) {
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          s += ro.at(l, i, j);
          EXPECT_GE(ro.at(l, i, j), 0.0);
        }
        EXPECT_NEAR(s, 1.0, 1e-6);
      }
    }
  }
}

TEST(Rollout, ModeNamesAndDistance) {
  EXPECT_EQ(rollout_mode_from_string(to_string(RolloutMode::kRaw)), RolloutMode::kRaw);
  EXPECT_EQ(rollout_mode_from_string("with_identity"), RolloutMode::kWithIdentity);
  EXPECT_THROW(rollout_mode_from_string("bogus"), ContractError);
  const std::vector<double> a = {1, 2, 3, 4}, b = {1, 2, 3, 6};
  EXPECT_DOUBLE_EQ(frobenius_distance(a, b), 2.0);
}

class ExportTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ss_export_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST_F(ExportTest, FileCounts) {
  Rng rng(5);
  Model m(small(2, 2), rng);
  const auto rec = attention_maps(m, random_gather(5, rng));
  const auto maps = export_maps(rec, dir_);
  const auto ro = export_rollout(attention_rollout(rec, RolloutMode::kWithIdentity), dir_);
  auto count = [](const std::vector<fs::path>& v, const std::string& ext) {
    return std::count_if(v.begin(), v.end(), [&](const fs::path& p) { return p.extension() == ext; });
  };
  EXPECT_EQ(count(maps, ".pgm"), 4);
  EXPECT_EQ(count(maps, ".csv"), 4);
  EXPECT_EQ(count(ro, ".pgm"), 2);
  EXPECT_EQ(count(ro, ".csv"), 2);
  EXPECT_TRUE(fs::exists(dir_ / "attention_l1_h0.pgm"));
  EXPECT_TRUE(fs::exists(dir_ / "rollout_l1.csv"));
}

TEST_F(ExportTest, CsvRoundTripIsExact) {
  Rng rng(6);
  std::vector<double> v(12);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0) / 3.0;
  v[0] = 1e-300;
  v[1] = 0.1;
  fs::create_directories(dir_);
  write_matrix_csv(dir_ / "m.csv", v, 3, 4);
  const auto back = read_matrix_csv(dir_ / "m.csv");
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t r = 0; r < 3; ++r) {
    ASSERT_EQ(back[r].size(), 4u);
    for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(back[r][c], v[r * 4 + c]);
  }
}

TEST_F(ExportTest, PgmPixelMapping) {
  fs::create_directories(dir_);
  const std::vector<double> v = {0.0, 0.5, 1.0, -0.2, 1.7, 0.25};
  write_pgm(dir_ / "p.pgm", v, 2, 3);
  std::ifstream in(dir_ / "p.pgm", std::ios::binary);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  in.get();
  EXPECT_EQ(magic, "P5");
  EXPECT_EQ(w, 3);
  EXPECT_EQ(h, 2);
  EXPECT_EQ(maxval, 255);
  std::vector<unsigned char> px(6);
  in.read(reinterpret_cast<char*>(px.data()), 6);
  EXPECT_EQ(px, (std::vector<unsigned char>{0, 128, 255, 0, 255, 64}));
}

}  // namespace
}  // namespace storseismic
