#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "storseismic/errors.hpp"
#include "storseismic/io/checkpoint.hpp"
#include "storseismic/io/dataset.hpp"
#include "storseismic/numerics/ops.hpp"

namespace storseismic {
namespace {

ModelConfig small_config() {
  ModelConfig c;
  c.hidden = 16;
  c.layers = 2;
  c.heads = 4;
  c.samples = 12;
  c.max_traces = 10;
  c.scale_mode = AttentionScale::kFullWidth;
  return c;
}

std::string bytes_of(const Checkpoint& ck) {
  std::ostringstream out(std::ios::binary);
  write_checkpoint(out, ck);
  return out.str();
}

TEST(Checkpoint, SaveLoadSaveIsByteIdentical) {
  Rng rng(7);
  Model m(small_config(), rng, HeadKind::kFirstBreak, HeadInit::kRandom);
  const auto first = bytes_of(make_checkpoint(m));
  std::istringstream in(first, std::ios::binary);
  const Model back = model_from_checkpoint(read_checkpoint(in));
  EXPECT_EQ(bytes_of(make_checkpoint(back)), first);
  EXPECT_EQ(back.config(), m.config());
  EXPECT_EQ(back.head().kind, HeadKind::kFirstBreak);

  Tensor<float> x({1, 4, 12});
  for (std::size_t i = 0; i < x.numel(); ++i) x.mutable_data()[i] = std::sin(static_cast<float>(i));
  const auto a = m.forward(x).output;
  const auto b = back.forward(x).output;
  for (std::size_t i = 0; i < a.numel(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(Checkpoint, FileRoundTripWithOptimizerMoments) {
  Rng rng(8);
  Model m(small_config(), rng, HeadKind::kReconstruction, HeadInit::kRandom);
  AdamOptimizer<float> opt({1e-3});
  auto params = m.parameters();
  Tensor<float> x({1, 3, 12}, 0.5f);
  for (int i = 0; i < 3; ++i) {
    mse_loss(m.forward(x).output, Tensor<float>({1, 3, 12}, 0.1f)).backward();
    opt.step(params);
  }
  const auto path = std::filesystem::temp_directory_path() / "ssck_roundtrip.ssck";
  save_checkpoint(path, make_checkpoint(m, &opt));
  const auto ck = load_checkpoint(path);
  std::filesystem::remove(path);

  Model back = model_from_checkpoint(ck);
  AdamOptimizer<float> resumed({1e-3});
  restore_optimizer(ck, opt.step_count(), resumed);
  auto back_params = back.parameters();
  // One more identical step on each side stays bitwise in sync.
  mse_loss(m.forward(x).output, Tensor<float>({1, 3, 12}, 0.1f)).backward();
  opt.step(params);
  mse_loss(back.forward(x).output, Tensor<float>({1, 3, 12}, 0.1f)).backward();
  resumed.step(back_params);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto a = params[i]->value.data();
    const auto b = back_params[i]->value.data();
    EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin())) << params[i]->name;
  }
}

TEST(Checkpoint, RejectsCorruptInput) {
  Rng rng(9);
  Model m(small_config(), rng);
  auto bytes = bytes_of(make_checkpoint(m));

  auto read = [](const std::string& s) {
    std::istringstream in(s, std::ios::binary);
    return read_checkpoint(in);
  };
  EXPECT_THROW(read("NOPE"), DataError);
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(read(bad_magic), DataError);
  auto bad_version = bytes;
  bad_version[4] = 9;
  EXPECT_THROW(read(bad_version), DataError);
  EXPECT_THROW(read(bytes.substr(0, bytes.size() - 3)), DataError);

  auto ck = read(bytes);
  ck.records.pop_back();
  EXPECT_THROW(model_from_checkpoint(ck), DataError);
  ck = read(bytes);
  ck.records[0].shape = {1};
  ck.records[0].values = {0.0f};
  EXPECT_THROW(model_from_checkpoint(ck), DataError);
  ck = read(bytes);
  ck.records.push_back({"encoder.9.mystery", {1}, {0.0f}});
  EXPECT_THROW(model_from_checkpoint(ck), DataError);
  EXPECT_THROW(load_checkpoint("/nonexistent/dir/model.ssck"), DataError);
}

SeismicDataset small_dataset() {
  SeismicDataset d;
  d.traces = 3;
  d.samples = 5;
  d.dt = 0.004;
  d.velocity_min = 1400;
  d.velocity_max = 4700;
  d.offsets = {0.0, 25.0, 50.0};
  for (int n = 0; n < 2; ++n) {
    ShotGather g(3, 5, d.dt, d.offsets, n == 1 ? Domain::kFieldProxy : Domain::kClean);
    ShotGather c(3, 5, d.dt, d.offsets);
    for (std::size_t i = 0; i < 15; ++i) {
      g.amplitudes()[i] = 0.1f * static_cast<float>(i) - n;
      c.amplitudes()[i] = 0.05f * static_cast<float>(i) + n;
    }
    d.inputs.push_back(g);
    d.clean.push_back(c);
    d.velocity.push_back({1500, 1600, 1700, 2000, 2100.5f + n});
    d.first_break.push_back({1, 2, static_cast<std::uint16_t>(3 + n)});
  }
  return d;
}

TEST(Dataset, RoundTrip) {
  const auto d = small_dataset();
  std::stringstream io(std::ios::in | std::ios::out | std::ios::binary);
  write_dataset(io, d);
  const auto first = io.str();
  const auto back = read_dataset(io);
  EXPECT_EQ(back.size(), 2u);
  EXPECT_EQ(back.traces, 3u);
  EXPECT_EQ(back.samples, 5u);
  EXPECT_FLOAT_EQ(back.dt, 0.004f);
  EXPECT_EQ(back.velocity_min, 1400);
  EXPECT_EQ(back.offsets, d.offsets);
  EXPECT_TRUE(back.has(LabelKind::kClean));
  EXPECT_TRUE(back.has(LabelKind::kVelocity));
  EXPECT_TRUE(back.has(LabelKind::kFirstBreak));
  EXPECT_FALSE(back.has(LabelKind::kVrms));
  EXPECT_EQ(back.inputs[1].domain(), Domain::kFieldProxy);
  for (std::size_t n = 0; n < 2; ++n) {
    EXPECT_TRUE(std::equal(back.inputs[n].amplitudes().begin(), back.inputs[n].amplitudes().end(),
                           d.inputs[n].amplitudes().begin()));
    EXPECT_TRUE(std::equal(back.clean[n].amplitudes().begin(), back.clean[n].amplitudes().end(),
                           d.clean[n].amplitudes().begin()));
    EXPECT_EQ(back.velocity[n], d.velocity[n]);
    EXPECT_EQ(back.first_break[n], d.first_break[n]);
  }
  std::ostringstream again(std::ios::binary);
  write_dataset(again, back);
  EXPECT_EQ(again.str(), first);
}

TEST(Dataset, SubsetKeepsLabels) {
  const auto d = small_dataset();
  const auto s = d.subset(1, 2);
  EXPECT_EQ(s.size(), 1u);
  EXPECT_EQ(s.velocity[0], d.velocity[1]);
  EXPECT_EQ(s.first_break[0], d.first_break[1]);
  EXPECT_THROW(d.subset(1, 3), ContractError);
}

TEST(Dataset, ValidationAndCorruption) {
  auto d = small_dataset();
  d.velocity.pop_back();
  EXPECT_THROW(d.validate(), DataError);
  d = small_dataset();
  d.first_break[0].push_back(0);
  EXPECT_THROW(d.validate(), DataError);

  std::ostringstream out(std::ios::binary);
  write_dataset(out, small_dataset());
  const auto bytes = out.str();
  auto read = [](const std::string& s) {
    std::istringstream in(s, std::ios::binary);
    return read_dataset(in);
  };
  EXPECT_THROW(read(bytes.substr(0, 40)), DataError);
  auto bad = bytes;
  bad[1] = 'Q';
  EXPECT_THROW(read(bad), DataError);
  EXPECT_THROW(load_dataset("/nonexistent/data.ssds"), DataError);
}

}  // namespace
}  // namespace storseismic
