#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "gradcheck.hpp"
#include "model_gradcheck.hpp"
#include "reference_model.hpp"
#include "storseismic/errors.hpp"
#include "storseismic/model/model.hpp"
#include "storseismic/numerics/ops.hpp"
#include "storseismic/numerics/optimizer.hpp"

namespace storseismic {
namespace {

using testing::Matrix;
using testing::random_values;

ModelConfig tiny_config(std::size_t layers = 1) {
  ModelConfig c;
  c.hidden = 8;
  c.layers = layers;
  c.heads = 2;
  c.samples = 8;
  c.max_traces = 6;
  return c;
}

Matrix to_rows(const std::vector<double>& flat, std::size_t rows) {
  const std::size_t cols = flat.size() / rows;
  Matrix m(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    m[r].assign(flat.begin() + r * cols, flat.begin() + (r + 1) * cols);
  }
  return m;
}

Tensor<float> gather_tensor(const std::vector<double>& flat, std::size_t x,
                            std::size_t t) {
  return testing::make_tensor<float>({1, x, t}, flat);
}

TEST(PositionalEncoding, KnownValues) {
  for (std::size_t c = 0; c < 16; ++c) {
    EXPECT_EQ(positional_encoding(0, c, 16), c % 2 == 0 ? 0.0 : 1.0);
  }
  EXPECT_NEAR(positional_encoding(1, 0, 16), 0.8414709848078965, 1e-15);
  EXPECT_NEAR(positional_encoding(1, 1, 16), std::cos(1.0), 1e-15);
  // Channels 2k and 2k+1 share a frequency.
  EXPECT_NEAR(positional_encoding(3, 4, 16), std::sin(3.0 / std::pow(10000.0, 4.0 / 16)), 1e-15);
  EXPECT_NEAR(positional_encoding(3, 5, 16), std::cos(3.0 / std::pow(10000.0, 4.0 / 16)), 1e-15);
}

TEST(ParamCount, ModelSizeTable) {
  struct Row { std::size_t h, l, a, count; };
  const Row rows[] = {{256, 4, 4, 3352696}, {128, 4, 4, 890104},
                      {512, 4, 4, 12996472}, {256, 2, 4, 1773176},
                      {256, 8, 4, 6511736}, {256, 4, 2, 3352696},
                      {256, 4, 8, 3352696}};
  for (const auto& r : rows) {
    ModelConfig c;
    c.hidden = r.h;
    c.layers = r.l;
    c.heads = r.a;
    c.samples = 376;
    EXPECT_EQ(param_count(c), r.count) << "H=" << r.h << " L=" << r.l << " A=" << r.a;
  }
}

TEST(ParamCount, MatchesInstantiatedModel) {
  Rng rng(1);
  for (std::size_t layers : {1u, 2u, 3u}) {
    auto cfg = tiny_config(layers);
    Model m(cfg, rng);
    EXPECT_EQ(m.parameter_count(), param_count(cfg));
  }
}

TEST(ModelConfig, Validation) {
  auto c = tiny_config();
  c.heads = 3;
  EXPECT_THROW(c.validate(), ContractError);
  Rng rng(0);
  EXPECT_THROW(Model(c, rng), ContractError);
}

TEST(Model, ParameterNamesAreUnique) {
  Rng rng(3);
  Model m(tiny_config(3), rng);
  std::set<std::string> names;
  for (const auto* p : std::as_const(m).parameters()) {
    EXPECT_TRUE(names.insert(p->name).second) << p->name;
  }
  EXPECT_NE(m.find_parameter("encoder.2.ffn.in.weight"), nullptr);
  EXPECT_EQ(m.find_parameter("encoder.3.ffn.in.weight"), nullptr);
}

TEST(Model, CloneOwnsItsParameters) {
  Rng rng(3);
  Model a(tiny_config(2), rng, HeadKind::kVelocity, HeadInit::kRandom);
  a.freeze_layers(1);
  Model shallow = a;
  Model b = a.clone();
  EXPECT_EQ(b.frozen_layers(), 1u);
  EXPECT_EQ(b.head().kind, HeadKind::kVelocity);
  EXPECT_EQ(b.head().init, HeadInit::kRandom);
  auto pa = a.parameters();
  auto pb = b.parameters();
  ASSERT_EQ(pa.size(), pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const auto x = pa[i]->value.data();
    const auto y = pb[i]->value.data();
    EXPECT_TRUE(std::equal(x.begin(), x.end(), y.begin(), y.end())) << pa[i]->name;
  }
  pa[0]->value.mutable_data()[0] += 1.0f;
  EXPECT_EQ(shallow.parameters()[0]->value.data()[0], pa[0]->value.data()[0]);
  EXPECT_NE(pb[0]->value.data()[0], pa[0]->value.data()[0]);
}

TEST(Model, MatchesBruteForceReference) {
  // 3 traces, T=8, H=8, L=1, A=2; random head so the output is non-trivial.
  Rng rng(17);
  const auto cfg = tiny_config(1);
  Model m(cfg, rng, HeadKind::kReconstruction, HeadInit::kRandom);
  // Larger weights than the 0.02 init so every path matters numerically.
  for (auto* p : m.parameters()) {
    for (auto& v : p->value.mutable_data()) v += static_cast<float>(rng.normal(0.0, 0.3));
  }
  const auto input = random_values(3 * 8, rng);
  const auto ref = testing::ref_forward(m, to_rows(input, 3));
  const auto out = m.forward(gather_tensor(input, 3, 8)).output;
  ASSERT_EQ(out.numel(), ref.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, std::abs(out[i] - ref[i]));
  EXPECT_LE(worst, 1e-5);

  const auto md = m.cast<double>();
  const auto outd = md.forward(testing::make_tensor<double>({1, 3, 8}, input)).output;
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(outd[i], ref[i], 1e-12);
}

TEST(Model, EveryHeadKindMatchesReference) {
  Rng rng(23);
  auto cfg = tiny_config(2);
  cfg.scale_mode = AttentionScale::kFullWidth;
  BasicModel<double> m = Model(cfg, rng).cast<double>();
  for (auto* p : m.parameters()) {
    for (auto& v : p->value.mutable_data()) v += rng.normal(0.0, 0.3);
  }
  const auto input = random_values(4 * 8, rng);
  for (auto kind : {HeadKind::kReconstruction, HeadKind::kDenoise, HeadKind::kVelocity,
                    HeadKind::kFirstBreak, HeadKind::kVrms}) {
    m.replace_head(make_head<double>(kind, cfg, HeadInit::kRandom, rng));
    const auto out = m.forward(testing::make_tensor<double>({1, 4, 8}, input)).output;
    const auto ref = testing::ref_forward(m, to_rows(input, 4));
    EXPECT_EQ(out.shape(), is_profile_head(kind) ? Shape({1, 8}) : Shape({1, 4, 8}));
    ASSERT_EQ(out.numel(), ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
      EXPECT_NEAR(out[i], ref[i], 1e-12) << to_string(kind);
    }
  }
}

TEST(Attention, TwoTraceToyMatchesReference) {
  Rng rng(29);
  auto cfg = tiny_config(1);
  BasicModel<double> m = BasicModel<double>::zeros(cfg, HeadKind::kReconstruction);
  // Hand-set Q/K/V/O weights; layer norms stay at gain 1, bias 0 except the
  // zeros() model starts with zero gains, so set those too.
  auto set = [&](const std::string& name, auto fn) {
    auto* p = m.find_parameter(name);
    ASSERT_NE(p, nullptr) << name;
    auto d = p->value.mutable_data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = fn(i);
  };
  set("embedding.projection.weight", [](std::size_t i) { return 0.1 * static_cast<double>(i % 7) - 0.3; });
  set("embedding.norm.gain", [](std::size_t) { return 1.0; });
  set("encoder.0.attention_norm.gain", [](std::size_t) { return 1.0; });
  set("encoder.0.ffn_norm.gain", [](std::size_t) { return 1.0; });
  set("encoder.0.attention.query.weight", [](std::size_t i) { return (i % 3 == 0) ? 0.5 : -0.25; });
  set("encoder.0.attention.key.weight", [](std::size_t i) { return (i % 5 == 0) ? 0.4 : 0.1; });
  set("encoder.0.attention.value.weight", [](std::size_t i) { return i % 9 == 0 ? 1.0 : 0.0; });
  set("encoder.0.attention.output.weight", [](std::size_t i) { return i % 9 == 0 ? 1.0 : 0.0; });
  const std::vector<double> input = {0.5, -1.0, 0.25, 0.0, 1.0, 0.5, -0.5, 0.75,
                                     -0.3, 0.2, 0.9, -0.7, 0.1, 0.0, 0.4, -0.2};
  std::vector<AttentionRecord> records;
  ForwardOptions fo;
  const auto features = m.encode(testing::make_tensor<double>({1, 2, 8}, input), fo, &records);
  const auto ref = testing::ref_encode(m, to_rows(input, 2));
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t c = 0; c < 8; ++c) {
      EXPECT_NEAR(features[i * 8 + c], ref.features[i][c], 1e-12);
    }
  }
  for (std::size_t a = 0; a < 2; ++a) {
    const auto& map = records[0].at(0, a);
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(map(i, j), ref.attention[a][i][j], 1e-12);
    }
  }
}

TEST(Attention, SingleTraceAttendsToItself) {
  Rng rng(31);
  const auto cfg = tiny_config(1);
  BasicModel<double> m = Model(cfg, rng).cast<double>();
  Tensor<double> x({1, 1, 8}, random_values(8, rng));
  std::vector<AttentionRecord> records(1, AttentionRecord{1, 2, {}});
  records[0].maps.resize(2);
  const auto y = m.attention(x, 0, {}, &records);
  for (std::size_t a = 0; a < 2; ++a) {
    ASSERT_EQ(records[0].at(0, a).size, 1u);
    EXPECT_EQ(records[0].at(0, a)(0, 0), 1.0);
  }
  // Residual plus W_O(V(LN(x))).
  const auto& layer = m.layer(0);
  Matrix xm = to_rows({x.data().begin(), x.data().end()}, 1);
  Matrix v = testing::ref_linear(testing::ref_layer_norm(xm, layer.attention_norm), layer.value);
  Matrix o = testing::ref_linear(v, layer.output);
  for (std::size_t c = 0; c < 8; ++c) EXPECT_NEAR(y[c], x[c] + o[0][c], 1e-12);
}

TEST(Attention, IdenticalTracesGiveUniformRows) {
  Rng rng(37);
  Model m(tiny_config(2), rng);
  const auto one = random_values(8, rng);
  std::vector<double> input;
  for (int i = 0; i < 5; ++i) input.insert(input.end(), one.begin(), one.end());
  const std::size_t positions[] = {0, 0, 0, 0, 0};
  ForwardOptions fo;
  fo.capture_attention = true;
  fo.positions = positions;
  const auto res = m.forward(gather_tensor(input, 5, 8), fo);
  for (const auto& map : res.attention[0].maps) {
    for (double w : map.weights) EXPECT_NEAR(w, 0.2, 1e-6);
  }
}

TEST(FeedForward, ZeroWeightsArePureResidual) {
  auto m = Model::zeros(tiny_config(1), HeadKind::kReconstruction);
  Rng rng(41);
  Tensor<float> x = testing::make_tensor<float>({1, 3, 8}, random_values(24, rng));
  const auto y = m.feed_forward(x, 0, {});
  for (std::size_t i = 0; i < 24; ++i) EXPECT_EQ(y[i], x[i]);
}

TEST(FeedForward, HandSetTwoByTwo) {
  // H = 2 (one head), intermediate 2x2 via ratio 1.
  ModelConfig cfg;
  cfg.hidden = 2;
  cfg.layers = 1;
  cfg.heads = 1;
  cfg.samples = 2;
  cfg.max_traces = 2;
  cfg.intermediate_ratio = 1;
  auto m = BasicModel<double>::zeros(cfg, HeadKind::kReconstruction);
  auto put = [&](const std::string& name, std::vector<double> v) {
    auto d = m.find_parameter(name)->value.mutable_data();
    std::copy(v.begin(), v.end(), d.begin());
  };
  put("encoder.0.ffn_norm.gain", {1.0, 2.0});
  put("encoder.0.ffn_norm.bias", {0.5, -0.5});
  put("encoder.0.ffn.in.weight", {1.0, -1.0, 0.5, 2.0});
  put("encoder.0.ffn.in.bias", {0.1, 0.2});
  put("encoder.0.ffn.out.weight", {0.3, 0.7, -1.2, 0.4});
  put("encoder.0.ffn.out.bias", {0.05, -0.05});
  Tensor<double> x({1, 2, 2}, {1.0, 4.0, -2.0, 0.5});
  const auto y = m.feed_forward(x, 0, {});
  // Row [1, 4]: LN -> [-1, 1] -> gain/bias [-0.5, 1.5].
  auto phi = [](double u) { return u * 0.5 * (1.0 + std::erf(u / std::sqrt(2.0))); };
  auto row = [&](double a, double b) {
    const double mu = (a + b) / 2, sd = std::sqrt(((a - mu) * (a - mu) + (b - mu) * (b - mu)) / 2 + 1e-12);
    const double n0 = (a - mu) / sd * 1.0 + 0.5, n1 = (b - mu) / sd * 2.0 - 0.5;
    const double u0 = phi(n0 * 1.0 + n1 * 0.5 + 0.1), u1 = phi(n0 * -1.0 + n1 * 2.0 + 0.2);
    return std::pair{a + u0 * 0.3 + u1 * -1.2 + 0.05, b + u0 * 0.7 + u1 * 0.4 - 0.05};
  };
  const auto [r00, r01] = row(1.0, 4.0);
  const auto [r10, r11] = row(-2.0, 0.5);
  EXPECT_NEAR(y[0], r00, 1e-12);
  EXPECT_NEAR(y[1], r01, 1e-12);
  EXPECT_NEAR(y[2], r10, 1e-12);
  EXPECT_NEAR(y[3], r11, 1e-12);
}

TEST(Model, GradientsMatchFiniteDifferences) {
  Rng rng(43);
  const auto cfg = tiny_config(1);
  Model m(cfg, rng, HeadKind::kReconstruction, HeadInit::kRandom);
  for (auto* p : m.parameters()) {
    for (auto& v : p->value.mutable_data()) v += static_cast<float>(rng.normal(0.0, 0.2));
  }
  const auto input = random_values(2 * 3 * 8, rng);
  const auto r = testing::model_gradcheck(m, {2, 3, 8}, input);
  EXPECT_LE(r.worst, 1e-4) << r.worst_param;
}

TEST(Model, ZeroHeadGivesZeroOutput) {
  Rng rng(47);
  Model m(tiny_config(2), rng);
  const auto out = m.forward(gather_tensor(random_values(40, rng), 5, 8)).output;
  for (float v : out.data()) EXPECT_EQ(v, 0.0f);
}

TEST(Model, AttentionRecordShapeAndRows) {
  Rng rng(53);
  Model m(tiny_config(3), rng);
  ForwardOptions fo;
  fo.capture_attention = true;
  const auto res = m.forward(testing::make_tensor<float>({2, 5, 8}, random_values(80, rng, -3, 3)), fo);
  ASSERT_EQ(res.attention.size(), 2u);
  for (const auto& rec : res.attention) {
    ASSERT_EQ(rec.maps.size(), 3u * 2u);
    for (const auto& map : rec.maps) {
      ASSERT_EQ(map.size, 5u);
      for (std::size_t r = 0; r < 5; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < 5; ++c) s += map(r, c);
        EXPECT_NEAR(s, 1.0, 1e-6);
      }
    }
  }
}

TEST(Model, CaptureDoesNotChangeOutput) {
  Rng rng(59);
  Model m(tiny_config(2), rng, HeadKind::kReconstruction, HeadInit::kRandom);
  const auto x = gather_tensor(random_values(40, rng), 5, 8);
  ForwardOptions on;
  on.capture_attention = true;
  const auto a = m.forward(x).output;
  const auto b = m.forward(x, on).output;
  for (std::size_t i = 0; i < a.numel(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(Model, ErrorsOnBadInput) {
  Rng rng(61);
  Model m(tiny_config(1), rng);
  EXPECT_THROW(m.forward(Tensor<float>({1, 3, 7})), ShapeError);
  EXPECT_THROW(m.forward(Tensor<float>({1, 7, 8})), ShapeError);
  m.detach_head();
  EXPECT_THROW(m.forward(Tensor<float>({1, 3, 8})), ContractError);
}

TEST(Model, JointPermutationEquivariance) {
  Rng rng(67);
  Model m(tiny_config(2), rng, HeadKind::kReconstruction, HeadInit::kRandom);
  const std::size_t nx = 5, nt = 8;
  const auto input = random_values(nx * nt, rng);
  const std::size_t perm[] = {3, 0, 4, 1, 2};
  std::vector<double> permuted(nx * nt);
  for (std::size_t i = 0; i < nx; ++i) {
    std::copy_n(input.begin() + perm[i] * nt, nt, permuted.begin() + i * nt);
  }
  ForwardOptions fo;
  fo.positions = perm;
  const auto a = m.forward(gather_tensor(input, nx, nt)).output;
  const auto b = m.forward(gather_tensor(permuted, nx, nt), fo).output;
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t t = 0; t < nt; ++t) {
      EXPECT_NEAR(b[i * nt + t], a[perm[i] * nt + t], 1e-5);
    }
  }
}

TEST(Heads, ReplaceHeadLeavesEncoderUntouched) {
  Rng rng(71);
  Model m(tiny_config(2), rng);
  const auto x = gather_tensor(random_values(40, rng), 5, 8);
  const auto before = m.encode(x, {}, nullptr);
  const auto params_before = [&] {
    std::vector<std::vector<float>> v;
    for (const auto* p : std::as_const(m).parameters()) {
      if (p->name.rfind("head.", 0) != 0) v.emplace_back(p->value.data().begin(), p->value.data().end());
    }
    return v;
  }();
  m.replace_head(make_head<float>(HeadKind::kDenoise, m.config(), HeadInit::kZeros, rng));
  const auto after = m.encode(x, {}, nullptr);
  for (std::size_t i = 0; i < before.numel(); ++i) EXPECT_EQ(before[i], after[i]);
  std::size_t k = 0;
  for (const auto* p : std::as_const(m).parameters()) {
    if (p->name.rfind("head.", 0) == 0) continue;
    EXPECT_TRUE(std::equal(p->value.data().begin(), p->value.data().end(), params_before[k++].begin()));
  }
  const auto out = m.forward(x).output;
  for (float v : out.data()) EXPECT_EQ(v, 0.0f);
  EXPECT_EQ(m.head().kind, HeadKind::kDenoise);
}

TEST(Heads, RandomInitHonorsSeed) {
  const auto cfg = tiny_config(1);
  Rng a(5), b(5), c(6);
  const auto ha = make_head<float>(HeadKind::kVelocity, cfg, HeadInit::kRandom, a);
  const auto hb = make_head<float>(HeadKind::kVelocity, cfg, HeadInit::kRandom, b);
  const auto hc = make_head<float>(HeadKind::kVelocity, cfg, HeadInit::kRandom, c);
  const auto wa = ha.projection.weight.value.data();
  EXPECT_TRUE(std::equal(wa.begin(), wa.end(), hb.projection.weight.value.data().begin()));
  EXPECT_FALSE(std::equal(wa.begin(), wa.end(), hc.projection.weight.value.data().begin()));
  for (float w : wa) EXPECT_LE(std::abs(w), 0.04f + 1e-7f);
}

TEST(Heads, ProfileHeadReadsFirstPosition) {
  Rng rng(73);
  Model m(tiny_config(1), rng, HeadKind::kVelocity, HeadInit::kRandom);
  const auto x = gather_tensor(random_values(40, rng), 5, 8);
  const auto out = m.forward(x).output;
  const auto feats = m.encode(x, {}, nullptr);
  const auto first = linear(slice(feats, 1, 0, 1), m.head().projection.weight.value,
                            m.head().projection.bias.value);
  ASSERT_EQ(out.shape(), (Shape{1, 8}));
  for (std::size_t t = 0; t < 8; ++t) EXPECT_EQ(out[t], first[t]);
}

TEST(Freeze, FlagsAndRange) {
  Rng rng(79);
  Model m(tiny_config(4), rng);
  EXPECT_THROW(m.freeze_layers(5), std::out_of_range);
  m.freeze_layers(4);
  for (const auto* p : std::as_const(m).parameters()) {
    EXPECT_EQ(p->frozen, p->name.rfind("head.", 0) != 0) << p->name;
  }
  m.freeze_layers(0);
  for (const auto* p : std::as_const(m).parameters()) EXPECT_FALSE(p->frozen) << p->name;
  m.freeze_layers(2);
  EXPECT_EQ(m.frozen_layers(), 2u);
  EXPECT_TRUE(m.find_parameter("embedding.projection.weight")->frozen);
  EXPECT_TRUE(m.find_parameter("encoder.1.ffn.out.bias")->frozen);
  EXPECT_FALSE(m.find_parameter("encoder.2.attention.query.weight")->frozen);
}

TEST(Freeze, FrozenPrefixBitwiseInvariantUnderTraining) {
  Rng rng(83);
  Model m(tiny_config(4), rng, HeadKind::kReconstruction, HeadInit::kRandom);
  m.freeze_layers(2);
  const auto before = [&] {
    std::map<std::string, std::vector<float>> v;
    for (const auto* p : std::as_const(m).parameters()) v[p->name].assign(p->value.data().begin(), p->value.data().end());
    return v;
  }();
  AdamOptimizer<float> opt({1e-2});
  const auto x = gather_tensor(random_values(40, rng), 5, 8);
  const auto target = gather_tensor(random_values(40, rng), 5, 8);
  auto params = m.parameters();
  for (int step = 0; step < 10; ++step) {
    mse_loss(m.forward(x).output, target).backward();
    opt.step(params);
  }
  for (const auto* p : std::as_const(m).parameters()) {
    const bool same = std::equal(p->value.data().begin(), p->value.data().end(),
                                 before.at(p->name).begin());
    const bool frozen = p->name.rfind("embedding.", 0) == 0 ||
                        p->name.rfind("encoder.0.", 0) == 0 ||
                        p->name.rfind("encoder.1.", 0) == 0;
    if (frozen) {
      EXPECT_TRUE(same) << p->name;
    } else if (p->name.find("weight") != std::string::npos) {
      EXPECT_FALSE(same) << p->name;
    }
  }
}

}  // namespace
}  // namespace storseismic
