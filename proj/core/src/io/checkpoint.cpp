#include "storseismic/io/checkpoint.hpp"

#include <fstream>
#include <map>
#include <unordered_map>

#include "binary.hpp"
#include "storseismic/errors.hpp"

namespace storseismic {
namespace {

constexpr char kMagic[4] = {'S', 'S', 'C', 'K'};
constexpr std::uint8_t kNoHead = 255;
const std::string kOptimizerFirst = "optimizer.first.";
const std::string kOptimizerSecond = "optimizer.second.";

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.compare(0, prefix.size(), prefix) == 0;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ck) {
  using namespace io;
  out.write(kMagic, 4);
  write_u16(out, kCheckpointVersion);
  const auto& c = ck.config;
  write_u32(out, checked_u32(c.hidden, "hidden"));
  write_u32(out, checked_u32(c.layers, "layers"));
  write_u32(out, checked_u32(c.heads, "heads"));
  write_u32(out, checked_u32(c.samples, "samples"));
  write_u32(out, checked_u32(c.max_traces, "max_traces"));
  write_u32(out, checked_u32(c.intermediate_ratio, "intermediate_ratio"));
  write_u8(out, static_cast<std::uint8_t>(c.scale_mode));
  write_f64(out, c.dropout);
  write_u8(out, ck.head ? static_cast<std::uint8_t>(*ck.head) : kNoHead);
  write_u32(out, checked_u32(ck.records.size(), "record count"));
  for (const auto& r : ck.records) {
    if (shape_numel(r.shape) != r.values.size()) {
      throw DataError("record '" + r.name + "' shape does not match values");
    }
    write_u32(out, checked_u32(r.name.size(), "name length"));
    write_bytes(out, r.name);
    write_u32(out, checked_u32(r.shape.size(), "rank"));
    for (auto d : r.shape) write_u32(out, checked_u32(d, "extent"));
    for (float v : r.values) write_f32(out, v);
  }
  if (!out) {
    throw DataError("failed writing checkpoint");
  }
}

Checkpoint read_checkpoint(std::istream& in) {
  using namespace io;
  const std::string magic = read_bytes(in, 4);
  if (magic != std::string(kMagic, 4)) {
    throw DataError("not an SSCK checkpoint (bad magic)");
  }
  const auto version = read_u16(in);
  if (version != kCheckpointVersion) {
    throw DataError("unsupported SSCK version " + std::to_string(version));
  }
  Checkpoint ck;
  auto& c = ck.config;
  c.hidden = read_u32(in);
  c.layers = read_u32(in);
  c.heads = read_u32(in);
  c.samples = read_u32(in);
  c.max_traces = read_u32(in);
  c.intermediate_ratio = read_u32(in);
  const auto scale = read_u8(in);
  if (scale > 1) {
    throw DataError("unknown attention scale mode in checkpoint");
  }
  c.scale_mode = static_cast<AttentionScale>(scale);
  c.dropout = read_f64(in);
  try {
    c.validate();
  } catch (const ContractError& e) {
    throw DataError(std::string("checkpoint config invalid: ") + e.what());
  }
  const auto head = read_u8(in);
  if (head != kNoHead) {
    if (head > static_cast<std::uint8_t>(HeadKind::kVrms)) {
      throw DataError("unknown head kind in checkpoint");
    }
    ck.head = static_cast<HeadKind>(head);
  }
  const auto count = read_u32(in);
  ck.records.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    CheckpointRecord r;
    r.name = read_bytes(in, read_u32(in));
    const auto rank = read_u32(in);
    if (rank > 8) {
      throw DataError("record '" + r.name + "' has implausible rank");
    }
    for (std::uint32_t d = 0; d < rank; ++d) r.shape.push_back(read_u32(in));
    const std::size_t n = shape_numel(r.shape);
    if (n > (std::size_t{1} << 31)) {
      throw DataError("record '" + r.name + "' is implausibly large");
    }
    r.values.resize(n);
    for (auto& v : r.values) v = read_f32(in);
    ck.records.push_back(std::move(r));
  }
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot open '" + path.string() + "' for writing");
  }
  write_checkpoint(out, ck);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open checkpoint '" + path.string() + "'");
  }
  return read_checkpoint(in);
}

Checkpoint make_checkpoint(const Model& model,
                           const AdamOptimizer<float>* optimizer) {
  Checkpoint ck;
  ck.config = model.config();
  if (model.has_head()) ck.head = model.head().kind;
  for (const auto* p : model.parameters()) {
    auto v = p->value.data();
    ck.records.push_back({p->name, p->value.shape(), {v.begin(), v.end()}});
  }
  if (optimizer) {
    for (const auto* p : model.parameters()) {
      auto it = optimizer->moments().find(p->name);
      if (it == optimizer->moments().end()) continue;
      ck.records.push_back(
          {kOptimizerFirst + p->name, p->value.shape(), it->second.first});
      ck.records.push_back(
          {kOptimizerSecond + p->name, p->value.shape(), it->second.second});
    }
  }
  return ck;
}

Model model_from_checkpoint(const Checkpoint& ck) {
  Model model = Model::zeros(ck.config, ck.head);
  std::unordered_map<std::string, Parameter<float>*> by_name;
  for (auto* p : model.parameters()) by_name[p->name] = p;
  for (const auto& r : ck.records) {
    if (starts_with(r.name, "optimizer.")) continue;
    auto it = by_name.find(r.name);
    if (it == by_name.end()) {
      throw DataError("checkpoint record '" + r.name +
                      "' does not belong to this model");
    }
    if (it->second->value.shape() != r.shape) {
      throw DataError("checkpoint record '" + r.name + "' has shape " +
                      shape_to_string(r.shape) + ", model expects " +
                      shape_to_string(it->second->value.shape()));
    }
    auto dst = it->second->value.mutable_data();
    std::copy(r.values.begin(), r.values.end(), dst.begin());
    by_name.erase(it);
  }
  if (!by_name.empty()) {
    throw DataError("checkpoint is missing parameter '" +
                    by_name.begin()->first + "'");
  }
  return model;
}

void restore_optimizer(const Checkpoint& ck, std::int64_t step,
                       AdamOptimizer<float>& optimizer) {
  std::map<std::string, AdamOptimizer<float>::Moments> moments;
  for (const auto& r : ck.records) {
    if (starts_with(r.name, kOptimizerFirst)) {
      moments[r.name.substr(kOptimizerFirst.size())].first = r.values;
    } else if (starts_with(r.name, kOptimizerSecond)) {
      moments[r.name.substr(kOptimizerSecond.size())].second = r.values;
    }
  }
  for (const auto& [name, m] : moments) {
    if (m.first.size() != m.second.size()) {
      throw DataError("optimizer moments for '" + name + "' are incomplete");
    }
  }
  optimizer.restore(step, std::move(moments));
}

}  // namespace storseismic
