#include "storseismic/io/dataset.hpp"

#include <fstream>

#include "binary.hpp"
#include "storseismic/errors.hpp"

namespace storseismic {
namespace {

constexpr char kMagic[4] = {'S', 'S', 'D', 'S'};

void write_gather_block(std::ostream& out, const std::vector<ShotGather>& gs) {
  for (const auto& g : gs) {
    for (float a : g.amplitudes()) io::write_f32(out, a);
  }
}

std::vector<ShotGather> read_gather_block(std::istream& in, std::size_t n,
                                          const SeismicDataset& header,
                                          const std::vector<Domain>& domains) {
  std::vector<ShotGather> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ShotGather g(header.traces, header.samples, header.dt, header.offsets,
                 domains[i]);
    for (auto& a : g.amplitudes()) a = io::read_f32(in);
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace

bool SeismicDataset::has(LabelKind kind) const {
  switch (kind) {
    case LabelKind::kClean: return !clean.empty();
    case LabelKind::kVelocity: return !velocity.empty();
    case LabelKind::kFirstBreak: return !first_break.empty();
    case LabelKind::kVrms: return !vrms.empty();
  }
  return false;
}

void SeismicDataset::validate() const {
  if (offsets.size() != traces) {
    throw DataError("dataset offsets do not match trace count");
  }
  for (const auto& g : inputs) {
    if (g.traces() != traces || g.samples() != samples) {
      throw DataError("dataset gather has the wrong shape");
    }
  }
  auto check_rows = [&](std::size_t rows, const char* what) {
    if (rows != 0 && rows != inputs.size()) {
      throw DataError(std::string("label block '") + what +
                      "' does not cover every gather");
    }
  };
  check_rows(clean.size(), "clean");
  check_rows(velocity.size(), "velocity");
  check_rows(first_break.size(), "firstbreak");
  check_rows(vrms.size(), "vrms");
  for (const auto& g : clean) {
    if (g.traces() != traces || g.samples() != samples) {
      throw DataError("clean label has the wrong shape");
    }
  }
  for (const auto& v : velocity) {
    if (v.size() != samples) throw DataError("velocity label length != T");
  }
  for (const auto& v : vrms) {
    if (v.size() != samples) throw DataError("vrms label length != T");
  }
  for (const auto& f : first_break) {
    if (f.size() != traces) throw DataError("first-break label length != X");
  }
}

SeismicDataset SeismicDataset::subset(std::size_t begin, std::size_t end) const {
  if (begin > end || end > size()) {
    throw ContractError("dataset subset range out of bounds");
  }
  SeismicDataset out;
  out.traces = traces;
  out.samples = samples;
  out.dt = dt;
  out.velocity_min = velocity_min;
  out.velocity_max = velocity_max;
  out.offsets = offsets;
  auto take = [&](const auto& v, auto& dst) {
    if (!v.empty()) dst.assign(v.begin() + begin, v.begin() + end);
  };
  take(inputs, out.inputs);
  take(clean, out.clean);
  take(velocity, out.velocity);
  take(first_break, out.first_break);
  take(vrms, out.vrms);
  return out;
}

void write_dataset(std::ostream& out, const SeismicDataset& ds) {
  using namespace io;
  ds.validate();
  out.write(kMagic, 4);
  write_u16(out, kDatasetVersion);
  write_u32(out, checked_u32(ds.size(), "gather count"));
  write_u32(out, checked_u32(ds.traces, "traces"));
  write_u32(out, checked_u32(ds.samples, "samples"));
  write_f32(out, static_cast<float>(ds.dt));
  write_f32(out, static_cast<float>(ds.velocity_min));
  write_f32(out, static_cast<float>(ds.velocity_max));
  for (double o : ds.offsets) write_f32(out, static_cast<float>(o));
  for (const auto& g : ds.inputs) write_u8(out, static_cast<std::uint8_t>(g.domain()));
  write_gather_block(out, ds.inputs);

  std::uint32_t blocks = 0;
  for (auto k : {LabelKind::kClean, LabelKind::kVelocity, LabelKind::kFirstBreak,
                 LabelKind::kVrms}) {
    blocks += ds.has(k) ? 1 : 0;
  }
  write_u32(out, blocks);
  if (ds.has(LabelKind::kClean)) {
    write_u8(out, static_cast<std::uint8_t>(LabelKind::kClean));
    write_gather_block(out, ds.clean);
  }
  if (ds.has(LabelKind::kVelocity)) {
    write_u8(out, static_cast<std::uint8_t>(LabelKind::kVelocity));
    for (const auto& v : ds.velocity)
      for (float x : v) write_f32(out, x);
  }
  if (ds.has(LabelKind::kFirstBreak)) {
    write_u8(out, static_cast<std::uint8_t>(LabelKind::kFirstBreak));
    for (const auto& v : ds.first_break)
      for (auto x : v) write_u16(out, x);
  }
  if (ds.has(LabelKind::kVrms)) {
    write_u8(out, static_cast<std::uint8_t>(LabelKind::kVrms));
    for (const auto& v : ds.vrms)
      for (float x : v) write_f32(out, x);
  }
  if (!out) {
    throw DataError("failed writing dataset");
  }
}

SeismicDataset read_dataset(std::istream& in) {
  using namespace io;
  if (read_bytes(in, 4) != std::string(kMagic, 4)) {
    throw DataError("not an SSDS dataset (bad magic)");
  }
  const auto version = read_u16(in);
  if (version != kDatasetVersion) {
    throw DataError("unsupported SSDS version " + std::to_string(version));
  }
  SeismicDataset ds;
  const std::size_t n = read_u32(in);
  ds.traces = read_u32(in);
  ds.samples = read_u32(in);
  if (ds.traces == 0 || ds.samples == 0) {
    throw DataError("dataset has zero traces or samples");
  }
  ds.dt = read_f32(in);
  ds.velocity_min = read_f32(in);
  ds.velocity_max = read_f32(in);
  ds.offsets.resize(ds.traces);
  for (auto& o : ds.offsets) o = read_f32(in);
  std::vector<Domain> domains(n);
  for (auto& d : domains) {
    const auto tag = read_u8(in);
    if (tag > 1) throw DataError("unknown domain tag");
    d = static_cast<Domain>(tag);
  }
  try {
    ds.inputs = read_gather_block(in, n, ds, domains);
  } catch (const ContractError& e) {
    throw DataError(std::string("invalid dataset header: ") + e.what());
  }
  const auto blocks = read_u32(in);
  for (std::uint32_t b = 0; b < blocks; ++b) {
    const auto tag = static_cast<LabelKind>(read_u8(in));
    switch (tag) {
      case LabelKind::kClean:
        ds.clean = read_gather_block(in, n, ds, domains);
        break;
      case LabelKind::kVelocity:
      case LabelKind::kVrms: {
        std::vector<std::vector<float>> rows(n, std::vector<float>(ds.samples));
        for (auto& r : rows)
          for (auto& x : r) x = read_f32(in);
        (tag == LabelKind::kVelocity ? ds.velocity : ds.vrms) = std::move(rows);
        break;
      }
      case LabelKind::kFirstBreak: {
        ds.first_break.assign(n, std::vector<std::uint16_t>(ds.traces));
        for (auto& r : ds.first_break)
          for (auto& x : r) x = read_u16(in);
        break;
      }
      default:
        throw DataError("unknown label block tag " +
                        std::to_string(static_cast<int>(tag)));
    }
  }
  return ds;
}

void save_dataset(const std::filesystem::path& path, const SeismicDataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot open '" + path.string() + "' for writing");
  }
  write_dataset(out, ds);
}

SeismicDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open dataset '" + path.string() + "'");
  }
  return read_dataset(in);
}

}  // namespace storseismic
