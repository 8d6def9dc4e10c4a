#include "artifacts.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

#include "storseismic/errors.hpp"
#include "storseismic/numerics/tensor.hpp"

namespace storseismic::cli {

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_loss_csv(const fs::path& path, const std::vector<EpochStats>& history) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  out << "epoch,train_loss,test_loss,seconds\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& e : history) {
    out << e.epoch << ',' << e.train_loss << ',' << e.test_loss << ','
        << e.seconds << '\n';
  }
}

void write_profiles_csv(const fs::path& path,
                        const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  const std::size_t n = rows.empty() ? 0 : rows.front().size();
  out << "gather";
  for (std::size_t k = 0; k < n; ++k) out << ",s" << k;
  out << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << i;
    for (double v : rows[i]) out << ',' << v;
    out << '\n';
  }
}

std::vector<std::vector<double>> read_profiles_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line.rfind("gather", 0) != 0) {
    throw DataError("'" + path.string() + "' lacks the profile CSV header");
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> values;
    std::stringstream cells(line);
    std::string cell;
    std::getline(cells, cell, ',');
    if (cell != std::to_string(rows.size())) {
      throw DataError("'" + path.string() + "' row " +
                      std::to_string(rows.size()) + " has gather index '" +
                      cell + "'");
    }
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw DataError("'" + path.string() + "' holds a malformed value '" +
                        cell + "'");
      }
    }
    if (!rows.empty() && values.size() != rows.front().size()) {
      throw DataError("'" + path.string() + "' rows differ in length");
    }
    rows.push_back(std::move(values));
  }
  return rows;
}

fs::path sidecar_path(const fs::path& checkpoint) {
  fs::path p = checkpoint;
  p.replace_extension(".json");
  return p;
}

Splits load_splits(const RunConfig& c) {
  Splits s;
  if (c.data.train.empty()) {
    CorpusOptions o;
    o.noise = c.data.noise;
    o.synth.first_arrivals = c.data.first_arrivals;
    const auto preset = c.preset();
    s.train = generate_dataset(preset, c.data.train_size, c.data.seed, o);
    if (c.data.test_size > 0) {
      o.first_index = c.data.train_size;
      s.test = generate_dataset(preset, c.data.test_size, c.data.seed, o);
    }
    return s;
  }
  SeismicDataset train = load_dataset(c.data.train);
  if (!c.data.test.empty()) {
    s.train = std::move(train);
    s.test = load_dataset(c.data.test);
    if (s.test.traces != s.train.traces || s.test.samples != s.train.samples) {
      throw DataError("train and test datasets differ in shape");
    }
    return s;
  }
  const auto held = static_cast<std::size_t>(
      c.data.test_fraction * static_cast<double>(train.size()));
  const std::size_t cut = train.size() - held;
  s.test = train.subset(cut, train.size());
  s.train = train.subset(0, cut);
  return s;
}

SeismicDataset load_field(const RunConfig& c) {
  if (!c.data.field.empty()) return load_dataset(c.data.field);
  if (c.data.field_fraction <= 0.0) return {};
  CorpusOptions o;
  o.noise = NoiseRecipe::kFieldProxy;
  o.synth.first_arrivals = c.data.first_arrivals;
  o.first_index = c.data.train_size + c.data.test_size;
  return generate_dataset(c.preset(), c.data.train_size, c.data.seed, o);
}

std::vector<std::vector<float>> predict(const Model& model,
                                        const std::vector<ShotGather>& gathers,
                                        std::size_t batch_size) {
  NoGradGuard guard;
  std::vector<std::vector<float>> out;
  out.reserve(gathers.size());
  for (std::size_t begin = 0; begin < gathers.size(); begin += batch_size) {
    const std::size_t end = std::min(gathers.size(), begin + batch_size);
    const auto batch = stack_gathers(
        std::span<const ShotGather>(gathers.data() + begin, end - begin));
    const auto result = model.forward(batch).output;
    const auto values = result.data();
    const std::size_t per = values.size() / (end - begin);
    for (std::size_t i = 0; i < end - begin; ++i) {
      out.emplace_back(values.begin() + static_cast<std::ptrdiff_t>(i * per),
                       values.begin() + static_cast<std::ptrdiff_t>((i + 1) * per));
    }
  }
  return out;
}

void check_fits(const ModelConfig& model, const SeismicDataset& data) {
  if (data.samples != model.samples) {
    throw ConfigError("data has T=" + std::to_string(data.samples) +
                      " samples but the model expects " +
                      std::to_string(model.samples));
  }
  if (data.traces > model.max_traces) {
    throw ConfigError("data has X=" + std::to_string(data.traces) +
                      " traces, more than the model's max_traces=" +
                      std::to_string(model.max_traces));
  }
}

}  // namespace storseismic::cli
