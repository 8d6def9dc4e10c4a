#include "storseismic/analysis/attention.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "storseismic/errors.hpp"
#include "storseismic/pretrain/training.hpp"

namespace storseismic {
namespace {

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  return out;
}

void check_matrix(std::span<const double> values, std::size_t rows,
                  std::size_t cols) {
  if (values.size() != rows * cols) {
    throw ShapeError("matrix has " + std::to_string(values.size()) +
                     " values, expected " + std::to_string(rows * cols));
  }
}

}  // namespace

AttentionRecord attention_maps(const Model& model, const ShotGather& gather) {
  NoGradGuard guard;
  ForwardOptions options;
  options.capture_attention = true;
  const std::vector<const ShotGather*> one{&gather};
  auto result = model.forward(stack_gathers(std::span<const ShotGather* const>(one)),
                              options);
  return std::move(result.attention.at(0));
}

std::string to_string(RolloutMode mode) {
  return mode == RolloutMode::kRaw ? "raw" : "with_identity";
}

RolloutMode rollout_mode_from_string(const std::string& name) {
  if (name == "with_identity") return RolloutMode::kWithIdentity;
  if (name == "raw") return RolloutMode::kRaw;
  throw ContractError("unknown rollout mode '" + name + "'");
}

RolloutResult attention_rollout(const AttentionRecord& record, RolloutMode mode) {
  if (record.layers == 0 || record.heads == 0 ||
      record.maps.size() != record.layers * record.heads) {
    throw ContractError("attention record is incomplete");
  }
  const std::size_t n = record.maps[0].size;
  RolloutResult result;
  result.size = n;
  result.mode = mode;

  std::vector<double> current(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) current[i * n + i] = 1.0;
  std::vector<double> avg(n * n);
  for (std::size_t l = 0; l < record.layers; ++l) {
    std::fill(avg.begin(), avg.end(), 0.0);
    for (std::size_t h = 0; h < record.heads; ++h) {
      const auto& map = record.at(l, h);
      if (map.size != n) throw ShapeError("attention maps differ in size");
      for (std::size_t k = 0; k < n * n; ++k) avg[k] += map.weights[k];
    }
    for (auto& v : avg) v /= static_cast<double>(record.heads);
    if (mode == RolloutMode::kWithIdentity) {
      for (std::size_t r = 0; r < n; ++r) {
        double row_sum = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
          auto& v = avg[r * n + c];
          v = 0.5 * v + (r == c ? 0.5 : 0.0);
          row_sum += v;
        }
        for (std::size_t c = 0; c < n; ++c) avg[r * n + c] /= row_sum;
      }
    }
    std::vector<double> next(n * n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t k = 0; k < n; ++k) {
        const double a = avg[r * n + k];
        for (std::size_t c = 0; c < n; ++c) next[r * n + c] += a * current[k * n + c];
      }
    }
    current = next;
    result.layers.push_back(std::move(next));
  }
  return result;
}

double frobenius_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("matrices differ in size");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc);
}

std::vector<double> rollout_distance(const RolloutResult& a, const RolloutResult& b) {
  if (a.layers.size() != b.layers.size() || a.size != b.size) {
    throw ShapeError("rollouts differ in shape");
  }
  std::vector<double> out;
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    out.push_back(frobenius_distance(a.layers[l], b.layers[l]));
  }
  return out;
}

void write_pgm(const std::filesystem::path& path, std::span<const double> values,
               std::size_t rows, std::size_t cols) {
  check_matrix(values, rows, cols);
  auto out = open_out(path, true);
  out << "P5\n" << cols << " " << rows << "\n255\n";
  for (double v : values) {
    const double scaled = std::round(std::clamp(v, 0.0, 1.0) * 255.0);
    out.put(static_cast<char>(static_cast<unsigned char>(scaled)));
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_matrix_csv(const std::filesystem::path& path,
                      std::span<const double> values, std::size_t rows,
                      std::size_t cols) {
  check_matrix(values, rows, cols);
  auto out = open_out(path, false);
  out.precision(17);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (c) out << ',';
      out << values[r * cols + c];
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::vector<std::vector<double>> read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::filesystem::path> export_maps(const AttentionRecord& record,
                                               const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> files;
  for (std::size_t l = 0; l < record.layers; ++l) {
    for (std::size_t h = 0; h < record.heads; ++h) {
      const auto& map = record.at(l, h);
      const std::string stem =
          "attention_l" + std::to_string(l) + "_h" + std::to_string(h);
      files.push_back(dir / (stem + ".pgm"));
      write_pgm(files.back(), map.weights, map.size, map.size);
      files.push_back(dir / (stem + ".csv"));
      write_matrix_csv(files.back(), map.weights, map.size, map.size);
    }
  }
  return files;
}

std::vector<std::filesystem::path> export_rollout(const RolloutResult& rollout,
                                                  const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> files;
  for (std::size_t l = 0; l < rollout.layers.size(); ++l) {
    const std::string stem = "rollout_l" + std::to_string(l);
    files.push_back(dir / (stem + ".pgm"));
    write_pgm(files.back(), rollout.layers[l], rollout.size, rollout.size);
    files.push_back(dir / (stem + ".csv"));
    write_matrix_csv(files.back(), rollout.layers[l], rollout.size, rollout.size);
  }
  return files;
}

}  // namespace storseismic
