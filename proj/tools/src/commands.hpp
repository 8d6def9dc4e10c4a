#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

namespace storseismic::cli {

struct GenerateArgs {
  std::string preset = "desk";
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::optional<std::size_t> traces;
  std::string noise = "none";
  std::string first_arrivals = "direct";
  std::uint64_t first_index = 0;
};

struct PretrainArgs {
  std::string config;
  bool resume = false;
  std::optional<std::string> out;
};

struct FinetuneArgs {
  std::string task;
  std::string from;
  std::string config;
  std::optional<std::size_t> freeze_k;
  std::optional<std::string> out;
};

struct InferArgs {
  std::string from;
  std::string in;
  std::string out;
  double offset_fraction = 0.5;
  double stretch_mute = 0.5;
};

struct NmoArgs {
  std::string in;
  std::string vrms;
  std::string out;
  double offset_fraction = 0.5;
  double stretch_mute = 0.5;
  bool exclude_far = false;
};

struct AnalyzeArgs {
  std::string from;
  std::string in;
  std::string out;
  bool rollout = false;
  std::size_t gather = 0;
  std::string mode = "with_identity";
  std::optional<std::string> compare;
};

struct ParamsArgs {
  std::size_t hidden = 256;
  std::size_t layers = 4;
  std::size_t heads = 4;
  std::size_t samples = 376;
  bool table = false;
};

int run_generate(const GenerateArgs& args);
int run_pretrain(const PretrainArgs& args);
int run_finetune(const FinetuneArgs& args);
int run_infer(const InferArgs& args);
int run_nmo(const NmoArgs& args);
int run_analyze(const AnalyzeArgs& args);
int run_params(const ParamsArgs& args);

}  // namespace storseismic::cli
