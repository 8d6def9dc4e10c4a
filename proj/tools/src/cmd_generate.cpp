#include <iostream>

#include "artifacts.hpp"
#include "commands.hpp"
#include "storseismic/errors.hpp"
#include "storseismic/io/corpus.hpp"
#include "storseismic/seisgen/nmo.hpp"

namespace storseismic::cli {

int run_generate(const GenerateArgs& args) {
  if (args.n == 0) throw ConfigError("--n must be positive");
  GenerationPreset preset;
  try {
    preset = generation_preset(args.preset);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (args.traces) {
    if (*args.traces == 0) throw ConfigError("--traces must be positive");
    preset.traces = *args.traces;
  }
  CorpusOptions o;
  o.first_index = args.first_index;
  try {
    o.noise = noise_recipe_from_string(args.noise);
  } catch (const ContractError& e) {
    throw ConfigError(e.what());
  }
  if (args.first_arrivals == "eikonal") {
    o.synth.first_arrivals = FirstArrivalModel::kEikonal;
  } else if (args.first_arrivals != "direct") {
    throw ConfigError("--first-arrivals must be direct or eikonal");
  }

  const SeismicDataset ds = generate_dataset(preset, args.n, args.seed, o);
  const fs::path out = args.out;
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  save_dataset(out, ds);

  nlohmann::json resolved = {
      {"preset", preset.name},     {"n", args.n},
      {"seed", args.seed},         {"first_index", args.first_index},
      {"traces", preset.traces},   {"samples", preset.samples},
      {"dt", preset.dt},           {"near_offset", preset.near_offset},
      {"spacing", preset.spacing}, {"peak_hz", preset.peak_hz},
      {"noise", args.noise},       {"first_arrivals", args.first_arrivals}};
  write_json(sidecar_path(out), resolved);
  std::cout << "wrote " << ds.size() << " gathers (X=" << ds.traces
            << ", T=" << ds.samples << ") to " << out.string() << '\n';
  return 0;
}

int run_params(const ParamsArgs& args) {
  if (args.table) {
    struct Row { char name; std::size_t h, l, a; };
    const Row rows[] = {{'A', 256, 4, 4}, {'B', 128, 4, 4}, {'C', 512, 4, 4},
                        {'D', 256, 2, 4}, {'E', 256, 8, 4}, {'F', 256, 4, 2},
                        {'G', 256, 4, 8}};
    std::cout << "model,hidden,layers,heads,samples,parameters\n";
    for (const auto& r : rows) {
      ModelConfig c;
      c.hidden = r.h;
      c.layers = r.l;
      c.heads = r.a;
      c.samples = args.samples;
      std::cout << r.name << ',' << r.h << ',' << r.l << ',' << r.a << ','
                << args.samples << ',' << param_count(c) << '\n';
    }
    return 0;
  }
  ModelConfig c;
  c.hidden = args.hidden;
  c.layers = args.layers;
  c.heads = args.heads;
  c.samples = args.samples;
  try {
    c.validate();
  } catch (const ContractError& e) {
    throw ConfigError(e.what());
  }
  std::cout << param_count(c) << '\n';
  return 0;
}

int run_nmo(const NmoArgs& args) {
  SeismicDataset ds = load_dataset(args.in);
  const auto profiles = read_profiles_csv(args.vrms);
  if (profiles.size() != ds.size()) {
    throw DataError("vrms CSV has " + std::to_string(profiles.size()) +
                    " rows for " + std::to_string(ds.size()) + " gathers");
  }
  NmoOptions o;
  o.offset_fraction = args.offset_fraction;
  o.stretch_mute = args.stretch_mute;
  o.exclude_far = args.exclude_far;
  SeismicDataset out;
  out.traces = ds.traces;
  out.samples = ds.samples;
  out.dt = ds.dt;
  out.velocity_min = ds.velocity_min;
  out.velocity_max = ds.velocity_max;
  out.offsets = ds.offsets;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (profiles[i].size() != ds.samples) {
      throw DataError("vrms profile length does not match T");
    }
    out.inputs.push_back(nmo_correct(ds.inputs[i], profiles[i], o));
  }
  const fs::path path = args.out;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  save_dataset(path, out);
  write_json(sidecar_path(path),
             {{"in", args.in},
              {"vrms", args.vrms},
              {"offset_fraction", o.offset_fraction},
              {"stretch_mute", o.stretch_mute},
              {"exclude_far", o.exclude_far}});
  std::cout << "NMO-corrected " << out.size() << " gathers into " << path.string()
            << '\n';
  return 0;
}

}  // namespace storseismic::cli
