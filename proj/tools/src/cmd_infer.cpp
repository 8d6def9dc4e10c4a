#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>

#include "artifacts.hpp"
#include "commands.hpp"
#include "storseismic/analysis/attention.hpp"
#include "storseismic/errors.hpp"
#include "storseismic/finetune/metrics.hpp"
#include "storseismic/io/checkpoint.hpp"
#include "storseismic/seisgen/nmo.hpp"

namespace storseismic::cli {
namespace {

SeismicDataset like(const SeismicDataset& ds) {
  SeismicDataset out;
  out.traces = ds.traces;
  out.samples = ds.samples;
  out.dt = ds.dt;
  out.velocity_min = ds.velocity_min;
  out.velocity_max = ds.velocity_max;
  out.offsets = ds.offsets;
  return out;
}

VelocityScale scale_for(const fs::path& ckpt, const SeismicDataset& ds) {
  const fs::path meta = sidecar_path(ckpt);
  if (fs::exists(meta)) {
    const auto j = read_json(meta);
    if (j.contains("velocity_min") && j.contains("velocity_max")) {
      return {j.at("velocity_min").get<double>(), j.at("velocity_max").get<double>()};
    }
  }
  return {ds.velocity_min, ds.velocity_max};
}

void write_picks(const fs::path& dir, const SeismicDataset& ds,
                 const std::vector<std::vector<float>>& logits) {
  std::ofstream csv(dir / "picks.csv");
  if (!csv) throw DataError("cannot write picks.csv into '" + dir.string() + "'");
  csv << "gather,trace,offset_m,sample,time_s,probability\n";
  csv << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t g = 0; g < logits.size(); ++g) {
    const auto picks = picks_from_logits(logits[g], ds.traces, ds.samples);
    for (std::size_t x = 0; x < picks.size(); ++x) {
      csv << g << ',' << x << ',' << ds.offsets[x] << ',' << picks[x].index << ','
          << static_cast<double>(picks[x].index) * ds.dt << ','
          << picks[x].probability << '\n';
    }
    // Per-trace softmax over time, one PGM row per trace.
    std::vector<double> prob(ds.traces * ds.samples);
    for (std::size_t x = 0; x < ds.traces; ++x) {
      const float* row = logits[g].data() + x * ds.samples;
      const float peak = *std::max_element(row, row + ds.samples);
      double z = 0.0;
      for (std::size_t t = 0; t < ds.samples; ++t) z += std::exp(double(row[t]) - peak);
      for (std::size_t t = 0; t < ds.samples; ++t) {
        prob[x * ds.samples + t] = std::exp(double(row[t]) - peak) / z;
      }
    }
    write_pgm(dir / ("probability_g" + std::to_string(g) + ".pgm"), prob,
              ds.traces, ds.samples);
  }
}

}  // namespace

int run_infer(const InferArgs& args) {
  const fs::path ckpt = args.from;
  const Model model = model_from_checkpoint(load_checkpoint(ckpt));
  if (!model.has_head()) throw DataError("checkpoint '" + args.from + "' has no head");
  const SeismicDataset ds = load_dataset(args.in);
  check_fits(model.config(), ds);
  const fs::path dir = args.out;
  fs::create_directories(dir);

  const HeadKind kind = model.head().kind;
  const auto outputs = predict(model, ds.inputs);
  nlohmann::json resolved = {{"from", args.from},
                             {"in", args.in},
                             {"task", to_string(kind)},
                             {"gathers", ds.size()}};
  switch (kind) {
    case HeadKind::kReconstruction:
    case HeadKind::kDenoise: {
      SeismicDataset out = like(ds);
      for (std::size_t i = 0; i < ds.size(); ++i) {
        ShotGather g(ds.traces, ds.samples, ds.dt, ds.offsets, ds.inputs[i].domain());
        std::copy(outputs[i].begin(), outputs[i].end(), g.amplitudes().begin());
        out.inputs.push_back(std::move(g));
      }
      save_dataset(dir / "denoised.ssds", out);
      break;
    }
    case HeadKind::kVelocity:
    case HeadKind::kVrms: {
      const VelocityScale scale = scale_for(ckpt, ds);
      resolved["velocity_min"] = scale.min;
      resolved["velocity_max"] = scale.max;
      std::vector<std::vector<double>> rows;
      for (const auto& o : outputs) {
        std::vector<double> mps(o.size());
        for (std::size_t k = 0; k < o.size(); ++k) mps[k] = scale.denormalize(o[k]);
        rows.push_back(std::move(mps));
      }
      if (kind == HeadKind::kVelocity) {
        write_profiles_csv(dir / "velocity.csv", rows);
        break;
      }
      write_profiles_csv(dir / "vrms.csv", rows);
      NmoOptions o;
      o.offset_fraction = args.offset_fraction;
      o.stretch_mute = args.stretch_mute;
      resolved["offset_fraction"] = o.offset_fraction;
      resolved["stretch_mute"] = o.stretch_mute;
      SeismicDataset out = like(ds);
      for (std::size_t i = 0; i < ds.size(); ++i) {
        out.inputs.push_back(nmo_correct(ds.inputs[i], rows[i], o));
      }
      save_dataset(dir / "nmo.ssds", out);
      break;
    }
    case HeadKind::kFirstBreak:
      write_picks(dir, ds, outputs);
      break;
  }
  write_json(dir / "resolved_config.json", resolved);
  std::cout << "wrote " << to_string(kind) << " predictions for " << ds.size()
            << " gathers into " << dir.string() << '\n';
  return 0;
}

int run_analyze(const AnalyzeArgs& args) {
  const Model model = model_from_checkpoint(load_checkpoint(args.from));
  const SeismicDataset ds = load_dataset(args.in);
  check_fits(model.config(), ds);
  if (args.gather >= ds.size()) {
    throw ConfigError("--gather " + std::to_string(args.gather) + " is past the " +
                      std::to_string(ds.size()) + " gathers in '" + args.in + "'");
  }
  RolloutMode mode;
  try {
    mode = rollout_mode_from_string(args.mode);
  } catch (const ContractError& e) {
    throw ConfigError(e.what());
  }
  const fs::path dir = args.out;
  fs::create_directories(dir);
  // Maps do not depend on the head, so a head-less model still works.
  Model probe = model;
  if (!probe.has_head()) {
    Rng rng(0);
    probe.replace_head(make_head<float>(HeadKind::kReconstruction, probe.config(),
                                        HeadInit::kZeros, rng));
  }
  const ShotGather& gather = ds.inputs[args.gather];
  const AttentionRecord record = attention_maps(probe, gather);
  auto files = export_maps(record, dir);

  nlohmann::json summary = {{"from", args.from},
                            {"in", args.in},
                            {"gather", args.gather},
                            {"layers", record.layers},
                            {"heads", record.heads},
                            {"size", gather.traces()}};
  if (args.rollout) {
    const RolloutResult rollout = attention_rollout(record, mode);
    const auto more = export_rollout(rollout, dir);
    files.insert(files.end(), more.begin(), more.end());
    summary["rollout_mode"] = to_string(mode);
    if (args.compare) {
      Model other = model_from_checkpoint(load_checkpoint(*args.compare));
      if (!(other.config() == model.config())) {
        throw ConfigError("--compare checkpoint has a different model config");
      }
      if (!other.has_head()) {
        Rng rng(0);
        other.replace_head(make_head<float>(HeadKind::kReconstruction, other.config(),
                                            HeadInit::kZeros, rng));
      }
      const auto b = attention_rollout(attention_maps(other, gather), mode);
      summary["compare"] = *args.compare;
      summary["rollout_distance"] = rollout_distance(rollout, b);
    }
  }
  nlohmann::json names = nlohmann::json::array();
  for (const auto& f : files) names.push_back(f.filename().string());
  summary["files"] = names;
  write_json(dir / "summary.json", summary);
  std::cout << "wrote " << files.size() << " files into " << dir.string() << '\n';
  return 0;
}

}  // namespace storseismic::cli
