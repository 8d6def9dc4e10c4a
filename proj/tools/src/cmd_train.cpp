#include <cmath>
#include <cstdio>
#include <iostream>

#include "artifacts.hpp"
#include "commands.hpp"
#include "storseismic/errors.hpp"
#include "storseismic/finetune/metrics.hpp"
#include "storseismic/io/checkpoint.hpp"
#include "storseismic/pretrain/pretrain.hpp"

namespace storseismic::cli {
namespace {

using nlohmann::json;

constexpr std::uint64_t kMixStream = 0x6d6978;
constexpr std::uint64_t kHeadStream = 0x68656164;
// Top-up gathers for mixing come from indices far past any train/test set.
constexpr std::uint64_t kTopUpFirstIndex = 1'000'000;

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json state_to_json(const TrainingState& s, std::int64_t step) {
  json history = json::array();
  for (const auto& e : s.history) {
    history.push_back({e.epoch, e.train_loss, e.test_loss, e.seconds});
  }
  return {{"next_epoch", s.next_epoch},
          {"best_test_loss", finite_or_null(s.best_test_loss)},
          {"best_epoch", s.best_epoch},
          {"epochs_since_best", s.epochs_since_best},
          {"optimizer_step", step},
          {"history", history}};
}

TrainingState state_from_json(const json& j, std::int64_t& step) {
  TrainingState s;
  try {
    s.next_epoch = j.at("next_epoch").get<std::size_t>();
    const auto& best = j.at("best_test_loss");
    if (!best.is_null()) s.best_test_loss = best.get<double>();
    s.best_epoch = j.at("best_epoch").get<std::size_t>();
    s.epochs_since_best = j.at("epochs_since_best").get<std::size_t>();
    step = j.at("optimizer_step").get<std::int64_t>();
    for (const auto& row : j.at("history")) {
      s.history.push_back({row.at(0).get<std::size_t>(), row.at(1).get<double>(),
                           row.at(2).get<double>(), row.at(3).get<double>()});
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("training state is malformed: ") + e.what());
  }
  return s;
}

void print_epoch(const EpochStats& e, bool improved) {
  std::printf("epoch %4zu  train %.6g  test %.6g  %.2fs%s\n", e.epoch,
              e.train_loss, e.test_loss, e.seconds, improved ? "  *" : "");
  std::fflush(stdout);
}

HeadKind task_kind(const std::string& name) {
  HeadKind kind;
  try {
    kind = head_kind_from_string(name);
  } catch (const ContractError& e) {
    throw ConfigError(e.what());
  }
  if (kind == HeadKind::kReconstruction) {
    throw ConfigError("reconstruction is the pre-training task, not a fine-tuning task");
  }
  return kind;
}

json task_metrics(const Model& model, HeadKind kind,
                  const std::vector<LabeledSample>& samples,
                  const VelocityScale& scale, const RunConfig& c,
                  const std::vector<double>& offsets) {
  if (samples.empty()) return nullptr;
  switch (kind) {
    case HeadKind::kDenoise:
      return {{"mse", eval_denoise(model, samples).mse}};
    case HeadKind::kVelocity:
      return {{"mae_mps", eval_velocity(model, samples, scale).mae},
              {"velocity_range_mps", scale.max - scale.min}};
    case HeadKind::kVrms:
      return {{"mae_mps", eval_vrms(model, samples, scale).mae},
              {"velocity_range_mps", scale.max - scale.min}};
    case HeadKind::kFirstBreak: {
      const auto o = c.firstbreak_options(offsets);
      const auto m = eval_firstbreak(model, samples, o);
      return {{"accuracy", m.accuracy},
              {"hit_rate", m.hit_rate},
              {"traces", m.traces},
              {"threshold", o.threshold},
              {"tolerance", o.tolerance},
              {"max_offset_m", *o.max_offset}};
    }
    case HeadKind::kReconstruction:
      break;
  }
  return nullptr;
}

}  // namespace

int run_pretrain(const PretrainArgs& args) {
  RunConfig c = load_config(args.config);
  if (args.out) c.output_dir = *args.out;
  const fs::path dir = c.output_dir;
  write_resolved(c, dir);

  Splits s = load_splits(c);
  check_fits(c.model, s.train);
  std::vector<ShotGather> train = s.train.inputs;
  const std::vector<ShotGather>& test = s.test.inputs;

  json composition = {{"from_a", train.size()}, {"from_b", 0}, {"synthesized", 0}};
  if (c.data.field_fraction > 0.0) {
    const SeismicDataset field = load_field(c);
    if (field.traces != s.train.traces || field.samples != s.train.samples) {
      throw DataError("field data and train data differ in shape");
    }
    const GenerationPreset preset = c.preset();
    if (preset.traces != s.train.traces || preset.samples != s.train.samples) {
      throw ConfigError("data.preset does not match the train data shape");
    }
    const std::size_t total = c.data.total ? c.data.total : train.size();
    Rng rng = Rng::stream(c.data.seed, kMixStream);
    MixedCorpus mixed = build_mixed_corpus(
        train, field.inputs, c.data.field_fraction, total, rng,
        [&](std::size_t i) {
          return generate_sample(preset, c.data.seed, kTopUpFirstIndex + i)
              .synth.gather;
        });
    composition = {{"from_a", mixed.from_a},
                   {"from_b", mixed.from_b},
                   {"synthesized", mixed.synthesized}};
    train = std::move(mixed.gathers);
  }

  Rng init(c.model_seed);
  Model model(c.model, init);
  AdamOptimizer<float> optimizer{AdamOptions{}};
  TrainingState state;

  const fs::path last_path = dir / "last.ssck";
  const fs::path best_path = dir / "best.ssck";
  const fs::path state_path = dir / "state.json";
  if (args.resume && fs::exists(last_path)) {
    const Checkpoint last = load_checkpoint(last_path);
    if (!(last.config == c.model)) {
      throw ConfigError("checkpoint in '" + dir.string() +
                        "' was written for a different model config");
    }
    model = model_from_checkpoint(last);
    std::int64_t step = 0;
    state = state_from_json(read_json(state_path), step);
    restore_optimizer(last, step, optimizer);
    if (fs::exists(best_path)) {
      state.best_values = snapshot_parameters(model_from_checkpoint(load_checkpoint(best_path)));
    }
    std::cout << "resuming at epoch " << state.next_epoch << '\n';
  }

  const PretrainOptions options = c.pretrain_options();
  TrainingHooks hooks;
  hooks.on_epoch = [&](const EpochStats& e, const TrainingState& st,
                       const AdamOptimizer<float>& opt, bool improved) {
    if (improved) save_checkpoint(best_path, make_checkpoint(model));
    save_checkpoint(last_path, make_checkpoint(model, &opt));
    write_json(state_path, state_to_json(st, opt.step_count()));
    write_loss_csv(dir / "loss.csv", st.history);
    print_epoch(e, improved);
  };
  const TrainingReport report = pretrain(model, train, test, options, optimizer, state, hooks);

  json metrics = {{"best_epoch", report.best_epoch},
                  {"epochs_run", report.epochs_run},
                  {"early_stopped", report.early_stopped},
                  {"steps", report.steps},
                  {"wall_seconds", report.wall_seconds},
                  {"train_gathers", train.size()},
                  {"test_gathers", test.size()},
                  {"composition", composition},
                  {"parameters", model.parameter_count()}};
  if (!test.empty()) {
    const auto held_out = held_out_masks(test, options);
    const double baseline = zero_prediction_baseline(held_out);
    const double best = evaluate_masked(model, held_out);
    metrics["test_masked_mse"] = best;
    metrics["zero_baseline_mse"] = baseline;
    metrics["ratio_to_baseline"] = best / baseline;
  }
  write_json(dir / "metrics.json", metrics);
  std::cout << "best epoch " << report.best_epoch << ", checkpoint "
            << best_path.string() << '\n';
  return 0;
}

int run_finetune(const FinetuneArgs& args) {
  Model model = model_from_checkpoint(load_checkpoint(args.from));
  RunConfig c = load_config(args.config);
  if (!args.task.empty()) c.task = args.task;
  if (c.task.empty()) throw ConfigError("no task given (--task or config 'task')");
  const HeadKind kind = task_kind(c.task);
  if (args.freeze_k) c.freeze_k = *args.freeze_k;
  if (args.out) c.output_dir = *args.out;

  c.model = model.config();
  if (c.freeze_k > c.model.layers) {
    throw ConfigError("freeze_k=" + std::to_string(c.freeze_k) + " exceeds the " +
                      std::to_string(c.model.layers) + " encoder layers");
  }
  const fs::path dir = c.output_dir;
  write_resolved(c, dir);

  const Splits s = load_splits(c);
  check_fits(c.model, s.train);
  const VelocityScale scale{s.train.velocity_min, s.train.velocity_max};
  const auto train = labeled_samples(s.train, kind);
  const auto test = labeled_samples(s.test, kind);

  json metrics = {{"task", c.task}, {"freeze_k", c.freeze_k}};
  if (kind == HeadKind::kDenoise && model.has_head() &&
      model.head().kind == HeadKind::kReconstruction && !test.empty()) {
    metrics["test_before"] = {{"mse", eval_denoise(model, test).mse}};
  }

  TaskSpec task = TaskSpec::defaults(kind);
  task.freeze_k = c.freeze_k;
  task.schedule = c.schedule;
  if (c.head_init) task.head_init = *c.head_init;
  Rng rng = Rng::stream(c.schedule.seed, kHeadStream);
  FinetuneOptions options;
  options.scale = scale;
  AdamOptimizer<float> optimizer{AdamOptions{}};
  TrainingState state;
  TrainingHooks hooks;
  hooks.on_epoch = [&](const EpochStats& e, const TrainingState& st,
                       const AdamOptimizer<float>&, bool improved) {
    write_loss_csv(dir / "loss.csv", st.history);
    print_epoch(e, improved);
  };
  const TrainingReport report =
      finetune(model, task, train, test, rng, options, optimizer, state, hooks);

  const fs::path ckpt = dir / "model.ssck";
  save_checkpoint(ckpt, make_checkpoint(model));
  write_json(sidecar_path(ckpt), {{"task", c.task},
                                  {"freeze_k", c.freeze_k},
                                  {"velocity_min", scale.min},
                                  {"velocity_max", scale.max}});

  metrics["loss"] = to_string(loss_for(kind));
  metrics["best_epoch"] = report.best_epoch;
  metrics["epochs_run"] = report.epochs_run;
  metrics["early_stopped"] = report.early_stopped;
  metrics["best_test_loss"] = finite_or_null(report.best_test_loss);
  metrics["wall_seconds"] = report.wall_seconds;
  metrics["test"] = task_metrics(model, kind, test, scale, c, s.train.offsets);
  const SeismicDataset field = load_field(c);
  if (field.size() > 0) {
    check_fits(c.model, field);
    metrics["field"] = task_metrics(model, kind, labeled_samples(field, kind),
                                    scale, c, field.offsets);
  }
  write_json(dir / "metrics.json", metrics);
  std::cout << "wrote " << ckpt.string() << " and metrics.json\n";
  return 0;
}

}  // namespace storseismic::cli
