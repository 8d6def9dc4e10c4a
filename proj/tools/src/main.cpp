#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"
#include "run_config.hpp"
#include "storseismic/errors.hpp"

namespace {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfig = 2,
  kData = 3,
  kNumeric = 4,
};

int fail(int code, const std::string& what) {
  std::cerr << "storseismic: " << what << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace storseismic::cli;
  CLI::App app{"Seismic trace transformer: data generation, pre-training, "
               "fine-tuning, inference and attention analysis"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "write a labelled synthetic SSDS dataset");
  g->add_option("--preset", gen.preset, "snist, field or desk")->required();
  g->add_option("--n", gen.n, "number of gathers")->required();
  g->add_option("--seed", gen.seed, "corpus seed");
  g->add_option("--out", gen.out, "output SSDS file")->required();
  g->add_option("--traces", gen.traces, "override the preset trace count");
  g->add_option("--noise", gen.noise, "none, gaussian or field_proxy");
  g->add_option("--first-arrivals", gen.first_arrivals, "direct or eikonal");
  g->add_option("--first-index", gen.first_index,
                "index of the first sample within the seed's corpus");

  PretrainArgs pre;
  auto* p = app.add_subcommand("pretrain", "masked-trace pre-training");
  p->add_option("--config", pre.config, "JSON run config")->required();
  p->add_flag("--resume", pre.resume, "continue from last.ssck in the output dir");
  p->add_option("--out", pre.out, "output directory (overrides output_dir)");

  FinetuneArgs fine;
  auto* f = app.add_subcommand("finetune", "fine-tune a pre-trained checkpoint");
  f->add_option("--task", fine.task, "denoise, velocity, firstbreak or vrms");
  f->add_option("--from", fine.from, "pre-trained SSCK checkpoint")->required();
  f->add_option("--config", fine.config, "JSON run config")->required();
  f->add_option("--freeze-k", fine.freeze_k, "freeze the embedding and first k layers");
  f->add_option("--out", fine.out, "output directory (overrides output_dir)");

  InferArgs inf;
  auto* i = app.add_subcommand("infer", "batch prediction with a fine-tuned model");
  i->add_option("--from", inf.from, "SSCK checkpoint")->required();
  i->add_option("--in", inf.in, "input SSDS dataset")->required();
  i->add_option("--out", inf.out, "output directory")->required();
  i->add_option("--offset-fraction", inf.offset_fraction,
                "NMO: correct traces up to this fraction of the max offset");
  i->add_option("--stretch-mute", inf.stretch_mute, "NMO stretch mute");

  NmoArgs nmo;
  auto* n = app.add_subcommand("nmo", "NMO-correct a dataset with V_rms profiles");
  n->add_option("--in", nmo.in, "input SSDS dataset")->required();
  n->add_option("--vrms", nmo.vrms, "V_rms CSV as written by infer")->required();
  n->add_option("--out", nmo.out, "output SSDS file")->required();
  n->add_option("--offset-fraction", nmo.offset_fraction,
                "correct traces up to this fraction of the max offset");
  n->add_option("--stretch-mute", nmo.stretch_mute, "stretch mute");
  n->add_flag("--exclude-far", nmo.exclude_far, "zero the uncorrected far traces");

  AnalyzeArgs ana;
  auto* a = app.add_subcommand("analyze", "export attention maps and rollout");
  a->add_option("--from", ana.from, "SSCK checkpoint")->required();
  a->add_option("--in", ana.in, "input SSDS dataset")->required();
  a->add_option("--out", ana.out, "output directory")->required();
  a->add_flag("--rollout", ana.rollout, "also export attention rollout");
  a->add_option("--gather", ana.gather, "gather index within the dataset");
  a->add_option("--mode", ana.mode, "rollout mode: with_identity or raw");
  a->add_option("--compare", ana.compare,
                "second checkpoint; reports per-layer rollout distance");

  ParamsArgs par;
  auto* c = app.add_subcommand("params", "trainable parameter count");
  c->add_option("--hidden", par.hidden);
  c->add_option("--layers", par.layers);
  c->add_option("--heads", par.heads);
  c->add_option("--samples", par.samples);
  c->add_flag("--table", par.table, "print the reference model size table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*g) return run_generate(gen);
    if (*p) return run_pretrain(pre);
    if (*f) return run_finetune(fine);
    if (*i) return run_infer(inf);
    if (*n) return run_nmo(nmo);
    if (*a) return run_analyze(ana);
    if (*c) return run_params(par);
  } catch (const ConfigError& e) {
    return fail(kConfig, std::string("config error: ") + e.what());
  } catch (const storseismic::ContractError& e) {
    return fail(kConfig, std::string("config error: ") + e.what());
  } catch (const std::out_of_range& e) {
    return fail(kConfig, std::string("config error: ") + e.what());
  } catch (const storseismic::DataError& e) {
    return fail(kData, std::string("data error: ") + e.what());
  } catch (const storseismic::ShapeError& e) {
    return fail(kData, std::string("data error: ") + e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(kData, std::string("data error: ") + e.what());
  } catch (const storseismic::NumericError& e) {
    return fail(kNumeric, std::string("numeric failure: ") + e.what());
  } catch (const std::exception& e) {
    return fail(kFailure, e.what());
  }
  return kFailure;
}
