#include "run_config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <type_traits>

#include "storseismic/errors.hpp"

namespace storseismic::cli {
namespace {

using nlohmann::json;

// Reads one JSON object, remembering which keys were consumed so that
// leftovers can be reported.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where("") + " must be an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(where(key) + " must be a boolean");
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!v.is_number_unsigned()) {
        throw ConfigError(where(key) + " must be a nonnegative integer");
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(where(key) + " must be a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(where(key) + " must be a string");
    }
    out = v.get<T>();
  }

  template <typename T>
  void read(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return;
    T value{};
    read(key, value);
    out = value;
  }

  // Enum-valued string keys.
  template <typename E, typename F>
  void read_enum(const char* key, E& out, F&& parse) {
    std::string name;
    read(key, name);
    if (name.empty()) return;
    try {
      out = parse(name);
    } catch (const std::exception& e) {
      throw ConfigError(where(key) + ": " + e.what());
    }
  }

  bool has(const char* key) const { return j_.contains(key); }

  Section child(const char* key) {
    seen_.insert(key);
    static const json empty = json::object();
    return Section(j_.contains(key) ? j_.at(key) : empty, where(key));
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) {
        throw ConfigError("unknown config key '" + where(item.key().c_str()) + "'");
      }
    }
  }

 private:
  std::string where(const char* key) const {
    if (path_.empty()) return key;
    if (*key == '\0') return path_;
    return path_ + "." + key;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

HeadInit head_init_from_string(const std::string& name) {
  if (name == "zeros") return HeadInit::kZeros;
  if (name == "random") return HeadInit::kRandom;
  throw ContractError("unknown head init '" + name + "' (expected zeros or random)");
}

std::string to_string(HeadInit init) {
  return init == HeadInit::kZeros ? "zeros" : "random";
}

FirstArrivalModel first_arrivals_from_string(const std::string& name) {
  if (name == "direct") return FirstArrivalModel::kDirect;
  if (name == "eikonal") return FirstArrivalModel::kEikonal;
  throw ContractError("unknown first-arrival model '" + name +
                      "' (expected direct or eikonal)");
}

std::string to_string(FirstArrivalModel m) {
  return m == FirstArrivalModel::kDirect ? "direct" : "eikonal";
}

void check(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void validate(const RunConfig& c) {
  try {
    c.model.validate();
  } catch (const ContractError& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  check(c.schedule.batch_size > 0, "schedule.batch_size must be positive");
  check(c.schedule.learning_rate > 0.0 && std::isfinite(c.schedule.learning_rate),
        "schedule.learning_rate must be positive");
  check(c.freeze_k <= c.model.layers,
        "schedule.freeze_k exceeds model.layers");
  check(c.data.test_fraction >= 0.0 && c.data.test_fraction < 1.0,
        "data.test_fraction must lie in [0, 1)");
  check(c.data.field_fraction >= 0.0 && c.data.field_fraction <= 1.0,
        "data.field_fraction must lie in [0, 1]");
  check(c.mask.ratio > 0.0 && c.mask.ratio < 1.0, "mask.ratio must lie in (0, 1)");
  check(c.eval.max_offset_fraction > 0.0,
        "eval.max_offset_fraction must be positive");
  if (!c.task.empty()) {
    try {
      head_kind_from_string(c.task);
    } catch (const ContractError& e) {
      throw ConfigError(std::string("task: ") + e.what());
    }
  }
  try {
    c.preset();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("data.preset: ") + e.what());
  }
}

}  // namespace

GenerationPreset RunConfig::preset() const {
  GenerationPreset p = generation_preset(data.preset);
  if (data.traces) p.traces = *data.traces;
  return p;
}

PretrainOptions RunConfig::pretrain_options() const {
  PretrainOptions o;
  o.schedule = schedule;
  o.mask = mask;
  o.augment = augment;
  o.redraw_masks = redraw_masks;
  return o;
}

FirstBreakEvalOptions RunConfig::firstbreak_options(
    const std::vector<double>& offsets) const {
  FirstBreakEvalOptions o;
  o.threshold = eval.threshold;
  o.tolerance = eval.tolerance;
  double max_abs = 0.0;
  for (double x : offsets) max_abs = std::max(max_abs, std::abs(x));
  o.max_offset = eval.max_offset_fraction * max_abs;
  return o;
}

RunConfig parse_config(const json& j) {
  RunConfig c;
  Section root(j, "");

  Section m = root.child("model");
  m.read("hidden", c.model.hidden);
  m.read("layers", c.model.layers);
  m.read("heads", c.model.heads);
  m.read("samples", c.model.samples);
  m.read("max_traces", c.model.max_traces);
  m.read("intermediate_ratio", c.model.intermediate_ratio);
  m.read("dropout", c.model.dropout);
  m.read_enum("scale_mode", c.model.scale_mode, attention_scale_from_string);
  m.read("seed", c.model_seed);
  m.finish();

  Section d = root.child("data");
  d.read("preset", c.data.preset);
  d.read("traces", c.data.traces);
  d.read("train", c.data.train);
  d.read("test", c.data.test);
  d.read("test_fraction", c.data.test_fraction);
  d.read("train_size", c.data.train_size);
  d.read("test_size", c.data.test_size);
  d.read("seed", c.data.seed);
  d.read_enum("noise", c.data.noise, noise_recipe_from_string);
  d.read_enum("first_arrivals", c.data.first_arrivals, first_arrivals_from_string);
  d.read("field", c.data.field);
  d.read("field_fraction", c.data.field_fraction);
  d.read("total", c.data.total);
  d.finish();

  Section s = root.child("schedule");
  s.read("learning_rate", c.schedule.learning_rate);
  s.read("batch_size", c.schedule.batch_size);
  s.read("max_epochs", c.schedule.max_epochs);
  s.read("patience", c.schedule.patience);
  s.read("rectify", c.schedule.rectify);
  s.read("seed", c.schedule.seed);
  s.read("restore_best", c.schedule.restore_best);
  s.read("freeze_k", c.freeze_k);
  std::string init;
  s.read("head_init", init);
  if (!init.empty()) {
    try {
      c.head_init = head_init_from_string(init);
    } catch (const ContractError& e) {
      throw ConfigError(std::string("schedule.head_init: ") + e.what());
    }
  }
  s.finish();

  Section mk = root.child("mask");
  mk.read("ratio", c.mask.ratio);
  mk.read("noise_std", c.mask.noise_std);
  mk.read("noise_share", c.mask.noise_share);
  mk.read("swap_share", c.mask.swap_share);
  mk.read("redraw", c.redraw_masks);
  mk.finish();

  Section a = root.child("augment");
  a.read("max_shift", c.augment.max_shift);
  a.read("flip_probability", c.augment.flip_probability);
  a.finish();

  Section e = root.child("eval");
  e.read("threshold", c.eval.threshold);
  e.read("tolerance", c.eval.tolerance);
  e.read("max_offset_fraction", c.eval.max_offset_fraction);
  e.finish();

  root.read("task", c.task);
  root.read("output_dir", c.output_dir);
  root.finish();

  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " +
                      e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  json j;
  j["model"] = {{"hidden", c.model.hidden},
                {"layers", c.model.layers},
                {"heads", c.model.heads},
                {"samples", c.model.samples},
                {"max_traces", c.model.max_traces},
                {"intermediate_ratio", c.model.intermediate_ratio},
                {"dropout", c.model.dropout},
                {"scale_mode", to_string(c.model.scale_mode)},
                {"seed", c.model_seed}};
  j["data"] = {{"preset", c.data.preset},
               {"traces", c.data.traces ? json(*c.data.traces) : json(nullptr)},
               {"train", c.data.train},
               {"test", c.data.test},
               {"test_fraction", c.data.test_fraction},
               {"train_size", c.data.train_size},
               {"test_size", c.data.test_size},
               {"seed", c.data.seed},
               {"noise", to_string(c.data.noise)},
               {"first_arrivals", to_string(c.data.first_arrivals)},
               {"field", c.data.field},
               {"field_fraction", c.data.field_fraction},
               {"total", c.data.total}};
  j["schedule"] = {{"learning_rate", c.schedule.learning_rate},
                   {"batch_size", c.schedule.batch_size},
                   {"max_epochs", c.schedule.max_epochs},
                   {"patience", c.schedule.patience},
                   {"rectify", c.schedule.rectify},
                   {"seed", c.schedule.seed},
                   {"restore_best", c.schedule.restore_best},
                   {"freeze_k", c.freeze_k},
                   {"head_init", c.head_init ? to_string(*c.head_init) : ""}};
  j["mask"] = {{"ratio", c.mask.ratio},
               {"noise_std", c.mask.noise_std},
               {"noise_share", c.mask.noise_share},
               {"swap_share", c.mask.swap_share},
               {"redraw", c.redraw_masks}};
  j["augment"] = {{"max_shift", c.augment.max_shift},
                  {"flip_probability", c.augment.flip_probability}};
  j["eval"] = {{"threshold", c.eval.threshold},
               {"tolerance", c.eval.tolerance},
               {"max_offset_fraction", c.eval.max_offset_fraction}};
  j["task"] = c.task;
  j["output_dir"] = c.output_dir;
  return j;
}

void write_resolved(const RunConfig& config, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "resolved_config.json");
  if (!out) throw DataError("cannot write resolved config into '" + dir.string() + "'");
  out << to_json(config).dump(2) << '\n';
}

}  // namespace storseismic::cli
