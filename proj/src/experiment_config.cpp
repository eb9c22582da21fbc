#include "lite/experiment_config.hpp"

#include <fstream>

#include "lite/errors.hpp"
#include "lite/json_util.hpp"

namespace lite {

using nlohmann::json;
using namespace json_util;

namespace {

const json& section(const json& j, const char* key) {
  static const json empty = json::object();
  auto it = j.find(key);
  return it == j.end() ? empty : *it;
}

std::vector<double> read_ratios(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a non-empty array of ratios");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (!j[i].is_number()) throw ConfigError(p, "expected a number");
    const double r = j[i].get<double>();
    if (!(r > 0.0 && r <= 1.0)) throw ConfigError(p, "P-Ratio must be in (0, 1]");
    out.push_back(r);
  }
  return out;
}

TapPoint parse_tap_point(const std::string& s, const std::string& path) {
  if (s == "mlp_out") return TapPoint::mlp_out;
  if (s == "block_out") return TapPoint::block_out;
  if (s == "mlp_hidden") return TapPoint::mlp_hidden;
  if (s == "block_in") return TapPoint::block_in;
  throw ConfigError(path, "expected one of mlp_out, block_out, mlp_hidden, block_in");
}

ScoreSource parse_policy(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a policy name");
  auto s = parse_score_source(j.get<std::string>());
  if (!s)
    throw ConfigError(path, "unknown policy '" + j.get<std::string>() +
                                "' (expected oracle-true, oracle-pred, selector, random, attention or motion)");
  return *s;
}

}  // namespace

TrainOptions train_options_from_json(const json& j, const std::string& path, TrainOptions o) {
  require_object(j, path);
  check_keys(j, path,
             {"epochs", "batch_size", "lr", "min_lr", "warmup_epochs", "weight_decay", "grad_clip",
              "token_drop_prob", "token_drop_min_keep"});
  read_size(j, "epochs", path, o.epochs, true);
  read_size(j, "batch_size", path, o.batch_size);
  read_double(j, "lr", path, o.lr);
  read_double(j, "min_lr", path, o.min_lr);
  read_size(j, "warmup_epochs", path, o.warmup_epochs, true);
  read_double(j, "weight_decay", path, o.weight_decay);
  read_double(j, "grad_clip", path, o.grad_clip);
  read_double(j, "token_drop_prob", path, o.token_drop_prob);
  read_double(j, "token_drop_min_keep", path, o.token_drop_min_keep);
  if (!(o.lr > 0.0)) throw ConfigError(join(path, "lr"), "must be positive");
  if (o.min_lr < 0.0 || o.min_lr > o.lr) throw ConfigError(join(path, "min_lr"), "must be in [0, lr]");
  if (!(o.token_drop_prob >= 0.0 && o.token_drop_prob <= 1.0))
    throw ConfigError(join(path, "token_drop_prob"), "must be in [0, 1]");
  if (!(o.token_drop_min_keep > 0.0 && o.token_drop_min_keep <= 1.0))
    throw ConfigError(join(path, "token_drop_min_keep"), "must be in (0, 1]");
  return o;
}

void to_json(json& j, const TrainOptions& o) {
  j = {{"epochs", o.epochs},
       {"batch_size", o.batch_size},
       {"lr", o.lr},
       {"min_lr", o.min_lr},
       {"warmup_epochs", o.warmup_epochs},
       {"weight_decay", o.weight_decay},
       {"grad_clip", o.grad_clip},
       {"token_drop_prob", o.token_drop_prob},
       {"token_drop_min_keep", o.token_drop_min_keep}};
}

void ExperimentConfig::validate() const {
  backbone.validate("config.backbone");
  dataset.validate("config.dataset");
  if (dataset.frames != backbone.frames || dataset.height != backbone.height || dataset.width != backbone.width)
    throw ConfigError("config.dataset", "clip size " + std::to_string(dataset.frames) + "x" +
                                            std::to_string(dataset.height) + "x" + std::to_string(dataset.width) +
                                            " does not match config.backbone");
  if (dataset.classes != backbone.classes)
    throw ConfigError("config.backbone.classes", "must equal config.dataset.classes");
  if (oracle.tap_block && *oracle.tap_block >= backbone.blocks)
    throw ConfigError("config.oracle.tap_block", "must be < config.backbone.blocks");
  if (selector.embed_dim != backbone.embed_dim)
    throw ConfigError("config.selector.embed_dim", "must equal config.backbone.embed_dim");
  if (sweep.attention_block >= backbone.blocks)
    throw ConfigError("config.sweep.attention_block", "must be < config.backbone.blocks");
  if (!(report.decay_p_ratio > 0.0 && report.decay_p_ratio < 1.0))
    throw ConfigError("config.report.decay_p_ratio", "must be in (0, 1)");
  if (backbone.height % proxy.downsample || backbone.width % proxy.downsample)
    throw ConfigError("config.proxy.downsample", "must divide the clip height and width");
}

FeatureTap ExperimentConfig::tap() const {
  return {oracle.tap_block.value_or(backbone.blocks - 1), oracle.tap_point};
}

ExperimentConfig experiment_config_from_json(const json& j, const std::string& path) {
  require_object(j, path);
  check_keys(j, path,
             {"seed", "out", "dataset", "backbone", "training", "oracle", "selector", "selector_training", "proxy",
              "budget", "sweep", "flops", "report"});
  ExperimentConfig c;
  read_u64(j, "seed", path, c.seed);
  std::string out = c.out.string();
  read_string(j, "out", path, out);
  c.out = out;

  c.backbone = model_config_from_json(section(j, "backbone"), join(path, "backbone"));

  const json& ds = section(j, "dataset");
  require_object(ds, join(path, "dataset"));
  if (ds.contains("seed")) throw ConfigError(join(path, "dataset.seed"), "set the top-level seed instead");
  if (ds.contains("tube")) throw ConfigError(join(path, "dataset.tube"), "the tube layout comes from backbone");
  json ds_full = ds;
  ds_full["tube"] = {c.backbone.tube_t, c.backbone.tube_h, c.backbone.tube_w};
  auto inherit = [&](const char* key, std::size_t value) {
    if (!ds_full.contains(key)) ds_full[key] = value;
  };
  inherit("frames", c.backbone.frames);
  inherit("height", c.backbone.height);
  inherit("width", c.backbone.width);
  inherit("classes", c.backbone.classes);
  c.dataset = dataset_spec_from_json(ds_full, join(path, "dataset"));
  c.dataset.seed = c.seed;

  TrainOptions backbone_defaults;
  backbone_defaults.lr = 3e-3;
  backbone_defaults.token_drop_prob = 0.5;
  c.training = train_options_from_json(section(j, "training"), join(path, "training"), backbone_defaults);

  {
    const json& o = section(j, "oracle");
    const std::string p = join(path, "oracle");
    require_object(o, p);
    check_keys(o, p, {"tap_block", "tap_point"});
    if (o.contains("tap_block")) {
      std::size_t b = 0;
      read_size(o, "tap_block", p, b, true);
      c.oracle.tap_block = b;
    }
    std::string point = "mlp_out";
    read_string(o, "tap_point", p, point);
    c.oracle.tap_point = parse_tap_point(point, join(p, "tap_point"));
  }

  {
    json sel = section(j, "selector");
    require_object(sel, join(path, "selector"));
    if (!sel.contains("embed_dim")) sel["embed_dim"] = c.backbone.embed_dim;
    c.selector = selector_config_from_json(sel, join(path, "selector"));
  }
  {
    const json& s = section(j, "selector_training");
    const std::string p = join(path, "selector_training");
    require_object(s, p);
    check_keys(s, p, {"epochs", "batch_clips", "lr", "min_lr", "weight_decay"});
    read_size(s, "epochs", p, c.selector_training.epochs, true);
    read_size(s, "batch_clips", p, c.selector_training.batch_clips);
    read_double(s, "lr", p, c.selector_training.lr);
    read_double(s, "min_lr", p, c.selector_training.min_lr);
    read_double(s, "weight_decay", p, c.selector_training.weight_decay);
    if (!(c.selector_training.lr > 0.0)) throw ConfigError(join(p, "lr"), "must be positive");
  }
  {
    const json& s = section(j, "proxy");
    const std::string p = join(path, "proxy");
    require_object(s, p);
    check_keys(s, p, {"downsample", "training"});
    read_size(s, "downsample", p, c.proxy.downsample);
    TrainOptions proxy_defaults;
    proxy_defaults.lr = 3e-3;
    c.proxy.training = train_options_from_json(section(s, "training"), join(p, "training"), proxy_defaults);
  }
  if (j.contains("budget")) c.budget = budget_policy_from_json(j["budget"], join(path, "budget"));
  {
    const json& s = section(j, "sweep");
    const std::string p = join(path, "sweep");
    require_object(s, p);
    check_keys(s, p, {"policies", "p_ratios", "seeds", "attention_block"});
    if (s.contains("policies")) {
      const json& arr = s["policies"];
      if (!arr.is_array() || arr.empty()) throw ConfigError(join(p, "policies"), "expected a non-empty array");
      c.sweep.policies.clear();
      for (std::size_t i = 0; i < arr.size(); ++i)
        c.sweep.policies.push_back(parse_policy(arr[i], join(p, "policies") + "[" + std::to_string(i) + "]"));
    }
    if (s.contains("p_ratios")) c.sweep.p_ratios = read_ratios(s["p_ratios"], join(p, "p_ratios"));
    if (s.contains("seeds")) {
      const json& arr = s["seeds"];
      if (!arr.is_array() || arr.empty()) throw ConfigError(join(p, "seeds"), "expected a non-empty array");
      c.sweep.seeds.clear();
      for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!(arr[i].is_number_unsigned() || (arr[i].is_number_integer() && arr[i].get<std::int64_t>() >= 0)))
          throw ConfigError(join(p, "seeds") + "[" + std::to_string(i) + "]", "expected a non-negative integer");
        c.sweep.seeds.push_back(arr[i].get<std::uint64_t>());
      }
    }
    read_size(s, "attention_block", p, c.sweep.attention_block, true);
  }
  c.flops = convention_from_json(section(j, "flops"), join(path, "flops"));
  {
    const json& s = section(j, "report");
    const std::string p = join(path, "report");
    require_object(s, p);
    check_keys(s, p, {"histogram_bins", "pareto_threshold", "decay_p_ratio", "decay_policy"});
    read_size(s, "histogram_bins", p, c.report.histogram_bins);
    read_double(s, "pareto_threshold", p, c.report.pareto_threshold);
    read_double(s, "decay_p_ratio", p, c.report.decay_p_ratio);
    if (s.contains("decay_policy")) c.report.decay_policy = parse_policy(s["decay_policy"], join(p, "decay_policy"));
  }
  c.validate();
  return c;
}

flops::Convention convention_from_json(const json& j, const std::string& path) {
  require_object(j, path);
  check_keys(j, path, {"flops_per_mac", "elementwise"});
  flops::Convention c;
  std::size_t fpm = c.flops_per_mac;
  read_size(j, "flops_per_mac", path, fpm);
  c.flops_per_mac = fpm;
  read_bool(j, "elementwise", path, c.elementwise);
  return c;
}

json read_json_file(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw ConfigError(file.string(), "cannot open config file");
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError(file.string(), std::string("invalid JSON: ") + e.what());
  }
}

ExperimentConfig load_experiment_config(const std::filesystem::path& file) {
  return experiment_config_from_json(read_json_file(file));
}

void to_json(json& j, const ExperimentConfig& c) {
  json ds = c.dataset;
  ds.erase("seed");
  ds.erase("tube");
  json policies = json::array();
  for (auto p : c.sweep.policies) policies.push_back(std::string(to_string(p)));
  json oracle = {{"tap_point", std::string(to_string(c.oracle.tap_point))}};
  if (c.oracle.tap_block) oracle["tap_block"] = *c.oracle.tap_block;
  j = {{"seed", c.seed},
       {"out", c.out.string()},
       {"dataset", ds},
       {"backbone", c.backbone},
       {"training", c.training},
       {"oracle", oracle},
       {"selector", c.selector},
       {"selector_training",
        {{"epochs", c.selector_training.epochs},
         {"batch_clips", c.selector_training.batch_clips},
         {"lr", c.selector_training.lr},
         {"min_lr", c.selector_training.min_lr},
         {"weight_decay", c.selector_training.weight_decay}}},
       {"proxy", {{"downsample", c.proxy.downsample}, {"training", c.proxy.training}}},
       {"budget", c.budget},
       {"sweep",
        {{"policies", policies},
         {"p_ratios", c.sweep.p_ratios},
         {"seeds", c.sweep.seeds},
         {"attention_block", c.sweep.attention_block}}},
       {"flops", {{"flops_per_mac", c.flops.flops_per_mac}, {"elementwise", c.flops.elementwise}}},
       {"report",
        {{"histogram_bins", c.report.histogram_bins},
         {"pareto_threshold", c.report.pareto_threshold},
         {"decay_p_ratio", c.report.decay_p_ratio},
         {"decay_policy", std::string(to_string(c.report.decay_policy))}}}};
}

}  // namespace lite
