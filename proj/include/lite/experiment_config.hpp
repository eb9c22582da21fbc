#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"
#include "lite/budget.hpp"
#include "lite/dataset.hpp"
#include "lite/flops.hpp"
#include "lite/model_config.hpp"
#include "lite/scores.hpp"
#include "lite/selector.hpp"
#include "lite/training.hpp"

namespace lite {

struct OracleSettings {
  std::optional<std::size_t> tap_block;  // default: last block
  TapPoint tap_point = TapPoint::mlp_out;
};

struct ProxySettings {
  std::size_t downsample = 4;
  TrainOptions training;
};

struct SweepSettings {
  std::vector<ScoreSource> policies = {ScoreSource::oracle_true, ScoreSource::oracle_pred, ScoreSource::selector,
                                       ScoreSource::random,      ScoreSource::attention,   ScoreSource::motion};
  std::vector<double> p_ratios = {0.1, 0.3, 0.5, 0.7, 0.9, 1.0};
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  std::size_t attention_block = 0;
};

struct ReportSettings {
  std::size_t histogram_bins = 50;
  // Minimum share of oracle score mass held by the top 20% of tokens.
  double pareto_threshold = 0.6;
  double decay_p_ratio = 0.3;
  ScoreSource decay_policy = ScoreSource::selector;
};

// One JSON document drives every pipeline stage. All randomness derives from `seed`.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::filesystem::path out = "runs/desk";
  DatasetSpec dataset;
  ModelConfig backbone;
  TrainOptions training;
  OracleSettings oracle;
  SelectorConfig selector;
  SelectorTrainOptions selector_training;
  ProxySettings proxy;
  BudgetPolicy budget;
  SweepSettings sweep;
  flops::Convention flops;
  ReportSettings report;

  // Cross-field checks (dataset geometry vs backbone, tap block, ratios).
  void validate() const;
  FeatureTap tap() const;
};

// Missing sections keep their defaults; unknown keys raise ConfigError with the JSON path.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j, const std::string& path = "config");
ExperimentConfig load_experiment_config(const std::filesystem::path& file);
void to_json(nlohmann::json& j, const ExperimentConfig& c);

// Parse errors and unreadable files raise ConfigError naming the file.
nlohmann::json read_json_file(const std::filesystem::path& file);
flops::Convention convention_from_json(const nlohmann::json& j, const std::string& path);

TrainOptions train_options_from_json(const nlohmann::json& j, const std::string& path, TrainOptions defaults = {});
void to_json(nlohmann::json& j, const TrainOptions& o);

}  // namespace lite
