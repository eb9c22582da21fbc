#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "nlohmann/json.hpp"
#include "lite/oracle.hpp"
#include "lite/sweep.hpp"

namespace lite {

struct ScoreHistogram {
  std::size_t bins = 50;
  std::vector<std::size_t> counts;                   // bins
  std::vector<std::vector<std::size_t>> per_class;   // classes x bins
  std::size_t total = 0;
  double mean = 0.0;
  double top20_share = 0.0;       // over all pooled token scores
  double clip_top20_share = 0.0;  // mean of the per-clip shares
  double gini = 0.0;
  double skewness = 0.0;
};

// Scores in [0, 1] fall in bin floor(s * bins), with 1.0 in the last bin.
// `labels` maps clip id to class; records of unknown clips raise ContractError.
ScoreHistogram report_histogram(std::span<const OracleRecord> records,
                                const std::map<std::uint32_t, std::size_t>& labels, std::size_t classes,
                                std::size_t bins = 50);
void to_json(nlohmann::json& j, const ScoreHistogram& h);
void write_histogram_csv(const std::filesystem::path& path, const ScoreHistogram& h);

struct DecayRow {
  std::size_t label = 0;
  double baseline = 0.0;  // top-1 at full tokens
  double reduced = 0.0;   // top-1 at the reduced ratio
  double decay = 0.0;     // (baseline - reduced) / baseline, 0 when baseline is 0
};

struct DecayTable {
  ScoreSource policy = ScoreSource::selector;
  double reduced_rho = 0.3;
  std::vector<DecayRow> rows;
  double spearman = 0.0;  // baseline accuracy vs decay
};

// Per-class accuracies are averaged over the seeds present. Throws
// MissingArtifactError when the policy has no rows at 1.0 or `reduced_rho`.
DecayTable report_decay(std::span<const ClassRow> rows, ScoreSource policy, double reduced_rho,
                        std::size_t classes);
void to_json(nlohmann::json& j, const DecayTable& t);
void write_decay_csv(const std::filesystem::path& path, const DecayTable& t);

// Mean over seeds of the sweep rows for one cell; nullopt when absent.
std::optional<Accuracy> cell_accuracy(std::span<const SweepRow> rows, ScoreSource policy, double rho);

struct Check {
  std::string name;
  double value = 0.0;
  bool pass = false;
  std::string detail;
};

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
void write_checks_csv(const std::filesystem::path& path, std::span<const Check> checks);

}  // namespace lite
