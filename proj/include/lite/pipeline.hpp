#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "lite/experiment_config.hpp"
#include "lite/oracle.hpp"

namespace lite::pipeline {

// Artifact layout under the run directory.
struct RunLayout {
  std::filesystem::path root;

  std::filesystem::path data() const { return root / "data"; }
  // Checkpoint stem: "backbone", "selector" or "proxy".
  std::filesystem::path checkpoint(std::string_view name) const { return root / "checkpoints" / name; }
  std::filesystem::path oracle(std::string_view split, OracleMode mode) const;
  std::filesystem::path predictions(std::string_view split) const;
  std::filesystem::path results(std::string_view file) const { return root / "results" / file; }
  std::filesystem::path reports(std::string_view file) const { return root / "reports" / file; }
  std::filesystem::path logs(std::string_view file) const { return root / "logs" / file; }
};

// Every stage reads its inputs from disk, throws MissingArtifactError naming
// any absent input and writes human-readable progress to `log`.
void gen_data(const ExperimentConfig& config, std::ostream& log);
void train_backbone(const ExperimentConfig& config, std::ostream& log);
void compute_oracle(const ExperimentConfig& config, std::ostream& log);
void train_selector(const ExperimentConfig& config, std::ostream& log);
void train_proxy(const ExperimentConfig& config, std::ostream& log);
// Skips cells already present in results/sweep.csv.
void sweep(const ExperimentConfig& config, std::ostream& log);
void report(const ExperimentConfig& config, std::ostream& log);

// All stages in order.
void run_all(const ExperimentConfig& config, std::ostream& log);

}  // namespace lite::pipeline
