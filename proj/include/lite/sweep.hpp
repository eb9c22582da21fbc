#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lite/flops.hpp"
#include "lite/policies.hpp"
#include "lite/scores.hpp"
#include "lite/selector.hpp"
#include "lite/video_transformer.hpp"

namespace lite {

struct ScorerInputs {
  const TokenSelector* selector = nullptr;
  const std::vector<TokenScores>* oracle_true = nullptr;  // one per clip, clip order
  const std::vector<TokenScores>* oracle_pred = nullptr;
  std::size_t attention_block = 0;
};

// Produces masks for every policy over a fixed clip list. Scores of the
// deterministic policies are computed once per policy and cached.
class PolicyScorer {
 public:
  PolicyScorer(const VideoTransformer& backbone, std::span<const VideoClip> clips, ScorerInputs inputs);

  // Throws MissingArtifactError when the policy needs an input that was not supplied.
  const std::vector<TokenScores>& scores(ScoreSource policy);
  SelectionMask mask(ScoreSource policy, std::size_t clip, double rho, std::uint64_t seed);

 private:
  const VideoTransformer& backbone_;
  std::span<const VideoClip> clips_;
  ScorerInputs inputs_;
  std::map<ScoreSource, std::vector<TokenScores>> cache_;
};

struct ClipOutcome {
  std::size_t label = 0;
  bool top1 = false;
  bool top5 = false;
};

// Backbone predictions for clip i under masks[i]; parallel over clips.
std::vector<ClipOutcome> evaluate_masks(const VideoTransformer& backbone, std::span<const VideoClip> clips,
                                        std::span<const SelectionMask> masks);

struct Accuracy {
  double top1 = 0.0, top5 = 0.0;
  std::size_t n = 0;
};
Accuracy accuracy(std::span<const ClipOutcome> outcomes);
// Per class, indexed by label, for `classes` classes.
std::vector<Accuracy> accuracy_by_class(std::span<const ClipOutcome> outcomes, std::size_t classes);

// Cost of one clip under `policy` at `rho`: backbone on the kept tokens, plus
// the selector for "selector", the full-token first block for "attention"
// and frame differencing for "motion". Oracle policies are billed as the
// backbone alone.
double policy_gflops(const ModelConfig& config, ScoreSource policy, double rho, const flops::Convention& conv,
                     const SelectorConfig& selector, std::size_t attention_block);

struct SweepRow {
  ScoreSource policy = ScoreSource::random;
  double p_ratio = 1.0;
  std::uint64_t seed = 0;
  double top1 = 0.0, top5 = 0.0, gflops = 0.0;
  std::size_t n_clips = 0;
};

struct ClassRow {
  ScoreSource policy = ScoreSource::random;
  double p_ratio = 1.0;
  std::uint64_t seed = 0;
  std::size_t label = 0;
  double top1 = 0.0;
  std::size_t n_clips = 0;
};

inline constexpr const char* kSweepHeader = "policy,p_ratio,seed,top1,top5,gflops,n_clips";
inline constexpr const char* kClassHeader = "policy,p_ratio,seed,class,top1,n_clips";

// Canonical text of a ratio in CSV files and cell keys.
std::string format_ratio(double rho);

void write_sweep_csv(const std::filesystem::path& path, std::span<const SweepRow> rows);
// Empty when the file does not exist; ConfigError on a malformed file.
std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path);
void write_class_csv(const std::filesystem::path& path, std::span<const ClassRow> rows);
std::vector<ClassRow> read_class_csv(const std::filesystem::path& path);

}  // namespace lite
