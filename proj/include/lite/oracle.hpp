#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "lite/scores.hpp"
#include "lite/video_transformer.hpp"

namespace lite {

enum class OracleMode : std::uint32_t { true_label = 0, predicted = 1 };

ScoreSource source_of(OracleMode mode);

// omega_d = mean over tokens of d y / d A[n, d]. `grads` is N x D.
std::vector<double> importance_weights(const ad::Tensor& grads);

// ReLU(A omega) per token, then min-max normalized.
TokenScores token_scores(const ad::Tensor& activations, std::span<const double> weights,
                         ScoreSource source);

struct OracleOptions {
  // Defaults to the last block's MLP output.
  std::optional<FeatureTap> tap;
  // Multiplies the target logit before differentiation.
  double logit_scale = 1.0;
};

struct OracleResult {
  TokenScores scores;
  std::size_t target = 0;
  std::size_t predicted = 0;
  std::vector<double> logits;
};

// Full-token forward with the feature tap, backward from the pre-softmax
// logit of the true (clip.label) or argmax class. The model is not modified.
OracleResult compute_oracle(const VideoTransformer& model, const VideoClip& clip, OracleMode mode,
                            const OracleOptions& options = {});

// One result per clip, in input order; clips are processed in parallel.
std::vector<OracleResult> compute_oracles(const VideoTransformer& model,
                                          std::span<const VideoClip> clips, OracleMode mode,
                                          const OracleOptions& options = {});

// Binary dump: consecutive records of
//   u32 clip_id, u32 mode (0 true label, 1 predicted), u32 N, N x f32 scores
// all little-endian.
struct OracleRecord {
  std::uint32_t clip_id = 0;
  OracleMode mode = OracleMode::true_label;
  std::vector<float> scores;
};

void save_oracle_dump(const std::filesystem::path& path, std::span<const OracleRecord> records);
// Throws MissingArtifactError when absent, ShapeError on a truncated file.
std::vector<OracleRecord> load_oracle_dump(const std::filesystem::path& path);
// CSV with header clip_id,mode,token,score.
void export_oracle_csv(const std::filesystem::path& path, std::span<const OracleRecord> records);

}  // namespace lite
