#pragma once

#include <cstdint>
#include <span>

#include "lite/checkpoint.hpp"
#include "lite/scores.hpp"
#include "lite/token_grid.hpp"
#include "lite/video_transformer.hpp"

namespace lite {

// ceil(rho N) highest scores; ties go to the lower index. Sorted output.
SelectionMask top_k_mask(std::span<const double> scores, double rho);
inline SelectionMask top_k_mask(const TokenScores& scores, double rho) {
  return top_k_mask(scores.values, rho);
}

// Uniform sample of ceil(rho N) tokens without replacement: partial
// Fisher-Yates over [0, N) driven by Rng(seed) (mt19937_64), then sorted.
SelectionMask random_mask(std::size_t num_tokens, double rho, std::uint64_t seed);

// Seed for clip `clip_id` of sweep cell (policy, rho, seed).
std::uint64_t random_mask_seed(std::uint64_t seed, std::uint32_t clip_id, ScoreSource policy, double rho);

// Attention received by each token in `block` (head-averaged column sums),
// min-max normalized.
TokenScores attention_scores(const VideoTransformer& model, const VideoClip& clip, std::size_t block = 0);
// Column sums of a row-stochastic n x n attention matrix, normalized.
TokenScores attention_scores(std::span<const double> attention, std::size_t n);

// Mean |x_t - x_{t-1}| over the pixels of each tube (pairs of consecutive
// frames with both frames inside the clip and the later one inside the tube),
// min-max normalized.
TokenScores motion_scores(const VideoClip& clip, const ModelConfig& config);
std::vector<double> motion_energy(const VideoClip& clip, const ModelConfig& config);

// Cheap classifier on spatially downsampled clips.
struct ConfidenceProxy {
  std::size_t downsample = 4;
  VideoTransformer model;
};

// Backbone config shrunk for the proxy: 2 blocks, D = 32, 2 heads, tube
// (backbone tube_t) x 4 x 4 on clips downsampled by `factor`.
ModelConfig proxy_config(const ModelConfig& backbone, std::size_t factor = 4);

// Max softmax probability of the proxy's prediction.
double confidence_proxy(const ConfidenceProxy& proxy, const VideoClip& clip);
// Predicted class and confidence.
std::pair<std::size_t, double> proxy_predict(const ConfidenceProxy& proxy, const VideoClip& clip);

Checkpoint to_checkpoint(const ConfidenceProxy& proxy);
ConfidenceProxy proxy_from_checkpoint(const Checkpoint& checkpoint);

}  // namespace lite
