#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lite/clip.hpp"
#include "lite/video_transformer.hpp"

namespace lite {

struct TrainOptions {
  std::size_t epochs = 20;
  std::size_t batch_size = 16;
  double lr = 1e-3;
  double min_lr = 1e-5;
  std::size_t warmup_epochs = 1;
  double weight_decay = 0.0;
  double grad_clip = 1.0;
  // With this probability a training clip is seen through a random token
  // subset whose keep ratio is uniform in [token_drop_min_keep, 1].
  double token_drop_prob = 0.0;
  double token_drop_min_keep = 0.25;
};

struct TrainLogRow {
  std::size_t epoch = 0;
  std::string split;
  double loss = 0.0;
  double top1 = 0.0;
};

struct TrainResult {
  VideoTransformer model;
  std::vector<TrainLogRow> log;
};

struct EvalStats {
  double loss = 0.0;
  double top1 = 0.0;
  std::size_t count = 0;
};

// Minimizes softmax cross-entropy with Adam, cosine decay and global-norm
// clipping. Per-clip gradients are computed in parallel and summed in clip
// order, so the result depends only on (data, config, options, seed).
// Throws ContractError on out-of-range labels and DivergenceError on a
// non-finite loss.
TrainResult train_transformer(const ModelConfig& config, std::span<const VideoClip> train,
                              std::span<const VideoClip> val, const TrainOptions& options,
                              std::uint64_t seed);

EvalStats evaluate(const VideoTransformer& model, std::span<const VideoClip> clips);

// Concatenated gradients of `params` in order (zeros for tensors not reached).
std::vector<double> flatten_gradients(const ad::GradientMap& grads,
                                      std::span<const NamedTensor> params);

}  // namespace lite
