#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lite/checkpoint.hpp"
#include "lite/flops.hpp"
#include "lite/ops.hpp"
#include "lite/scores.hpp"
#include "lite/video_transformer.hpp"

namespace lite {

struct SelectorConfig {
  std::size_t embed_dim = 64;
  std::size_t hidden1 = 0;  // 0 means embed_dim / 2
  std::size_t hidden2 = 0;
  ad::Activation activation = ad::Activation::gelu;

  std::size_t h1() const { return hidden1 ? hidden1 : embed_dim / 2; }
  std::size_t h2() const { return hidden2 ? hidden2 : embed_dim / 2; }
  flops::SelectorShape shape() const { return {h1(), h2()}; }
  void validate(const std::string& path = "selector") const;
};

void to_json(nlohmann::json& j, const SelectorConfig& c);
SelectorConfig selector_config_from_json(const nlohmann::json& j, const std::string& path);

// Per-token MLP D -> h1 -> h2 -> 1 with a sigmoid output.
class TokenSelector {
 public:
  // Weights ~ N(0, 1 / fan_in), zero biases.
  TokenSelector(const SelectorConfig& config, std::uint64_t seed);
  static TokenSelector zeros(const SelectorConfig& config);

  const SelectorConfig& config() const { return config_; }
  std::vector<NamedTensor> parameters() const;
  void set_trainable(bool trainable);

  // Pre-sigmoid outputs, [n x 1]; differentiable.
  ad::Tensor logits(const ad::Tensor& embeddings) const;
  // sigmoid(logits), one value per row.
  TokenScores score(const ad::Tensor& embeddings) const;

 private:
  explicit TokenSelector(const SelectorConfig& config);
  SelectorConfig config_;
  ad::Tensor w1_, b1_, w2_, b2_, w3_, b3_;
};

Checkpoint to_checkpoint(const TokenSelector& selector);
TokenSelector selector_from_checkpoint(const Checkpoint& checkpoint);

struct SelectorTrainOptions {
  std::size_t epochs = 30;
  std::size_t batch_clips = 16;
  double lr = 1e-3;
  double min_lr = 1e-5;
  double weight_decay = 0.0;
};

struct SelectorLogRow {
  std::size_t epoch = 0;
  double train_bce = 0.0;
  double val_bce = 0.0;
};

struct SelectorTrainResult {
  TokenSelector selector;
  std::vector<SelectorLogRow> log;
};

// Mean per-token BCE between selector outputs and soft targets in [0, 1].
// `embeddings[i]` is N_i x D; `targets[i]` has N_i entries.
double selector_bce(const TokenSelector& selector, std::span<const ad::Tensor> embeddings,
                    std::span<const std::vector<double>> targets);

// Adam on mean per-token BCE over minibatches of whole clips, clip order
// shuffled per epoch from `seed`. Throws DivergenceError on a non-finite loss.
SelectorTrainResult train_selector(const SelectorConfig& config, std::span<const ad::Tensor> embeddings,
                                   std::span<const std::vector<double>> targets,
                                   std::span<const ad::Tensor> val_embeddings,
                                   std::span<const std::vector<double>> val_targets,
                                   const SelectorTrainOptions& options, std::uint64_t seed);

// Frozen full-token embeddings (patch projection + positional terms) per clip.
std::vector<ad::Tensor> embed_clips(const VideoTransformer& backbone, std::span<const VideoClip> clips);

}  // namespace lite
