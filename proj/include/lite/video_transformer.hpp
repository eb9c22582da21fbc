#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lite/clip.hpp"
#include "lite/model_config.hpp"
#include "lite/tensor.hpp"
#include "lite/token_grid.hpp"

namespace lite {

struct NamedTensor {
  std::string name;
  ad::Tensor tensor;
};

struct FeatureTap {
  std::size_t block = 0;
  TapPoint point = TapPoint::mlp_out;
};

struct ForwardOptions {
  // Expose this feature map in ForwardResult::features. When the weights are
  // frozen the tapped tensor becomes a requires_grad leaf, so a taped pass can
  // differentiate the logits with respect to it.
  std::optional<FeatureTap> tap;
  // Summarize this block's attention as attention received per retained row.
  std::optional<std::size_t> attention_block;
};

struct ForwardResult {
  ad::Tensor logits;                        // [1 x classes]
  ad::Tensor features;                      // [n_kept x D] when tapped, [n_kept x rD] for mlp_hidden
  std::vector<double> received_attention;  // column sums of head-averaged attention
  std::vector<std::size_t> touched_tokens;  // token ids embedded by this pass
};

// Attention-only video transformer: tube embedding with separate spatial and
// temporal positional embeddings, pre-LN encoder blocks, mean pooling over the
// retained tokens, then a linear head.
class VideoTransformer {
 public:
  struct Block {
    ad::Tensor norm1_gain, norm1_bias;
    ad::Tensor qkv_weight, qkv_bias;    // [D x 3D], [3D]
    ad::Tensor proj_weight, proj_bias;  // [D x D], [D]
    ad::Tensor norm2_gain, norm2_bias;
    ad::Tensor fc1_weight, fc1_bias;    // [D x rD], [rD]
    ad::Tensor fc2_weight, fc2_bias;    // [rD x D], [D]
  };

  // Fresh weights: truncated normal (sigma 0.02) for projections and positional
  // embeddings, zero biases, unit LayerNorm gains.
  VideoTransformer(const ModelConfig& config, std::uint64_t seed);

  // Rebuilds a model from named parameters (checkpoint order is irrelevant);
  // throws ShapeError on missing or mis-shaped tensors.
  static VideoTransformer from_parameters(const ModelConfig& config,
                                          const std::vector<NamedTensor>& params);

  const ModelConfig& config() const { return config_; }
  TokenGrid grid() const { return TokenGrid(config_); }

  // Stable order; the tensors alias the model's storage.
  std::vector<NamedTensor> parameters() const;
  void set_trainable(bool trainable);

  // z = v M + e_spatial + e_temporal for the given tokens; row r of `patches`
  // holds the raw pixels of token tokens[r] and is normalized with the
  // config's pixel mean and std before projection (no gradient flows to it).
  ad::Tensor embed(const ad::Tensor& patches, std::span<const std::size_t> tokens) const;
  ad::Tensor embed_all(const VideoClip& clip) const;

  // Tubes outside the mask are never read or embedded.
  ForwardResult forward(const VideoClip& clip, const SelectionMask& mask,
                        const ForwardOptions& options = {}) const;
  ForwardResult forward(const VideoClip& clip, const ForwardOptions& options = {}) const;
  // Blocks + head over already embedded rows; throws ContractError when empty.
  ForwardResult encode(const ad::Tensor& tokens, const ForwardOptions& options = {}) const;

  const Block& block(std::size_t i) const { return blocks_.at(i); }

 private:
  VideoTransformer() = default;
  void allocate(const ModelConfig& config);

  ModelConfig config_;
  ad::Tensor patch_proj_;    // [P x D]
  ad::Tensor pos_spatial_;   // [n_h n_w x D]
  ad::Tensor pos_temporal_;  // [n_t x D]
  std::vector<Block> blocks_;
  ad::Tensor head_weight_, head_bias_;  // [D x C], [C]
};

}  // namespace lite
