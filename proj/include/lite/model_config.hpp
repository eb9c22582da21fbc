#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "nlohmann/json.hpp"

namespace lite {

// Where the Grad-CAM feature map is read inside a block.
enum class TapPoint {
  mlp_out,    // MLP branch output, before the residual add
  block_out,  // block output, after the residual add
  mlp_hidden, // GELU activations inside the MLP, [n x rD]
  block_in,   // block input; for block 0 the token embeddings
};

std::string_view to_string(TapPoint p);

// Architecture hyperparameters of a video transformer.
struct ModelConfig {
  std::size_t frames = 8;
  std::size_t height = 32;
  std::size_t width = 32;
  std::size_t tube_t = 4;
  std::size_t tube_h = 8;
  std::size_t tube_w = 8;
  std::size_t embed_dim = 64;
  std::size_t heads = 4;
  std::size_t blocks = 4;
  std::size_t classes = 8;
  std::size_t mlp_ratio = 4;
  double layernorm_eps = 1e-6;
  // Tube pixels enter the patch projection as (x - pixel_mean) / pixel_std.
  double pixel_mean = 0.5;
  double pixel_std = 0.5;

  std::size_t grid_t() const { return frames / tube_t; }
  std::size_t grid_h() const { return height / tube_h; }
  std::size_t grid_w() const { return width / tube_w; }
  std::size_t num_tokens() const { return grid_t() * grid_h() * grid_w(); }
  std::size_t patch_dim() const { return 3 * tube_t * tube_h * tube_w; }
  std::size_t head_dim() const { return embed_dim / heads; }
  std::size_t mlp_hidden() const { return mlp_ratio * embed_dim; }

  // Throws ConfigError (prefixed with `path`) on non-tiling tubes, heads not dividing D, zeros.
  void validate(const std::string& path = "model") const;

  // Desk default: 8x32x32 clips, 4x8x8 tubes, D=64, 4 heads, 4 blocks, 8 classes.
  static ModelConfig desk();
  // ViT-B sized backbone on 16x224x224 clips with 2x16x16 tubes, 174 classes.
  static ModelConfig full_scale();
};

void to_json(nlohmann::json& j, const ModelConfig& c);
// Missing keys keep their defaults; unknown keys and bad values raise ConfigError.
ModelConfig model_config_from_json(const nlohmann::json& j, const std::string& path);

}  // namespace lite
