#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lite/model_config.hpp"
#include "lite/tensor.hpp"
#include "lite/token_grid.hpp"

namespace lite {

// T x H x W x 3 float32 pixels in [0, 1], row-major (frame, row, column, channel).
struct VideoClip {
  std::uint32_t id = 0;
  std::size_t frames = 0, height = 0, width = 0;
  std::vector<float> pixels;
  std::size_t label = 0;
  // Tokens (under the dataset's tube layout) that the moving glyph overlaps.
  std::vector<std::size_t> glyph_tokens;

  std::size_t offset(std::size_t t, std::size_t y, std::size_t x, std::size_t c = 0) const {
    return ((t * height + y) * width + x) * 3 + c;
  }
  float at(std::size_t t, std::size_t y, std::size_t x, std::size_t c) const {
    return pixels[offset(t, y, x, c)];
  }
};

// Flattens the tubes of `clip` into an N x (3 p_t p_h p_w) tensor. Row n is
// token n of the grid; inside a row the order is (dt, dy, dx, channel).
// Throws ShapeError when the clip does not match `config`.
ad::Tensor tubify(const VideoClip& clip, const ModelConfig& config);
// Only the listed tokens, in the listed order.
ad::Tensor tubify(const VideoClip& clip, const ModelConfig& config,
                  std::span<const std::size_t> tokens);

// Box-filter spatial downsampling by an integer factor (the confidence proxy input).
VideoClip downsample(const VideoClip& clip, std::size_t factor);

}  // namespace lite
