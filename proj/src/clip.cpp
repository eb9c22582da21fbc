#include "lite/clip.hpp"

#include <string>

#include "lite/errors.hpp"

namespace lite {

namespace {

void check_clip(const VideoClip& clip, const ModelConfig& config) {
  if (clip.frames != config.frames || clip.height != config.height || clip.width != config.width)
    throw ShapeError("clip " + std::to_string(clip.frames) + "x" + std::to_string(clip.height) + "x" +
                     std::to_string(clip.width) + " does not match model input " +
                     std::to_string(config.frames) + "x" + std::to_string(config.height) + "x" +
                     std::to_string(config.width));
  if (clip.pixels.size() != clip.frames * clip.height * clip.width * 3)
    throw ShapeError("clip pixel buffer has " + std::to_string(clip.pixels.size()) + " values");
}

}  // namespace

ad::Tensor tubify(const VideoClip& clip, const ModelConfig& config) {
  std::vector<std::size_t> all(config.num_tokens());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return tubify(clip, config, all);
}

ad::Tensor tubify(const VideoClip& clip, const ModelConfig& config,
                  std::span<const std::size_t> tokens) {
  check_clip(clip, config);
  const TokenGrid grid(config);
  const std::size_t p = config.patch_dim();
  const std::size_t row_len = config.tube_w * 3;
  std::vector<double> out(tokens.size() * p);
  for (std::size_t r = 0; r < tokens.size(); ++r) {
    const TokenCoord c = grid.coord(tokens[r]);
    double* dst = out.data() + r * p;
    for (std::size_t dt = 0; dt < config.tube_t; ++dt)
      for (std::size_t dy = 0; dy < config.tube_h; ++dy) {
        const float* src = clip.pixels.data() + clip.offset(c.t * config.tube_t + dt,
                                                             c.h * config.tube_h + dy,
                                                             c.w * config.tube_w);
        for (std::size_t k = 0; k < row_len; ++k) *dst++ = static_cast<double>(src[k]);
      }
  }
  return ad::Tensor::from({tokens.size(), p}, std::move(out));
}

VideoClip downsample(const VideoClip& clip, std::size_t factor) {
  if (factor == 0 || clip.height % factor || clip.width % factor)
    throw ShapeError("downsample factor " + std::to_string(factor) + " does not divide " +
                     std::to_string(clip.height) + "x" + std::to_string(clip.width));
  VideoClip out;
  out.id = clip.id;
  out.label = clip.label;
  out.frames = clip.frames;
  out.height = clip.height / factor;
  out.width = clip.width / factor;
  out.pixels.assign(out.frames * out.height * out.width * 3, 0.0f);
  const float inv = 1.0f / static_cast<float>(factor * factor);
  for (std::size_t t = 0; t < out.frames; ++t)
    for (std::size_t y = 0; y < out.height; ++y)
      for (std::size_t x = 0; x < out.width; ++x)
        for (std::size_t ch = 0; ch < 3; ++ch) {
          float s = 0.0f;
          for (std::size_t dy = 0; dy < factor; ++dy)
            for (std::size_t dx = 0; dx < factor; ++dx)
              s += clip.at(t, y * factor + dy, x * factor + dx, ch);
          out.pixels[out.offset(t, y, x, ch)] = s * inv;
        }
  return out;
}

}  // namespace lite
