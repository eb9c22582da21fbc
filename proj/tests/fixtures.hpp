#pragma once

// Small models and clips shared by the unit tests.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include <unistd.h>

#include "lite/clip.hpp"
#include "lite/model_config.hpp"
#include "lite/rng.hpp"
#include "lite/video_transformer.hpp"

namespace lite::testing {

// 2 x 4 x 4 clips, 1 x 2 x 2 tubes: 8 tokens, D = 8.
inline ModelConfig tiny_config() {
  ModelConfig c;
  c.frames = 2;
  c.height = c.width = 4;
  c.tube_t = 1;
  c.tube_h = c.tube_w = 2;
  c.embed_dim = 8;
  c.heads = 2;
  c.blocks = 2;
  c.classes = 3;
  c.mlp_ratio = 2;
  return c;
}

inline VideoClip random_clip(const ModelConfig& c, std::uint64_t seed, std::size_t label = 0) {
  Rng rng(seed);
  VideoClip clip;
  clip.id = static_cast<std::uint32_t>(seed);
  clip.frames = c.frames;
  clip.height = c.height;
  clip.width = c.width;
  clip.label = label;
  clip.pixels.resize(c.frames * c.height * c.width * 3);
  for (float& p : clip.pixels) p = static_cast<float>(rng.uniform());
  return clip;
}

// Perturbs every weight so LayerNorm gains and zero-initialized biases are generic.
inline void jitter(VideoTransformer& m, std::uint64_t seed, double amount) {
  Rng rng(seed);
  for (auto& p : m.parameters())
    for (double& v : p.tensor.mutable_data()) v += rng.uniform(-amount, amount);
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("lite-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace lite::testing
