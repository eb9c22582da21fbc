#include "lite/policies.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "lite/errors.hpp"
#include "lite/ops.hpp"
#include "lite/rng.hpp"

namespace lite {

SelectionMask top_k_mask(std::span<const double> scores, double rho) {
  const std::size_t n = scores.size();
  if (n == 0) throw ContractError("top_k_mask: no tokens");
  const std::size_t k = tokens_for_ratio(rho, n);
  for (double s : scores)
    if (std::isnan(s)) throw NumericError("top_k_mask: NaN score");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
                    });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return SelectionMask(std::move(idx), n);
}

SelectionMask random_mask(std::size_t num_tokens, double rho, std::uint64_t seed) {
  if (num_tokens == 0) throw ContractError("random_mask: no tokens");
  const std::size_t k = tokens_for_ratio(rho, num_tokens);
  std::vector<std::size_t> idx(num_tokens);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.below(num_tokens - i)]);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return SelectionMask(std::move(idx), num_tokens);
}

std::uint64_t random_mask_seed(std::uint64_t seed, std::uint32_t clip_id, ScoreSource policy, double rho) {
  return derive_seed(seed, clip_id, static_cast<std::uint64_t>(policy), std::bit_cast<std::uint64_t>(rho));
}

TokenScores attention_scores(const VideoTransformer& model, const VideoClip& clip, std::size_t block) {
  if (block >= model.config().blocks)
    throw ContractError("attention block " + std::to_string(block) + " >= " +
                        std::to_string(model.config().blocks));
  ForwardOptions fo;
  fo.attention_block = block;
  auto r = model.forward(clip, fo);
  return normalize_scores(std::move(r.received_attention), ScoreSource::attention);
}

TokenScores attention_scores(std::span<const double> attention, std::size_t n) {
  if (attention.size() != n * n)
    throw ShapeError("attention_scores: " + std::to_string(attention.size()) + " values for " +
                     std::to_string(n) + " tokens");
  std::vector<double> col(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) col[j] += attention[i * n + j];
  return normalize_scores(std::move(col), ScoreSource::attention);
}

std::vector<double> motion_energy(const VideoClip& clip, const ModelConfig& config) {
  if (clip.frames != config.frames || clip.height != config.height || clip.width != config.width)
    throw ShapeError("motion_scores: clip " + std::to_string(clip.frames) + "x" + std::to_string(clip.height) +
                     "x" + std::to_string(clip.width) + " does not match the config");
  if (clip.frames < 2) throw ContractError("motion_scores: need at least 2 frames");
  const TokenGrid g(config);
  std::vector<double> energy(g.size(), 0.0);
  for (std::size_t tok = 0; tok < g.size(); ++tok) {
    const TokenCoord c = g.coord(tok);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t dt = 0; dt < config.tube_t; ++dt) {
      const std::size_t t = c.t * config.tube_t + dt;
      if (t == 0) continue;
      for (std::size_t dy = 0; dy < config.tube_h; ++dy)
        for (std::size_t dx = 0; dx < config.tube_w; ++dx)
          for (std::size_t ch = 0; ch < 3; ++ch) {
            const std::size_t y = c.h * config.tube_h + dy, x = c.w * config.tube_w + dx;
            sum += std::abs(static_cast<double>(clip.at(t, y, x, ch)) - clip.at(t - 1, y, x, ch));
            ++count;
          }
    }
    energy[tok] = sum / static_cast<double>(count);
  }
  return energy;
}

TokenScores motion_scores(const VideoClip& clip, const ModelConfig& config) {
  return normalize_scores(motion_energy(clip, config), ScoreSource::motion);
}

ModelConfig proxy_config(const ModelConfig& backbone, std::size_t factor) {
  if (factor == 0 || backbone.height % factor || backbone.width % factor)
    throw ConfigError("proxy.downsample", "must divide the clip height and width");
  ModelConfig c = backbone;
  c.height = backbone.height / factor;
  c.width = backbone.width / factor;
  c.tube_t = backbone.tube_t;
  c.tube_h = std::min<std::size_t>(4, c.height);
  c.tube_w = std::min<std::size_t>(4, c.width);
  c.embed_dim = 32;
  c.heads = 2;
  c.blocks = 2;
  c.validate("proxy");
  return c;
}

std::pair<std::size_t, double> proxy_predict(const ConfidenceProxy& proxy, const VideoClip& clip) {
  const VideoClip small = proxy.downsample > 1 ? downsample(clip, proxy.downsample) : clip;
  const auto r = proxy.model.forward(small);
  const ad::Tensor probs = ad::softmax(r.logits, 1);
  auto p = probs.data();
  const auto best = std::max_element(p.begin(), p.end());
  return {static_cast<std::size_t>(best - p.begin()), *best};
}

double confidence_proxy(const ConfidenceProxy& proxy, const VideoClip& clip) {
  return proxy_predict(proxy, clip).second;
}

Checkpoint to_checkpoint(const ConfidenceProxy& proxy) {
  Checkpoint c = to_checkpoint(proxy.model, "proxy");
  c.config["downsample"] = proxy.downsample;
  return c;
}

ConfidenceProxy proxy_from_checkpoint(const Checkpoint& checkpoint) {
  if (checkpoint.kind != "proxy") throw ConfigError("checkpoint.kind", "expected 'proxy', got '" + checkpoint.kind + "'");
  std::size_t factor = 1;
  if (!checkpoint.config.contains("downsample") || !checkpoint.config["downsample"].is_number_unsigned())
    throw ConfigError("checkpoint.config.downsample", "expected a positive integer");
  factor = checkpoint.config["downsample"].get<std::size_t>();
  return {factor, transformer_from_checkpoint(checkpoint)};
}

}  // namespace lite
