#include "lite/video_transformer.hpp"

#include <cmath>
#include <map>

#include "lite/errors.hpp"
#include "lite/ops.hpp"
#include "lite/rng.hpp"

namespace lite {

using ad::Tensor;

namespace {

constexpr double kInitStd = 0.02;

void fill_truncated_normal(Tensor& t, Rng& rng) {
  for (double& v : t.mutable_data()) v = rng.truncated_normal(kInitStd);
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  return ad::add_row_bias(ad::matmul(x, w), b);
}

}  // namespace

void VideoTransformer::allocate(const ModelConfig& config) {
  config.validate();
  config_ = config;
  const std::size_t d = config.embed_dim, hidden = config.mlp_hidden();
  patch_proj_ = Tensor::zeros({config.patch_dim(), d});
  pos_spatial_ = Tensor::zeros({config.grid_h() * config.grid_w(), d});
  pos_temporal_ = Tensor::zeros({config.grid_t(), d});
  blocks_.clear();
  for (std::size_t i = 0; i < config.blocks; ++i) {
    Block b;
    b.norm1_gain = Tensor::full({d}, 1.0);
    b.norm1_bias = Tensor::zeros({d});
    b.qkv_weight = Tensor::zeros({d, 3 * d});
    b.qkv_bias = Tensor::zeros({3 * d});
    b.proj_weight = Tensor::zeros({d, d});
    b.proj_bias = Tensor::zeros({d});
    b.norm2_gain = Tensor::full({d}, 1.0);
    b.norm2_bias = Tensor::zeros({d});
    b.fc1_weight = Tensor::zeros({d, hidden});
    b.fc1_bias = Tensor::zeros({hidden});
    b.fc2_weight = Tensor::zeros({hidden, d});
    b.fc2_bias = Tensor::zeros({d});
    blocks_.push_back(std::move(b));
  }
  head_weight_ = Tensor::zeros({d, config.classes});
  head_bias_ = Tensor::zeros({config.classes});
}

VideoTransformer::VideoTransformer(const ModelConfig& config, std::uint64_t seed) {
  allocate(config);
  Rng rng(seed);
  fill_truncated_normal(patch_proj_, rng);
  fill_truncated_normal(pos_spatial_, rng);
  fill_truncated_normal(pos_temporal_, rng);
  for (auto& b : blocks_) {
    fill_truncated_normal(b.qkv_weight, rng);
    fill_truncated_normal(b.proj_weight, rng);
    fill_truncated_normal(b.fc1_weight, rng);
    fill_truncated_normal(b.fc2_weight, rng);
  }
  fill_truncated_normal(head_weight_, rng);
}

VideoTransformer VideoTransformer::from_parameters(const ModelConfig& config,
                                                   const std::vector<NamedTensor>& params) {
  VideoTransformer m;
  m.allocate(config);
  std::map<std::string, const Tensor*> by_name;
  for (const auto& p : params) by_name[p.name] = &p.tensor;
  for (auto& slot : m.parameters()) {
    auto it = by_name.find(slot.name);
    if (it == by_name.end()) throw ShapeError("missing parameter '" + slot.name + "'");
    if (it->second->numel() != slot.tensor.numel())
      throw ShapeError("parameter '" + slot.name + "' has shape " +
                       shape_str(it->second->shape()) + ", expected " +
                       shape_str(slot.tensor.shape()));
    auto src = it->second->data();
    std::copy(src.begin(), src.end(), slot.tensor.mutable_data().begin());
  }
  return m;
}

std::vector<NamedTensor> VideoTransformer::parameters() const {
  std::vector<NamedTensor> out{{"patch_embed.proj", patch_proj_},
                               {"pos_embed.spatial", pos_spatial_},
                               {"pos_embed.temporal", pos_temporal_}};
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const std::string p = "blocks." + std::to_string(i) + ".";
    const Block& b = blocks_[i];
    out.push_back({p + "norm1.gain", b.norm1_gain});
    out.push_back({p + "norm1.bias", b.norm1_bias});
    out.push_back({p + "attn.qkv.weight", b.qkv_weight});
    out.push_back({p + "attn.qkv.bias", b.qkv_bias});
    out.push_back({p + "attn.proj.weight", b.proj_weight});
    out.push_back({p + "attn.proj.bias", b.proj_bias});
    out.push_back({p + "norm2.gain", b.norm2_gain});
    out.push_back({p + "norm2.bias", b.norm2_bias});
    out.push_back({p + "mlp.fc1.weight", b.fc1_weight});
    out.push_back({p + "mlp.fc1.bias", b.fc1_bias});
    out.push_back({p + "mlp.fc2.weight", b.fc2_weight});
    out.push_back({p + "mlp.fc2.bias", b.fc2_bias});
  }
  out.push_back({"head.weight", head_weight_});
  out.push_back({"head.bias", head_bias_});
  return out;
}

void VideoTransformer::set_trainable(bool trainable) {
  for (auto& p : parameters()) p.tensor.set_requires_grad(trainable);
}

Tensor VideoTransformer::embed(const Tensor& patches, std::span<const std::size_t> tokens) const {
  if (patches.rows() != tokens.size() || patches.cols() != config_.patch_dim())
    throw ShapeError("embed: patches " + shape_str(patches.shape()) + " for " +
                     std::to_string(tokens.size()) + " tokens of dim " +
                     std::to_string(config_.patch_dim()));
  const TokenGrid g = grid();
  std::vector<std::size_t> spatial(tokens.size()), temporal(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    spatial[i] = g.spatial_index(tokens[i]);
    temporal[i] = g.temporal_index(tokens[i]);
  }
  const double inv_std = 1.0 / config_.pixel_std;
  std::vector<double> v(patches.data().begin(), patches.data().end());
  for (double& x : v) x = (x - config_.pixel_mean) * inv_std;
  const Tensor normalized = Tensor::from(patches.shape(), std::move(v));
  return ad::add(ad::add(ad::matmul(normalized, patch_proj_), ad::gather_rows(pos_spatial_, spatial)),
                 ad::gather_rows(pos_temporal_, temporal));
}

Tensor VideoTransformer::embed_all(const VideoClip& clip) const {
  const auto all = SelectionMask::all(config_.num_tokens());
  return embed(tubify(clip, config_, all.indices()), all.indices());
}

ForwardResult VideoTransformer::forward(const VideoClip& clip, const SelectionMask& mask,
                                        const ForwardOptions& options) const {
  if (mask.num_tokens() != config_.num_tokens())
    throw ContractError("mask over " + std::to_string(mask.num_tokens()) + " tokens, model has " +
                        std::to_string(config_.num_tokens()));
  Tensor z = embed(tubify(clip, config_, mask.indices()), mask.indices());
  ForwardResult r = encode(z, options);
  r.touched_tokens.assign(mask.indices().begin(), mask.indices().end());
  return r;
}

ForwardResult VideoTransformer::forward(const VideoClip& clip, const ForwardOptions& options) const {
  return forward(clip, SelectionMask::all(config_.num_tokens()), options);
}

ForwardResult VideoTransformer::encode(const Tensor& tokens, const ForwardOptions& options) const {
  if (tokens.rank() != 2 || tokens.cols() != config_.embed_dim)
    throw ShapeError("encode: expected [n x " + std::to_string(config_.embed_dim) + "] tokens, got " +
                     shape_str(tokens.shape()));
  if (options.tap && options.tap->block >= config_.blocks)
    throw ContractError("tap block " + std::to_string(options.tap->block) + " >= blocks " +
                        std::to_string(config_.blocks));
  const std::size_t n = tokens.rows(), d = config_.embed_dim, heads = config_.heads;
  const std::size_t dh = config_.head_dim();
  const double att_scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const double eps = config_.layernorm_eps;

  ForwardResult result;
  auto tap_here = [&](std::size_t block, TapPoint point, Tensor& x) {
    if (!options.tap || options.tap->block != block || options.tap->point != point) return;
    if (x.requires_grad()) {
      x.retain_grad();
    } else {
      x = x.detach();
      x.set_requires_grad(true);
    }
    result.features = x;
  };

  Tensor z = tokens;
  for (std::size_t l = 0; l < blocks_.size(); ++l) {
    const Block& b = blocks_[l];
    tap_here(l, TapPoint::block_in, z);
    Tensor qkv = linear(ad::layernorm(z, b.norm1_gain, b.norm1_bias, eps), b.qkv_weight, b.qkv_bias);
    std::vector<Tensor> head_out;
    head_out.reserve(heads);
    const bool summarize = options.attention_block && *options.attention_block == l;
    if (summarize) result.received_attention.assign(n, 0.0);
    for (std::size_t h = 0; h < heads; ++h) {
      Tensor q = ad::slice_cols(qkv, h * dh, dh);
      Tensor k = ad::slice_cols(qkv, d + h * dh, dh);
      Tensor v = ad::slice_cols(qkv, 2 * d + h * dh, dh);
      Tensor p = ad::softmax(ad::scale(ad::matmul(q, ad::transpose(k)), att_scale), 1);
      if (summarize) {
        auto pv = p.data();
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j)
            result.received_attention[j] += pv[i * n + j] / static_cast<double>(heads);
      }
      head_out.push_back(ad::matmul(p, v));
    }
    Tensor attn = linear(heads == 1 ? head_out[0] : ad::concat_cols(head_out), b.proj_weight,
                         b.proj_bias);
    Tensor z_hat = ad::add(attn, z);
    Tensor hidden =
        ad::gelu(linear(ad::layernorm(z_hat, b.norm2_gain, b.norm2_bias, eps), b.fc1_weight, b.fc1_bias));
    tap_here(l, TapPoint::mlp_hidden, hidden);
    Tensor mlp = linear(hidden, b.fc2_weight, b.fc2_bias);
    tap_here(l, TapPoint::mlp_out, mlp);
    z = ad::add(mlp, z_hat);
    tap_here(l, TapPoint::block_out, z);
  }
  result.logits = linear(ad::mean_rows(z), head_weight_, head_bias_);
  return result;
}

}  // namespace lite
