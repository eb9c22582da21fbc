#include "lite/selector.hpp"

#include <cmath>

#include "lite/errors.hpp"
#include "lite/json_util.hpp"
#include "lite/optimizer.hpp"
#include "lite/parallel.hpp"
#include "lite/rng.hpp"
#include "lite/training.hpp"

namespace lite {

using ad::Tensor;

void SelectorConfig::validate(const std::string& path) const {
  if (embed_dim == 0) throw ConfigError(json_util::join(path, "embed_dim"), "must be positive");
  if (h1() == 0 || h2() == 0) throw ConfigError(path, "hidden widths must be positive");
}

void to_json(nlohmann::json& j, const SelectorConfig& c) {
  const char* act = c.activation == ad::Activation::gelu ? "gelu" : c.activation == ad::Activation::relu ? "relu" : "sigmoid";
  j = {{"embed_dim", c.embed_dim}, {"hidden1", c.h1()}, {"hidden2", c.h2()}, {"activation", act}};
}

SelectorConfig selector_config_from_json(const nlohmann::json& j, const std::string& path) {
  json_util::require_object(j, path);
  json_util::check_keys(j, path, {"embed_dim", "hidden1", "hidden2", "activation"});
  SelectorConfig c;
  json_util::read_size(j, "embed_dim", path, c.embed_dim);
  json_util::read_size(j, "hidden1", path, c.hidden1);
  json_util::read_size(j, "hidden2", path, c.hidden2);
  std::string act = "gelu";
  json_util::read_string(j, "activation", path, act);
  try {
    c.activation = ad::parse_activation(act);
  } catch (const std::exception&) {
    throw ConfigError(json_util::join(path, "activation"), "unknown activation '" + act + "'");
  }
  c.validate(path);
  return c;
}

TokenSelector::TokenSelector(const SelectorConfig& config) : config_(config) {
  config_.validate();
  const std::size_t d = config_.embed_dim, h1 = config_.h1(), h2 = config_.h2();
  w1_ = Tensor::zeros({d, h1});
  b1_ = Tensor::zeros({h1});
  w2_ = Tensor::zeros({h1, h2});
  b2_ = Tensor::zeros({h2});
  w3_ = Tensor::zeros({h2, 1});
  b3_ = Tensor::zeros({1});
}

TokenSelector TokenSelector::zeros(const SelectorConfig& config) { return TokenSelector(config); }

TokenSelector::TokenSelector(const SelectorConfig& config, std::uint64_t seed) : TokenSelector(config) {
  Rng rng(seed);
  for (Tensor* w : {&w1_, &w2_, &w3_}) {
    const double std = 1.0 / std::sqrt(static_cast<double>(w->rows()));
    for (double& v : w->mutable_data()) v = std * rng.normal();
  }
}

std::vector<NamedTensor> TokenSelector::parameters() const {
  return {{"fc1.weight", w1_}, {"fc1.bias", b1_}, {"fc2.weight", w2_},
          {"fc2.bias", b2_},   {"fc3.weight", w3_}, {"fc3.bias", b3_}};
}

void TokenSelector::set_trainable(bool trainable) {
  for (auto& p : parameters()) p.tensor.set_requires_grad(trainable);
}

Tensor TokenSelector::logits(const Tensor& embeddings) const {
  if (embeddings.rank() != 2 || embeddings.cols() != config_.embed_dim)
    throw ShapeError("selector: expected [n x " + std::to_string(config_.embed_dim) + "] embeddings, got " +
                     shape_str(embeddings.shape()));
  Tensor h = ad::activation(ad::add_row_bias(ad::matmul(embeddings, w1_), b1_), config_.activation);
  h = ad::activation(ad::add_row_bias(ad::matmul(h, w2_), b2_), config_.activation);
  return ad::add_row_bias(ad::matmul(h, w3_), b3_);
}

TokenScores TokenSelector::score(const Tensor& embeddings) const {
  const Tensor z = logits(embeddings);
  TokenScores s;
  s.source = ScoreSource::selector;
  s.values.reserve(z.numel());
  for (double v : z.data()) s.values.push_back(ad::sigmoid_value(v));
  return s;
}

Checkpoint to_checkpoint(const TokenSelector& selector) {
  Checkpoint c;
  c.kind = "selector";
  c.config = {{"selector", selector.config()}};
  c.tensors = selector.parameters();
  return c;
}

TokenSelector selector_from_checkpoint(const Checkpoint& checkpoint) {
  if (checkpoint.kind != "selector")
    throw ConfigError("checkpoint.kind", "expected 'selector', got '" + checkpoint.kind + "'");
  if (!checkpoint.config.contains("selector")) throw ConfigError("checkpoint.config.selector", "missing");
  auto s = TokenSelector::zeros(selector_config_from_json(checkpoint.config["selector"], "checkpoint.config.selector"));
  auto slots = s.parameters();
  for (auto& slot : slots) {
    auto it = std::find_if(checkpoint.tensors.begin(), checkpoint.tensors.end(),
                           [&](const NamedTensor& t) { return t.name == slot.name; });
    if (it == checkpoint.tensors.end()) throw ShapeError("missing parameter '" + slot.name + "'");
    if (it->tensor.numel() != slot.tensor.numel())
      throw ShapeError("parameter '" + slot.name + "' has shape " + shape_str(it->tensor.shape()));
    auto src = it->tensor.data();
    std::copy(src.begin(), src.end(), slot.tensor.mutable_data().begin());
  }
  return s;
}

namespace {

void check_pairs(std::span<const Tensor> embeddings, std::span<const std::vector<double>> targets,
                 const char* what) {
  if (embeddings.size() != targets.size())
    throw ShapeError(std::string(what) + ": " + std::to_string(embeddings.size()) + " clips but " +
                     std::to_string(targets.size()) + " target vectors");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (embeddings[i].rows() != targets[i].size())
      throw ShapeError(std::string(what) + ": clip " + std::to_string(i) + " has " +
                       std::to_string(embeddings[i].rows()) + " tokens but " +
                       std::to_string(targets[i].size()) + " targets");
    for (double t : targets[i])
      if (!(t >= 0.0 && t <= 1.0)) throw ContractError(std::string(what) + ": target outside [0, 1]");
  }
}

// Stacks clip rows into one [sum N_i x D] matrix and a matching target column.
std::pair<Tensor, std::vector<double>> stack(std::span<const Tensor> embeddings, std::span<const std::vector<double>> targets,
                                std::span<const std::size_t> which) {
  std::size_t rows = 0, d = embeddings[which[0]].cols();
  for (std::size_t i : which) rows += embeddings[i].rows();
  std::vector<double> x, y;
  x.reserve(rows * d);
  y.reserve(rows);
  for (std::size_t i : which) {
    auto e = embeddings[i].data();
    x.insert(x.end(), e.begin(), e.end());
    y.insert(y.end(), targets[i].begin(), targets[i].end());
  }
  return {Tensor::from({rows, d}, std::move(x)), std::move(y)};
}

}  // namespace

double selector_bce(const TokenSelector& selector, std::span<const Tensor> embeddings,
                    std::span<const std::vector<double>> targets) {
  check_pairs(embeddings, targets, "selector_bce");
  if (embeddings.empty()) return 0.0;
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    const Tensor z = selector.logits(embeddings[i]);
    total += ad::bce_with_logits(z, targets[i]).item() * static_cast<double>(targets[i].size());
    count += targets[i].size();
  }
  return total / static_cast<double>(count);
}

SelectorTrainResult train_selector(const SelectorConfig& config, std::span<const Tensor> embeddings,
                                   std::span<const std::vector<double>> targets,
                                   std::span<const Tensor> val_embeddings,
                                   std::span<const std::vector<double>> val_targets,
                                   const SelectorTrainOptions& options, std::uint64_t seed) {
  check_pairs(embeddings, targets, "train_selector");
  check_pairs(val_embeddings, val_targets, "train_selector (validation)");
  if (options.batch_clips == 0) throw ConfigError("selector_training.batch_clips", "must be positive");
  SelectorTrainResult result{TokenSelector(config, derive_seed(seed, 0x5e1ec7)), {}};
  TokenSelector& sel = result.selector;
  sel.set_trainable(true);
  std::vector<Tensor> params;
  for (const auto& p : sel.parameters()) params.push_back(p.tensor);
  Adam adam(params, AdamOptions{.weight_decay = options.weight_decay});

  const std::size_t n = embeddings.size();
  const std::size_t steps_per_epoch = (n + options.batch_clips - 1) / options.batch_clips;
  const std::size_t total_steps = steps_per_epoch * options.epochs;
  std::vector<std::size_t> order(n);
  std::size_t step = 0;
  for (std::size_t epoch = 1; epoch <= options.epochs && n > 0; ++epoch) {
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng shuffle(derive_seed(seed, 0x5e1ec7, epoch));
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);
    double epoch_loss = 0.0;
    std::size_t epoch_tokens = 0;
    for (std::size_t start = 0; start < n; start += options.batch_clips) {
      const std::size_t count = std::min(options.batch_clips, n - start);
      const auto [x, y] = stack(embeddings, targets, std::span(order).subspan(start, count));
      ad::Tape tape;
      ad::TapeScope scope(tape);
      const Tensor loss = ad::bce_with_logits(sel.logits(x), y);
      const double value = loss.item();
      if (!std::isfinite(value))
        throw DivergenceError("selector loss is not finite at epoch " + std::to_string(epoch) + ", step " +
                              std::to_string(step));
      const auto grad = flatten_gradients(tape.backward(loss), sel.parameters());
      adam.step(grad, cosine_lr(step, total_steps, 0, options.lr, options.min_lr));
      ++step;
      epoch_loss += value * static_cast<double>(y.size());
      epoch_tokens += y.size();
    }
    SelectorLogRow row;
    row.epoch = epoch;
    row.train_bce = epoch_loss / static_cast<double>(epoch_tokens);
    row.val_bce = val_embeddings.empty() ? 0.0 : selector_bce(sel, val_embeddings, val_targets);
    result.log.push_back(row);
  }
  sel.set_trainable(false);
  return result;
}

std::vector<Tensor> embed_clips(const VideoTransformer& backbone, std::span<const VideoClip> clips) {
  std::vector<Tensor> out(clips.size());
  parallel_for(clips.size(), [&](std::size_t i) { out[i] = backbone.embed_all(clips[i]); });
  return out;
}

}  // namespace lite
