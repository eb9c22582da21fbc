#include "lite/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lite/errors.hpp"
#include "lite/ops.hpp"
#include "lite/parallel.hpp"
#include "lite/optimizer.hpp"
#include "lite/rng.hpp"

namespace lite {

namespace {

std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

SelectionMask training_mask(const VideoClip& clip, std::size_t n, const TrainOptions& options,
                            std::uint64_t seed, std::size_t epoch) {
  if (options.token_drop_prob <= 0.0) return SelectionMask::all(n);
  Rng rng(derive_seed(seed, 0x7d0b, epoch, clip.id));
  if (rng.uniform() >= options.token_drop_prob) return SelectionMask::all(n);
  const double keep = rng.uniform(options.token_drop_min_keep, 1.0);
  const std::size_t k = tokens_for_ratio(keep, n);
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.below(n - i)]);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return SelectionMask(std::move(idx), n);
}

}  // namespace

std::vector<double> flatten_gradients(const ad::GradientMap& grads,
                                      std::span<const NamedTensor> params) {
  std::size_t total = 0;
  for (const auto& p : params) total += p.tensor.numel();
  std::vector<double> flat;
  flat.reserve(total);
  for (const auto& p : params) {
    if (grads.contains(p.tensor)) {
      auto g = grads.at(p.tensor);
      flat.insert(flat.end(), g.begin(), g.end());
    } else {
      flat.insert(flat.end(), p.tensor.numel(), 0.0);
    }
  }
  return flat;
}

EvalStats evaluate(const VideoTransformer& model, std::span<const VideoClip> clips) {
  std::vector<double> loss(clips.size());
  std::vector<int> correct(clips.size());
  parallel_for(clips.size(), [&](std::size_t i) {
    const auto r = model.forward(clips[i]);
    loss[i] = ad::cross_entropy(r.logits, clips[i].label).item();
    correct[i] = argmax(r.logits.data()) == clips[i].label;
  });
  EvalStats s;
  s.count = clips.size();
  for (std::size_t i = 0; i < clips.size(); ++i) {
    s.loss += loss[i];
    s.top1 += correct[i];
  }
  if (s.count) {
    s.loss /= static_cast<double>(s.count);
    s.top1 /= static_cast<double>(s.count);
  }
  return s;
}

TrainResult train_transformer(const ModelConfig& config, std::span<const VideoClip> train,
                              std::span<const VideoClip> val, const TrainOptions& options,
                              std::uint64_t seed) {
  for (const auto& c : train)
    if (c.label >= config.classes)
      throw ContractError("clip " + std::to_string(c.id) + " has label " + std::to_string(c.label) +
                          " outside [0, " + std::to_string(config.classes) + ")");
  TrainResult result{VideoTransformer(config, derive_seed(seed, 0x1a17)), {}};
  VideoTransformer& model = result.model;
  model.set_trainable(true);
  const auto params = model.parameters();
  std::vector<ad::Tensor> tensors;
  for (const auto& p : params) tensors.push_back(p.tensor);
  Adam adam(tensors, AdamOptions{.weight_decay = options.weight_decay});

  const std::size_t batch = std::max<std::size_t>(1, options.batch_size);
  const std::size_t steps_per_epoch = (train.size() + batch - 1) / batch;
  const std::size_t total_steps = steps_per_epoch * options.epochs;
  const std::size_t warmup = steps_per_epoch * options.warmup_epochs;
  const std::size_t n_tokens = config.num_tokens();

  std::vector<std::size_t> order(train.size());
  std::size_t step = 0;
  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng shuffle(derive_seed(seed, 0x5f1e, epoch));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);

    double epoch_loss = 0.0, epoch_correct = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t count = std::min(batch, order.size() - start);
      std::vector<std::vector<double>> grads(count);
      std::vector<double> losses(count);
      std::vector<int> correct(count);
      parallel_for(count, [&](std::size_t b) {
        const VideoClip& clip = train[order[start + b]];
        try {
          ad::Tape tape;
          ad::TapeScope scope(tape);
          const auto r = model.forward(clip, training_mask(clip, n_tokens, options, seed, epoch));
          auto loss = ad::cross_entropy(r.logits, clip.label);
          losses[b] = loss.item();
          correct[b] = argmax(r.logits.data()) == clip.label;
          grads[b] = flatten_gradients(tape.backward(loss), params);
        } catch (const NumericError&) {
          losses[b] = std::numeric_limits<double>::quiet_NaN();
        }
      });
      std::vector<double> sum(adam.num_values(), 0.0);
      for (std::size_t b = 0; b < count; ++b) {
        if (!std::isfinite(losses[b]))
          throw DivergenceError("non-finite loss at epoch " + std::to_string(epoch) + ", step " +
                                std::to_string(step) + " (clip " +
                                std::to_string(train[order[start + b]].id) + ")");
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += grads[b][i];
        epoch_loss += losses[b];
        epoch_correct += correct[b];
      }
      const double inv = 1.0 / static_cast<double>(count);
      for (double& g : sum) g *= inv;
      clip_grad_norm(sum, options.grad_clip);
      adam.step(sum, cosine_lr(step, total_steps, warmup, options.lr, options.min_lr));
      ++step;
    }
    const double n = static_cast<double>(train.size());
    result.log.push_back({epoch, "train", epoch_loss / n, epoch_correct / n});
    if (!val.empty()) {
      const EvalStats v = evaluate(model, val);
      result.log.push_back({epoch, "val", v.loss, v.top1});
    }
  }
  model.set_trainable(false);
  return result;
}

}  // namespace lite
