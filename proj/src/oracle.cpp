#include "lite/oracle.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "lite/binary_io.hpp"
#include "lite/errors.hpp"
#include "lite/ops.hpp"
#include "lite/parallel.hpp"

namespace lite {

ScoreSource source_of(OracleMode mode) {
  return mode == OracleMode::true_label ? ScoreSource::oracle_true : ScoreSource::oracle_pred;
}

std::vector<double> importance_weights(const ad::Tensor& grads) {
  if (grads.rank() != 2 || grads.rows() == 0)
    throw ShapeError("importance_weights: expected [N x D] with N >= 1, got " + shape_str(grads.shape()));
  const std::size_t n = grads.rows(), d = grads.cols();
  std::vector<double> w(d, 0.0);
  auto g = grads.data();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) w[k] += g[i * d + k];
  for (double& v : w) v /= static_cast<double>(n);
  return w;
}

TokenScores token_scores(const ad::Tensor& activations, std::span<const double> weights,
                         ScoreSource source) {
  if (activations.rank() != 2 || activations.cols() != weights.size())
    throw ShapeError("token_scores: activations " + shape_str(activations.shape()) + " vs " +
                     std::to_string(weights.size()) + " weights");
  const std::size_t n = activations.rows(), d = activations.cols();
  auto a = activations.data();
  std::vector<double> raw(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) s += weights[k] * a[i * d + k];
    raw[i] = std::max(s, 0.0);
  }
  return normalize_scores(std::move(raw), source);
}

OracleResult compute_oracle(const VideoTransformer& model, const VideoClip& clip, OracleMode mode,
                            const OracleOptions& options) {
  const ModelConfig& config = model.config();
  ForwardOptions fo;
  fo.tap = options.tap.value_or(FeatureTap{config.blocks - 1, TapPoint::mlp_out});

  ad::Tape tape;
  ad::TapeScope scope(tape);
  ForwardResult r = model.forward(clip, fo);
  OracleResult out;
  out.logits.assign(r.logits.data().begin(), r.logits.data().end());
  out.predicted = static_cast<std::size_t>(
      std::max_element(out.logits.begin(), out.logits.end()) - out.logits.begin());
  if (mode == OracleMode::true_label) {
    if (clip.label >= config.classes)
      throw ContractError("clip " + std::to_string(clip.id) + " label " + std::to_string(clip.label) +
                          " outside the model's " + std::to_string(config.classes) + " classes");
    out.target = clip.label;
  } else {
    out.target = out.predicted;
  }
  ad::Tensor y = ad::scale(ad::slice_cols(r.logits, out.target, 1), options.logit_scale);
  const ad::GradientMap grads = tape.backward(ad::sum(y));
  auto g = grads.at(r.features);
  const ad::Tensor dy_da = ad::Tensor::from(r.features.shape(), {g.begin(), g.end()});
  out.scores = token_scores(r.features, importance_weights(dy_da), source_of(mode));
  return out;
}

std::vector<OracleResult> compute_oracles(const VideoTransformer& model,
                                          std::span<const VideoClip> clips, OracleMode mode,
                                          const OracleOptions& options) {
  std::vector<OracleResult> out(clips.size());
  parallel_for(clips.size(), [&](std::size_t i) { out[i] = compute_oracle(model, clips[i], mode, options); });
  return out;
}

void save_oracle_dump(const std::filesystem::path& path, std::span<const OracleRecord> records) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  for (const auto& r : records) {
    binary_io::write_u32(os, r.clip_id);
    binary_io::write_u32(os, static_cast<std::uint32_t>(r.mode));
    binary_io::write_u32(os, static_cast<std::uint32_t>(r.scores.size()));
    binary_io::write_f32s(os, r.scores);
  }
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::vector<OracleRecord> load_oracle_dump(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw MissingArtifactError("oracle dump not found: " + path.string());
  std::ifstream is(path, std::ios::binary);
  std::vector<OracleRecord> out;
  while (is.peek() != std::ifstream::traits_type::eof()) {
    OracleRecord r;
    std::uint32_t mode = 0, n = 0;
    if (!binary_io::read_u32(is, r.clip_id) || !binary_io::read_u32(is, mode) || !binary_io::read_u32(is, n))
      throw ShapeError("truncated oracle record header in " + path.string());
    if (mode > 1) throw ShapeError("bad oracle mode " + std::to_string(mode) + " in " + path.string());
    r.mode = static_cast<OracleMode>(mode);
    r.scores.resize(n);
    if (!binary_io::read_f32s(is, r.scores)) throw ShapeError("truncated oracle scores in " + path.string());
    out.push_back(std::move(r));
  }
  return out;
}

void export_oracle_csv(const std::filesystem::path& path, std::span<const OracleRecord> records) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << "clip_id,mode,token,score\n";
  char buf[32];
  for (const auto& r : records) {
    const std::string_view mode = to_string(source_of(r.mode));
    for (std::size_t i = 0; i < r.scores.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(r.scores[i]));
      os << r.clip_id << ',' << mode << ',' << i << ',' << buf << '\n';
    }
  }
}

}  // namespace lite
