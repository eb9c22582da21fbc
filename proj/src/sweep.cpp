#include "lite/sweep.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lite/errors.hpp"
#include "lite/parallel.hpp"

namespace lite {

PolicyScorer::PolicyScorer(const VideoTransformer& backbone, std::span<const VideoClip> clips, ScorerInputs inputs)
    : backbone_(backbone), clips_(clips), inputs_(inputs) {}

const std::vector<TokenScores>& PolicyScorer::scores(ScoreSource policy) {
  if (auto it = cache_.find(policy); it != cache_.end()) return it->second;
  std::vector<TokenScores> out(clips_.size());
  switch (policy) {
    case ScoreSource::oracle_true:
    case ScoreSource::oracle_pred: {
      const auto* src = policy == ScoreSource::oracle_true ? inputs_.oracle_true : inputs_.oracle_pred;
      if (!src) throw MissingArtifactError(std::string("policy ") + std::string(to_string(policy)) + " needs oracle scores");
      if (src->size() != clips_.size())
        throw ShapeError("oracle scores for " + std::to_string(src->size()) + " clips, expected " +
                         std::to_string(clips_.size()));
      out = *src;
      break;
    }
    case ScoreSource::selector: {
      if (!inputs_.selector) throw MissingArtifactError("policy selector needs a selector checkpoint");
      parallel_for(clips_.size(), [&](std::size_t i) {
        out[i] = inputs_.selector->score(backbone_.embed_all(clips_[i]));
      });
      break;
    }
    case ScoreSource::attention:
      parallel_for(clips_.size(), [&](std::size_t i) {
        out[i] = attention_scores(backbone_, clips_[i], inputs_.attention_block);
      });
      break;
    case ScoreSource::motion:
      parallel_for(clips_.size(), [&](std::size_t i) { out[i] = motion_scores(clips_[i], backbone_.config()); });
      break;
    case ScoreSource::random:
      throw ContractError("random policy has no scores");
  }
  return cache_.emplace(policy, std::move(out)).first->second;
}

SelectionMask PolicyScorer::mask(ScoreSource policy, std::size_t clip, double rho, std::uint64_t seed) {
  const std::size_t n = backbone_.config().num_tokens();
  if (policy == ScoreSource::random) return random_mask(n, rho, random_mask_seed(seed, clips_[clip].id, policy, rho));
  return top_k_mask(scores(policy)[clip], rho);
}

std::vector<ClipOutcome> evaluate_masks(const VideoTransformer& backbone, std::span<const VideoClip> clips,
                                        std::span<const SelectionMask> masks) {
  if (clips.size() != masks.size()) throw ShapeError("evaluate_masks: clip and mask counts differ");
  std::vector<ClipOutcome> out(clips.size());
  parallel_for(clips.size(), [&](std::size_t i) {
    const auto r = backbone.forward(clips[i], masks[i]);
    const auto logits = r.logits.data();
    const std::size_t label = clips[i].label;
    std::size_t above = 0;
    for (std::size_t k = 0; k < logits.size(); ++k)
      if (logits[k] > logits[label] || (logits[k] == logits[label] && k < label)) ++above;
    out[i] = {label, above == 0, above < 5};
  });
  return out;
}

Accuracy accuracy(std::span<const ClipOutcome> outcomes) {
  Accuracy a;
  a.n = outcomes.size();
  for (const auto& o : outcomes) {
    a.top1 += o.top1;
    a.top5 += o.top5;
  }
  if (a.n) {
    a.top1 /= static_cast<double>(a.n);
    a.top5 /= static_cast<double>(a.n);
  }
  return a;
}

std::vector<Accuracy> accuracy_by_class(std::span<const ClipOutcome> outcomes, std::size_t classes) {
  std::vector<Accuracy> out(classes);
  for (const auto& o : outcomes) {
    if (o.label >= classes) throw ContractError("label outside the class count");
    auto& a = out[o.label];
    ++a.n;
    a.top1 += o.top1;
    a.top5 += o.top5;
  }
  for (auto& a : out)
    if (a.n) {
      a.top1 /= static_cast<double>(a.n);
      a.top5 /= static_cast<double>(a.n);
    }
  return out;
}

double policy_gflops(const ModelConfig& config, ScoreSource policy, double rho, const flops::Convention& conv,
                     const SelectorConfig& selector, std::size_t attention_block) {
  std::optional<flops::SelectorShape> sel;
  if (policy == ScoreSource::selector) sel = selector.shape();
  double total = static_cast<double>(flops::model_flops(config, rho, conv, sel).total);
  if (policy == ScoreSource::attention) {
    const auto b = flops::block_flops(config.num_tokens(), config.embed_dim, config.heads, config.mlp_ratio, conv);
    total += static_cast<double>(b.total()) * static_cast<double>(attention_block + 1);
  }
  if (policy == ScoreSource::motion) total += static_cast<double>(config.frames * config.height * config.width * 3);
  return total * 1e-9;
}

std::string format_ratio(double rho) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", rho);
  return buf;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path, const char* header) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream is(path);
  if (!is) return rows;
  std::string line;
  if (!std::getline(is, line)) return rows;
  if (line != header) throw ConfigError(path.string(), "unexpected header '" + line + "'");
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
    (void)lineno;
  }
  return rows;
}

ScoreSource policy_cell(const std::string& s, const std::filesystem::path& path) {
  auto p = parse_score_source(s);
  if (!p) throw ConfigError(path.string(), "unknown policy '" + s + "'");
  return *p;
}

template <class T>
T number_cell(const std::string& s, const std::filesystem::path& path) {
  try {
    if constexpr (std::is_same_v<T, double>) return std::stod(s);
    else return static_cast<T>(std::stoull(s));
  } catch (const std::exception&) {
    throw ConfigError(path.string(), "bad number '" + s + "'");
  }
}

void write_atomically(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + tmp);
    os << text;
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

void write_sweep_csv(const std::filesystem::path& path, std::span<const SweepRow> rows) {
  std::string text = std::string(kSweepHeader) + "\n";
  for (const auto& r : rows)
    text += std::string(to_string(r.policy)) + "," + format_ratio(r.p_ratio) + "," + std::to_string(r.seed) + "," +
            fmt(r.top1) + "," + fmt(r.top5) + "," + fmt(r.gflops) + "," + std::to_string(r.n_clips) + "\n";
  write_atomically(path, text);
}

std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path) {
  std::vector<SweepRow> out;
  for (const auto& c : read_csv(path, kSweepHeader)) {
    if (c.size() != 7) throw ConfigError(path.string(), "expected 7 columns");
    out.push_back({policy_cell(c[0], path), number_cell<double>(c[1], path), number_cell<std::uint64_t>(c[2], path),
                   number_cell<double>(c[3], path), number_cell<double>(c[4], path), number_cell<double>(c[5], path),
                   number_cell<std::size_t>(c[6], path)});
  }
  return out;
}

void write_class_csv(const std::filesystem::path& path, std::span<const ClassRow> rows) {
  std::string text = std::string(kClassHeader) + "\n";
  for (const auto& r : rows)
    text += std::string(to_string(r.policy)) + "," + format_ratio(r.p_ratio) + "," + std::to_string(r.seed) + "," +
            std::to_string(r.label) + "," + fmt(r.top1) + "," + std::to_string(r.n_clips) + "\n";
  write_atomically(path, text);
}

std::vector<ClassRow> read_class_csv(const std::filesystem::path& path) {
  std::vector<ClassRow> out;
  for (const auto& c : read_csv(path, kClassHeader)) {
    if (c.size() != 6) throw ConfigError(path.string(), "expected 6 columns");
    out.push_back({policy_cell(c[0], path), number_cell<double>(c[1], path), number_cell<std::uint64_t>(c[2], path),
                   number_cell<std::size_t>(c[3], path), number_cell<double>(c[4], path),
                   number_cell<std::size_t>(c[5], path)});
  }
  return out;
}

}  // namespace lite
