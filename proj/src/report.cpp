#include "lite/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "lite/errors.hpp"
#include "lite/stats.hpp"

namespace lite {

namespace {

bool same_ratio(double a, double b) { return std::abs(a - b) < 1e-9; }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

ScoreHistogram report_histogram(std::span<const OracleRecord> records,
                                const std::map<std::uint32_t, std::size_t>& labels, std::size_t classes,
                                std::size_t bins) {
  if (bins == 0) throw ContractError("histogram needs at least one bin");
  ScoreHistogram h;
  h.bins = bins;
  h.counts.assign(bins, 0);
  h.per_class.assign(classes, std::vector<std::size_t>(bins, 0));
  std::vector<double> pooled;
  double clip_share = 0.0;
  for (const auto& r : records) {
    auto it = labels.find(r.clip_id);
    if (it == labels.end()) throw ContractError("no label for clip " + std::to_string(r.clip_id));
    if (it->second >= classes) throw ContractError("label outside the class count");
    std::vector<double> clip(r.scores.begin(), r.scores.end());
    for (double s : clip) {
      const auto b = std::min(bins - 1, static_cast<std::size_t>(std::max(0.0, s) * static_cast<double>(bins)));
      ++h.counts[b];
      ++h.per_class[it->second][b];
    }
    clip_share += stats::top_share(clip, 0.2);
    pooled.insert(pooled.end(), clip.begin(), clip.end());
  }
  h.total = pooled.size();
  if (!pooled.empty()) {
    double sum = 0.0;
    for (double s : pooled) sum += s;
    h.mean = sum / static_cast<double>(pooled.size());
    h.top20_share = stats::top_share(pooled, 0.2);
    h.clip_top20_share = clip_share / static_cast<double>(records.size());
    h.gini = stats::gini(pooled);
    h.skewness = stats::skewness(pooled);
  }
  return h;
}

void to_json(nlohmann::json& j, const ScoreHistogram& h) {
  j = {{"bins", h.bins},          {"counts", h.counts},
       {"per_class", h.per_class}, {"total", h.total},
       {"mean", h.mean},          {"top20_share", h.top20_share},
       {"clip_top20_share", h.clip_top20_share},
       {"gini", h.gini},          {"skewness", h.skewness}};
}

void write_histogram_csv(const std::filesystem::path& path, const ScoreHistogram& h) {
  std::string text = "bin,lo,hi,count";
  for (std::size_t c = 0; c < h.per_class.size(); ++c) text += ",class_" + std::to_string(c);
  text += "\n";
  for (std::size_t b = 0; b < h.bins; ++b) {
    const double w = 1.0 / static_cast<double>(h.bins);
    text += std::to_string(b) + "," + fmt(static_cast<double>(b) * w) + "," + fmt(static_cast<double>(b + 1) * w) +
            "," + std::to_string(h.counts[b]);
    for (const auto& pc : h.per_class) text += "," + std::to_string(pc[b]);
    text += "\n";
  }
  write_text(path, text);
}

DecayTable report_decay(std::span<const ClassRow> rows, ScoreSource policy, double reduced_rho,
                        std::size_t classes) {
  auto mean_by_class = [&](double rho) {
    std::vector<double> sum(classes, 0.0);
    std::vector<std::size_t> n(classes, 0);
    for (const auto& r : rows) {
      if (r.policy != policy || !same_ratio(r.p_ratio, rho) || r.label >= classes) continue;
      sum[r.label] += r.top1;
      ++n[r.label];
    }
    for (std::size_t c = 0; c < classes; ++c) {
      if (n[c] == 0)
        throw MissingArtifactError("per-class results lack policy " + std::string(to_string(policy)) +
                                   " at p_ratio " + format_ratio(rho) + " for class " + std::to_string(c));
      sum[c] /= static_cast<double>(n[c]);
    }
    return sum;
  };
  const auto full = mean_by_class(1.0);
  const auto reduced = mean_by_class(reduced_rho);
  DecayTable t;
  t.policy = policy;
  t.reduced_rho = reduced_rho;
  std::vector<double> x, y;
  for (std::size_t c = 0; c < classes; ++c) {
    DecayRow r{c, full[c], reduced[c], full[c] > 0.0 ? (full[c] - reduced[c]) / full[c] : 0.0};
    x.push_back(r.baseline);
    y.push_back(r.decay);
    t.rows.push_back(r);
  }
  t.spearman = stats::spearman(x, y);
  return t;
}

void to_json(nlohmann::json& j, const DecayTable& t) {
  j = nlohmann::json::object();
  j["policy"] = std::string(to_string(t.policy));
  j["reduced_p_ratio"] = t.reduced_rho;
  j["spearman_baseline_vs_decay"] = finite_or_null(t.spearman);
  auto& rows = j["classes"] = nlohmann::json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"class", r.label}, {"baseline_top1", r.baseline}, {"reduced_top1", r.reduced}, {"decay", r.decay}});
}

void write_decay_csv(const std::filesystem::path& path, const DecayTable& t) {
  std::string text = "class,baseline_top1,reduced_top1,decay\n";
  for (const auto& r : t.rows)
    text += std::to_string(r.label) + "," + fmt(r.baseline) + "," + fmt(r.reduced) + "," + fmt(r.decay) + "\n";
  write_text(path, text);
}

std::optional<Accuracy> cell_accuracy(std::span<const SweepRow> rows, ScoreSource policy, double rho) {
  Accuracy a;
  std::size_t seeds = 0;
  for (const auto& r : rows) {
    if (r.policy != policy || !same_ratio(r.p_ratio, rho)) continue;
    a.top1 += r.top1;
    a.top5 += r.top5;
    a.n = r.n_clips;
    ++seeds;
  }
  if (seeds == 0) return std::nullopt;
  a.top1 /= static_cast<double>(seeds);
  a.top5 /= static_cast<double>(seeds);
  return a;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

void write_checks_csv(const std::filesystem::path& path, std::span<const Check> checks) {
  std::string text = "check,value,pass,detail\n";
  for (const auto& c : checks)
    text += c.name + "," + fmt(c.value) + "," + (c.pass ? "true" : "false") + "," + c.detail + "\n";
  write_text(path, text);
}

}  // namespace lite
