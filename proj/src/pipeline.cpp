#include "lite/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <tuple>

#include "lite/checkpoint.hpp"
#include "lite/dataset.hpp"
#include "lite/errors.hpp"
#include "lite/parallel.hpp"
#include "lite/policies.hpp"
#include "lite/report.hpp"
#include "lite/rng.hpp"
#include "lite/selector.hpp"
#include "lite/stats.hpp"
#include "lite/sweep.hpp"
#include "lite/training.hpp"

namespace lite::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr std::uint64_t kBackboneStream = 1;
constexpr std::uint64_t kSelectorStream = 2;
constexpr std::uint64_t kProxyStream = 3;
constexpr std::uint64_t kSweepStream = 4;

constexpr std::array<std::string_view, 3> kSplits = {"train", "val", "test"};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    os << text;
  }
  fs::rename(tmp, path);
}

void snapshot_config(const ExperimentConfig& config) {
  json j;
  to_json(j, config);
  write_json(config.out / "config.json", j);
}

std::vector<VideoClip> split(const RunLayout& layout, std::string_view name) {
  return load_split(layout.data(), name);
}

VideoTransformer load_backbone(const RunLayout& layout) {
  return transformer_from_checkpoint(load_checkpoint(layout.checkpoint("backbone"), "backbone"));
}

void write_train_log(const fs::path& path, std::span<const TrainLogRow> rows) {
  std::string text = "epoch,split,loss,top1\n";
  for (const auto& r : rows) text += std::to_string(r.epoch) + "," + r.split + "," + fmt(r.loss) + "," + fmt(r.top1) + "\n";
  write_text(path, text);
}

// Oracle scores aligned with `clips`; throws ShapeError when the dump does not match.
std::vector<TokenScores> aligned_scores(const std::vector<OracleRecord>& records, std::span<const VideoClip> clips,
                                        OracleMode mode, const fs::path& source) {
  if (records.size() != clips.size())
    throw ShapeError(source.string() + ": " + std::to_string(records.size()) + " records for " +
                     std::to_string(clips.size()) + " clips");
  std::vector<TokenScores> out(clips.size());
  for (std::size_t i = 0; i < clips.size(); ++i) {
    if (records[i].clip_id != clips[i].id || records[i].mode != mode)
      throw ShapeError(source.string() + ": record " + std::to_string(i) + " does not match clip " +
                       std::to_string(clips[i].id));
    auto& s = out[i];
    s.values.assign(records[i].scores.begin(), records[i].scores.end());
    s.source = source_of(mode);
    s.degenerate = std::adjacent_find(s.values.begin(), s.values.end(), std::not_equal_to<>()) == s.values.end();
  }
  return out;
}

std::vector<std::vector<double>> targets_of(const std::vector<OracleRecord>& records) {
  std::vector<std::vector<double>> out;
  out.reserve(records.size());
  for (const auto& r : records) out.emplace_back(r.scores.begin(), r.scores.end());
  return out;
}

bool same_ratio(double a, double b) { return std::abs(a - b) < 1e-9; }

double mean_clip_spearman(const TokenSelector& selector, std::span<const ad::Tensor> embeddings,
                          std::span<const std::vector<double>> targets) {
  std::vector<double> rho(embeddings.size());
  parallel_for(embeddings.size(), [&](std::size_t i) {
    rho[i] = stats::spearman(selector.score(embeddings[i]).values, targets[i]);
  });
  double sum = 0.0;
  for (double r : rho) sum += r;
  return rho.empty() ? 0.0 : sum / static_cast<double>(rho.size());
}

}  // namespace

fs::path RunLayout::oracle(std::string_view split, OracleMode mode) const {
  return root / "oracle" / (std::string(split) + (mode == OracleMode::true_label ? "-oracle-true.bin" : "-oracle-pred.bin"));
}

fs::path RunLayout::predictions(std::string_view split) const {
  return root / "oracle" / (std::string(split) + "-predictions.csv");
}

void gen_data(const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  const RunLayout layout{config.out};
  Timer t;
  const Dataset data = generate_dataset(config.dataset);
  save_dataset(data, layout.data());
  snapshot_config(config);
  log << "gen-data: " << data.train.size() << " train, " << data.val.size() << " val, " << data.test.size()
      << " test clips -> " << layout.data().string() << " (" << fmt(t.seconds(), "%.1f") << " s)\n";
}

void train_backbone(const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  const RunLayout layout{config.out};
  const auto train = split(layout, "train");
  const auto val = split(layout, "val");
  Timer t;
  auto result = train_transformer(config.backbone, train, val, config.training, derive_seed(config.seed, kBackboneStream));
  save_checkpoint(layout.checkpoint("backbone"), to_checkpoint(result.model, "backbone"));
  write_train_log(layout.logs("backbone.csv"), result.log);
  snapshot_config(config);
  const auto test = evaluate(result.model, split(layout, "test"));
  log << "train-backbone: " << config.training.epochs << " epochs in " << fmt(t.seconds(), "%.1f")
      << " s, test top1 " << fmt(test.top1, "%.4f") << "\n";
}

void compute_oracle(const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  const RunLayout layout{config.out};
  const auto backbone = load_backbone(layout);
  const OracleOptions options{config.tap(), 1.0};
  Timer t;
  for (auto name : kSplits) {
    const auto clips = split(layout, name);
    std::string predictions = "clip_id,label,predicted\n";
    for (auto mode : {OracleMode::true_label, OracleMode::predicted}) {
      const auto results = compute_oracles(backbone, clips, mode, options);
      std::vector<OracleRecord> records(results.size());
      for (std::size_t i = 0; i < results.size(); ++i) {
        records[i].clip_id = clips[i].id;
        records[i].mode = mode;
        records[i].scores.assign(results[i].scores.values.begin(), results[i].scores.values.end());
        if (mode == OracleMode::predicted)
          predictions += std::to_string(clips[i].id) + "," + std::to_string(clips[i].label) + "," +
                         std::to_string(results[i].predicted) + "\n";
      }
      save_oracle_dump(layout.oracle(name, mode), records);
      if (name == "test") {
        auto csv = layout.oracle(name, mode);
        export_oracle_csv(csv.replace_extension(".csv"), records);
      }
    }
    write_text(layout.predictions(name), predictions);
  }
  snapshot_config(config);
  log << "compute-oracle: tap block " << config.tap().block << ", " << fmt(t.seconds(), "%.1f") << " s\n";
}

void train_selector(const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  const RunLayout layout{config.out};
  const auto backbone = load_backbone(layout);
  const auto train_records = load_oracle_dump(layout.oracle("train", OracleMode::true_label));
  const auto val_records = load_oracle_dump(layout.oracle("val", OracleMode::true_label));
  const auto test_records = load_oracle_dump(layout.oracle("test", OracleMode::true_label));
  const auto train = split(layout, "train");
  const auto val = split(layout, "val");
  const auto test = split(layout, "test");
  aligned_scores(train_records, train, OracleMode::true_label, layout.oracle("train", OracleMode::true_label));
  aligned_scores(val_records, val, OracleMode::true_label, layout.oracle("val", OracleMode::true_label));
  aligned_scores(test_records, test, OracleMode::true_label, layout.oracle("test", OracleMode::true_label));

  Timer t;
  const auto train_emb = embed_clips(backbone, train);
  const auto val_emb = embed_clips(backbone, val);
  const auto train_targets = targets_of(train_records);
  const auto val_targets = targets_of(val_records);
  auto result = train_selector(config.selector, train_emb, train_targets, val_emb, val_targets,
                               config.selector_training, derive_seed(config.seed, kSelectorStream));
  save_checkpoint(layout.checkpoint("selector"), to_checkpoint(result.selector));

  std::string text = "epoch,train_bce,val_bce\n";
  for (const auto& r : result.log)
    text += std::to_string(r.epoch) + "," + fmt(r.train_bce) + "," + fmt(r.val_bce) + "\n";
  write_text(layout.logs("selector.csv"), text);

  const auto test_emb = embed_clips(backbone, test);
  const double val_rho = mean_clip_spearman(result.selector, val_emb, val_targets);
  const double test_rho = mean_clip_spearman(result.selector, test_emb, targets_of(test_records));
  write_json(layout.results("selector_quality.json"),
             {{"val_spearman", val_rho}, {"test_spearman", test_rho}, {"test_clips", test.size()}});
  snapshot_config(config);
  log << "train-selector: " << config.selector_training.epochs << " epochs in " << fmt(t.seconds(), "%.1f")
      << " s, test Spearman vs oracle " << fmt(test_rho, "%.3f") << "\n";
}

void train_proxy(const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  const RunLayout layout{config.out};
  const std::size_t factor = config.proxy.downsample;
  auto shrink = [factor](const std::vector<VideoClip>& clips) {
    std::vector<VideoClip> out;
    out.reserve(clips.size());
    for (const auto& c : clips) out.push_back(factor > 1 ? downsample(c, factor) : c);
    return out;
  };
  const auto train = shrink(split(layout, "train"));
  const auto val = shrink(split(layout, "val"));
  Timer t;
  auto result = train_transformer(proxy_config(config.backbone, factor), train, val, config.proxy.training,
                                  derive_seed(config.seed, kProxyStream));
  const ConfidenceProxy proxy{factor, std::move(result.model)};
  save_checkpoint(layout.checkpoint("proxy"), to_checkpoint(proxy));
  write_train_log(layout.logs("proxy.csv"), result.log);
  snapshot_config(config);
  const auto test = evaluate(proxy.model, shrink(split(layout, "test")));
  log << "train-proxy: " << fmt(t.seconds(), "%.1f") << " s, test top1 " << fmt(test.top1, "%.4f") << "\n";
}

namespace {

using CellKey = std::tuple<ScoreSource, std::string, std::uint64_t>;

CellKey key_of(ScoreSource p, double rho, std::uint64_t seed) { return {p, format_ratio(rho), seed}; }

struct AdaptiveRow {
  ScoreSource policy = ScoreSource::selector;
  double base_rho = 0.0;
  Accuracy fixed, adaptive;
  flops::AdaptiveReport flops;
};

void write_adaptive(const RunLayout& layout, std::span<const AdaptiveRow> rows) {
  std::string text =
      "policy,base_p_ratio,top1_fixed,top1_adaptive,top5_fixed,top5_adaptive,base_gflops,mean_gflops,gross_gflops,"
      "reduction_pct,gross_reduction_pct,easy_clips,n_clips\n";
  json j = json::array();
  for (const auto& r : rows) {
    text += std::string(to_string(r.policy)) + "," + format_ratio(r.base_rho) + "," + fmt(r.fixed.top1) + "," +
            fmt(r.adaptive.top1) + "," + fmt(r.fixed.top5) + "," + fmt(r.adaptive.top5) + "," +
            fmt(r.flops.base_gflops) + "," + fmt(r.flops.mean_gflops) + "," + fmt(r.flops.gross_gflops) + "," +
            fmt(r.flops.reduction_pct) + "," + fmt(r.flops.gross_reduction_pct) + "," +
            std::to_string(r.flops.easy_clips) + "," + std::to_string(r.flops.clips) + "\n";
    json f;
    to_json(f, r.flops);
    j.push_back({{"policy", std::string(to_string(r.policy))},
                 {"base_p_ratio", r.base_rho},
                 {"top1_fixed", r.fixed.top1},
                 {"top1_adaptive", r.adaptive.top1},
                 {"top5_fixed", r.fixed.top5},
                 {"top5_adaptive", r.adaptive.top5},
                 {"flops", f}});
  }
  write_text(layout.results("adaptive.csv"), text);
  write_json(layout.results("adaptive.json"), j);
}

}  // namespace

void sweep(const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  const RunLayout layout{config.out};
  const auto& s = config.sweep;
  auto wants = [&](ScoreSource p) { return std::find(s.policies.begin(), s.policies.end(), p) != s.policies.end(); };

  const auto backbone = load_backbone(layout);
  const auto test = split(layout, "test");
  std::optional<TokenSelector> selector;
  if (wants(ScoreSource::selector) || checkpoint_exists(layout.checkpoint("selector")))
    selector = selector_from_checkpoint(load_checkpoint(layout.checkpoint("selector"), "selector"));
  std::vector<TokenScores> oracle_true, oracle_pred;
  if (wants(ScoreSource::oracle_true)) {
    const auto p = layout.oracle("test", OracleMode::true_label);
    oracle_true = aligned_scores(load_oracle_dump(p), test, OracleMode::true_label, p);
  }
  if (wants(ScoreSource::oracle_pred)) {
    const auto p = layout.oracle("test", OracleMode::predicted);
    oracle_pred = aligned_scores(load_oracle_dump(p), test, OracleMode::predicted, p);
  }
  PolicyScorer scorer(backbone, test,
                      {selector ? &*selector : nullptr, &oracle_true, &oracle_pred, s.attention_block});

  const fs::path sweep_csv = layout.results("sweep.csv"), class_csv = layout.results("per_class.csv");
  std::map<CellKey, SweepRow> rows;
  std::map<CellKey, std::vector<ClassRow>> class_rows;
  for (const auto& r : read_sweep_csv(sweep_csv)) rows[key_of(r.policy, r.p_ratio, r.seed)] = r;
  for (const auto& r : read_class_csv(class_csv)) class_rows[key_of(r.policy, r.p_ratio, r.seed)].push_back(r);

  const std::size_t classes = config.backbone.classes;
  std::vector<CellKey> grid;
  for (auto p : s.policies)
    for (double rho : s.p_ratios)
      for (auto seed : s.seeds) grid.push_back(key_of(p, rho, seed));
  auto done = [&](const CellKey& k) {
    auto c = class_rows.find(k);
    return rows.count(k) && c != class_rows.end() && c->second.size() == classes;
  };
  std::size_t stale = 0;
  for (const auto& [k, _] : rows) stale += std::find(grid.begin(), grid.end(), k) == grid.end();
  if (stale) log << "sweep: dropping " << stale << " rows outside the configured grid\n";

  auto flush = [&] {
    std::vector<SweepRow> out;
    std::vector<ClassRow> out_class;
    for (const auto& k : grid) {
      if (!done(k)) continue;
      out.push_back(rows[k]);
      out_class.insert(out_class.end(), class_rows[k].begin(), class_rows[k].end());
    }
    write_sweep_csv(sweep_csv, out);
    write_class_csv(class_csv, out_class);
  };

  Timer t;
  std::size_t computed = 0, skipped = 0;
  for (auto p : s.policies)
    for (double rho : s.p_ratios) {
      std::optional<std::vector<ClipOutcome>> deterministic;
      for (auto seed : s.seeds) {
        const auto k = key_of(p, rho, seed);
        if (done(k)) {
          ++skipped;
          continue;
        }
        std::vector<ClipOutcome> outcomes;
        if (p != ScoreSource::random && deterministic) {
          outcomes = *deterministic;
        } else {
          const std::uint64_t mask_seed = derive_seed(config.seed, kSweepStream, seed);
          std::vector<SelectionMask> masks;
          masks.reserve(test.size());
          for (std::size_t i = 0; i < test.size(); ++i) masks.push_back(scorer.mask(p, i, rho, mask_seed));
          outcomes = evaluate_masks(backbone, test, masks);
          if (p != ScoreSource::random) deterministic = outcomes;
        }
        const auto acc = accuracy(outcomes);
        rows[k] = {p, rho, seed, acc.top1, acc.top5,
                   policy_gflops(config.backbone, p, rho, config.flops, config.selector, s.attention_block),
                   test.size()};
        auto& cr = class_rows[k];
        cr.clear();
        const auto by_class = accuracy_by_class(outcomes, classes);
        for (std::size_t c = 0; c < classes; ++c) cr.push_back({p, rho, seed, c, by_class[c].top1, by_class[c].n});
        ++computed;
        flush();
      }
    }
  flush();
  log << "sweep: " << computed << " cells computed, " << skipped << " reused (" << fmt(t.seconds(), "%.1f") << " s)\n";

  if (!selector || !checkpoint_exists(layout.checkpoint("proxy"))) {
    log << "sweep: adaptive budget skipped (needs selector and proxy checkpoints)\n";
    return;
  }
  const auto proxy = proxy_from_checkpoint(load_checkpoint(layout.checkpoint("proxy"), "proxy"));
  std::vector<std::pair<std::size_t, double>> predicted(test.size());
  parallel_for(test.size(), [&](std::size_t i) { predicted[i] = proxy_predict(proxy, test[i]); });
  std::vector<double> confidence(test.size());
  std::string conf_text = "clip_id,label,proxy_predicted,confidence\n";
  for (std::size_t i = 0; i < test.size(); ++i) {
    confidence[i] = predicted[i].second;
    conf_text += std::to_string(test[i].id) + "," + std::to_string(test[i].label) + "," +
                 std::to_string(predicted[i].first) + "," + fmt(confidence[i], "%.9g") + "\n";
  }
  write_text(layout.results("confidence.csv"), conf_text);

  std::vector<AdaptiveRow> adaptive;
  const flops::ProxyShape proxy_shape{proxy.model.config(), proxy.downsample};
  for (double base : s.p_ratios) {
    const bool mapped = std::any_of(config.budget.reduced.begin(), config.budget.reduced.end(),
                                    [&](const auto& e) { return same_ratio(e.first, base); });
    if (!mapped) continue;
    std::vector<SelectionMask> fixed, dynamic;
    for (std::size_t i = 0; i < test.size(); ++i) {
      fixed.push_back(scorer.mask(ScoreSource::selector, i, base, 0));
      dynamic.push_back(
          scorer.mask(ScoreSource::selector, i, adaptive_budget(confidence[i], base, config.budget), 0));
    }
    AdaptiveRow row;
    row.base_rho = base;
    row.fixed = accuracy(evaluate_masks(backbone, test, fixed));
    row.adaptive = accuracy(evaluate_masks(backbone, test, dynamic));
    row.flops = flops::expected_adaptive_flops(config.backbone, confidence, base, config.budget, config.flops,
                                               config.selector.shape(), proxy_shape);
    adaptive.push_back(row);
  }
  write_adaptive(layout, adaptive);
  log << "sweep: adaptive budget over " << adaptive.size() << " base ratios\n";
}

namespace {

std::map<std::uint32_t, std::size_t> read_predictions(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw MissingArtifactError("missing predictions " + path.string() + " (run compute-oracle)");
  std::map<std::uint32_t, std::size_t> out;
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line)) {
    unsigned id = 0, label = 0, pred = 0;
    if (std::sscanf(line.c_str(), "%u,%u,%u", &id, &label, &pred) != 3)
      throw ShapeError(path.string() + ": malformed line '" + line + "'");
    out[id] = pred;
  }
  return out;
}

json read_json(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw MissingArtifactError("missing " + path.string());
  return json::parse(is);
}

}  // namespace

void report(const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  const RunLayout layout{config.out};
  const auto& rs = config.report;
  const auto test = split(layout, "test");
  const auto true_path = layout.oracle("test", OracleMode::true_label);
  const auto records = load_oracle_dump(true_path);
  const auto scores = aligned_scores(records, test, OracleMode::true_label, true_path);
  std::map<std::uint32_t, std::size_t> labels;
  for (const auto& c : test) labels[c.id] = c.label;

  std::vector<Check> checks;
  auto check = [&](std::string name, double value, bool pass, std::string detail = "") {
    checks.push_back({std::move(name), value, pass, std::move(detail)});
  };

  const auto hist = report_histogram(records, labels, config.backbone.classes, rs.histogram_bins);
  json hj;
  to_json(hj, hist);
  hj["pareto_threshold"] = rs.pareto_threshold;
  write_json(layout.reports("histogram.json"), hj);
  write_histogram_csv(layout.reports("histogram.csv"), hist);
  check("pareto_top20_share", hist.top20_share, hist.top20_share > rs.pareto_threshold,
        "threshold " + fmt(rs.pareto_threshold, "%.2f"));
  check("pareto_gini", hist.gini, hist.gini > 0.3, "threshold 0.30");
  check("pareto_right_skew", hist.skewness, hist.skewness > 0.0);

  // Glyph tokens outscore background on correctly classified clips.
  const auto predicted = read_predictions(layout.predictions("test"));
  std::size_t correct = 0, glyph_wins = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto it = predicted.find(test[i].id);
    if (it == predicted.end() || it->second != test[i].label) continue;
    ++correct;
    std::vector<bool> glyph(scores[i].values.size(), false);
    for (auto tok : test[i].glyph_tokens) glyph.at(tok) = true;
    double gs = 0, bs = 0;
    std::size_t gn = 0, bn = 0;
    for (std::size_t n = 0; n < glyph.size(); ++n) (glyph[n] ? (gs += scores[i].values[n], ++gn) : (bs += scores[i].values[n], ++bn));
    if (gn && (bn == 0 || gs / static_cast<double>(gn) > bs / static_cast<double>(bn))) ++glyph_wins;
  }
  const double sanity = correct ? static_cast<double>(glyph_wins) / static_cast<double>(correct) : 0.0;
  check("oracle_glyph_over_background", sanity, sanity >= 0.9, std::to_string(correct) + " correct clips");

  const auto rows = read_sweep_csv(layout.results("sweep.csv"));
  if (rows.empty()) throw MissingArtifactError("missing sweep results " + layout.results("sweep.csv").string());
  auto acc = [&](ScoreSource p, double rho) { return cell_accuracy(rows, p, rho); };

  const auto full = acc(ScoreSource::random, 1.0);
  if (auto t = acc(ScoreSource::oracle_true, 0.5), p = acc(ScoreSource::oracle_pred, 0.5); t && p)
    check("oracle_true_ge_pred_at_0.5", t->top1 - p->top1, t->top1 >= p->top1);
  if (auto sel = acc(ScoreSource::selector, 0.5), rnd = acc(ScoreSource::random, 0.5); sel && rnd)
    check("selector_ge_random_at_0.5", sel->top1 - rnd->top1, sel->top1 >= rnd->top1);
  if (fs::exists(layout.results("selector_quality.json"))) {
    const double rho = read_json(layout.results("selector_quality.json")).at("test_spearman").get<double>();
    check("selector_spearman", rho, rho >= 0.4, "threshold 0.40");
  }
  if (full) {
    auto r01 = acc(ScoreSource::random, 0.1), r05 = acc(ScoreSource::random, 0.5), r09 = acc(ScoreSource::random, 0.9);
    if (r05) {
      const double d05 = 100.0 * (full->top1 - r05->top1);
      check("random_drop_points_at_0.5", d05, d05 < 5.0, "threshold 5");
      if (r01 && r09) {
        const double d01 = 100.0 * (full->top1 - r01->top1), d09 = 100.0 * (full->top1 - r09->top1);
        check("random_cliff", (d01 - d05) - (d05 - d09), d01 - d05 > d05 - d09);
      }
    }
    double best = -1.0, best_rho = 0.0;
    for (double rho : {0.3, 0.5, 0.7})
      if (auto o = acc(ScoreSource::oracle_true, rho); o && o->top1 - full->top1 > best) {
        best = o->top1 - full->top1;
        best_rho = rho;
      }
    if (best > -1.0)
      check("oracle_true_ge_full", best, best >= 0.0, "best p_ratio " + format_ratio(best_rho));
  }

  const auto class_rows = read_class_csv(layout.results("per_class.csv"));
  const auto decay = report_decay(class_rows, rs.decay_policy, rs.decay_p_ratio, config.backbone.classes);
  json dj;
  to_json(dj, decay);
  write_json(layout.reports("decay.json"), dj);
  write_decay_csv(layout.reports("decay.csv"), decay);
  check("decay_spearman_negative", decay.spearman, decay.spearman < 0.0);

  if (fs::exists(layout.results("adaptive.json"))) {
    for (const auto& a : read_json(layout.results("adaptive.json"))) {
      if (!same_ratio(a.at("base_p_ratio").get<double>(), 0.9)) continue;
      const double reduction = a.at("flops").at("reduction_pct").get<double>();
      const double drop = 100.0 * (a.at("top1_fixed").get<double>() - a.at("top1_adaptive").get<double>());
      check("adaptive_reduction_pct_at_0.9", reduction, reduction > 0.0);
      check("adaptive_drop_points_at_0.9", drop, drop <= 2.0, "threshold 2");
    }
  }

  json summary = json::array();
  for (const auto& c : checks)
    summary.push_back({{"check", c.name}, {"value", c.value}, {"pass", c.pass}, {"detail", c.detail}});
  write_json(layout.reports("summary.json"), summary);
  write_checks_csv(layout.reports("summary.csv"), checks);
  snapshot_config(config);
  std::size_t passed = 0;
  for (const auto& c : checks) {
    passed += c.pass;
    log << "  " << (c.pass ? "ok   " : "miss ") << c.name << " = " << fmt(c.value, "%.4f")
        << (c.detail.empty() ? "" : " (" + c.detail + ")") << "\n";
  }
  log << "report: " << passed << "/" << checks.size() << " directional checks hold\n";
}

void run_all(const ExperimentConfig& config, std::ostream& log) {
  gen_data(config, log);
  train_backbone(config, log);
  compute_oracle(config, log);
  train_selector(config, log);
  train_proxy(config, log);
  sweep(config, log);
  report(config, log);
}

}  // namespace lite::pipeline
