// Acceptance suite: one PASS/FAIL line per criterion. Runs the desk pipeline
// twice plus the extra training seeds, so expect tens of minutes on one core.
// Exit status is non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gradcheck.hpp"
#include "lite/budget.hpp"
#include "lite/checkpoint.hpp"
#include "lite/dataset.hpp"
#include "lite/experiment_config.hpp"
#include "lite/flops.hpp"
#include "lite/oracle.hpp"
#include "lite/pipeline.hpp"
#include "lite/policies.hpp"
#include "lite/rng.hpp"
#include "lite/selector.hpp"
#include "lite/stats.hpp"
#include "lite/sweep.hpp"

namespace fs = std::filesystem;
using namespace lite;
using lite::ad::Tensor;
using lite::testing::check_gradients;
using lite::testing::random_tensor;
using lite::testing::weighted_sum;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream is(p);
  if (!is) throw MissingArtifactError("missing " + p.string());
  return nlohmann::json::parse(is);
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------

Verdict flops_reproduction() {
  ModelConfig c;
  c.frames = 16;
  c.height = c.width = 224;
  c.tube_t = 2;
  c.tube_h = c.tube_w = 16;
  c.embed_dim = 768;
  c.heads = 12;
  c.blocks = 12;
  c.mlp_ratio = 4;
  c.classes = 174;
  const std::vector<std::pair<double, double>> table = {{1.0, 181}, {0.9, 159}, {0.7, 118}, {0.5, 80}, {0.3, 46}};
  Verdict v{true, ""};
  for (auto [rho, reference] : table) {
    const double got = flops::model_flops(c, rho).gflops();
    const double dev = (got - reference) / reference;
    v.pass = v.pass && std::abs(dev) <= 0.05;
    if (!v.detail.empty()) v.detail += ", ";
    v.detail += "rho " + fmt("%.1f", rho) + " " + fmt("%.1f", got) + " GFLOPs vs " + fmt("%.0f", reference) +
                fmt(" (%+.1f%%)", 100 * dev);
  }
  return v;
}

// ---------------------------------------------------------------------------

constexpr int kInstances = 50;
constexpr double kGradTol = 1e-4;

ModelConfig grad_model() {
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

Verdict gradient_suite() {
  using Fn = std::function<Tensor(const std::vector<Tensor>&)>;
  struct Case {
    std::string name;
    Fn f;
    std::vector<Shape> shapes;
  };
  std::vector<Case> cases = {
      {"matmul", [](const auto& in) { return weighted_sum(ad::matmul(in[0], in[1]), 1); }, {{3, 4}, {4, 5}}},
      {"transpose", [](const auto& in) { return weighted_sum(ad::transpose(in[0]), 2); }, {{3, 2}}},
      {"add", [](const auto& in) { return weighted_sum(ad::add(in[0], in[1]), 3); }, {{2, 3}, {2, 3}}},
      {"sub", [](const auto& in) { return weighted_sum(ad::sub(in[0], in[1]), 4); }, {{2, 3}, {2, 3}}},
      {"mul", [](const auto& in) { return weighted_sum(ad::mul(in[0], in[1]), 5); }, {{2, 3}, {2, 3}}},
      {"scale", [](const auto& in) { return weighted_sum(ad::scale(in[0], -1.7), 6); }, {{4}}},
      {"add_row_bias", [](const auto& in) { return weighted_sum(ad::add_row_bias(in[0], in[1]), 7); },
       {{3, 4}, {4}}},
      {"relu", [](const auto& in) { return weighted_sum(ad::relu(in[0]), 8); }, {{6}}},
      {"gelu", [](const auto& in) { return weighted_sum(ad::gelu(in[0]), 9); }, {{6}}},
      {"sigmoid", [](const auto& in) { return weighted_sum(ad::sigmoid(in[0]), 10); }, {{6}}},
      {"softmax_rows", [](const auto& in) { return weighted_sum(ad::softmax(in[0], 1), 11); }, {{3, 5}}},
      {"softmax_cols", [](const auto& in) { return weighted_sum(ad::softmax(in[0], 0), 12); }, {{3, 5}}},
      {"layernorm", [](const auto& in) { return weighted_sum(ad::layernorm(in[0], in[1], in[2], 1e-5), 13); },
       {{3, 6}, {6}, {6}}},
      {"slice_cols", [](const auto& in) { return weighted_sum(ad::slice_cols(in[0], 1, 2), 14); }, {{3, 4}}},
      {"concat_cols",
       [](const auto& in) {
         std::vector<Tensor> parts{in[0], in[1]};
         return weighted_sum(ad::concat_cols(parts), 15);
       },
       {{3, 2}, {3, 3}}},
      {"gather_rows",
       [](const auto& in) {
         std::vector<std::size_t> rows{2, 0, 2};
         return weighted_sum(ad::gather_rows(in[0], rows), 16);
       },
       {{3, 4}}},
      {"mean_rows", [](const auto& in) { return weighted_sum(ad::mean_rows(in[0]), 17); }, {{4, 3}}},
      {"sum", [](const auto& in) { return ad::sum(ad::mul(in[0], in[0])); }, {{5}}},
      {"cross_entropy", [](const auto& in) { return ad::cross_entropy(in[0], 2); }, {{1, 5}}},
      {"bce_with_logits",
       [](const auto& in) {
         std::vector<double> t{0.0, 0.3, 0.9, 1.0};
         return ad::bce_with_logits(in[0], t);
       },
       {{4}}},
  };

  Verdict v{true, ""};
  double worst_all = 0.0;
  std::string worst_name;
  auto record = [&](const std::string& name, double worst) {
    if (worst > worst_all) {
      worst_all = worst;
      worst_name = name;
    }
    if (!(worst < kGradTol)) {
      v.pass = false;
      v.detail += name + fmt("=%.2e ", worst);
    }
  };

  for (const auto& c : cases) {
    double worst = 0.0;
    for (int inst = 0; inst < kInstances; ++inst) {
      Rng rng(derive_seed(inst, 1234));
      std::vector<Tensor> inputs;
      for (const auto& s : c.shapes) inputs.push_back(random_tensor(rng, s, -2.0, 2.0));
      worst = std::max(worst, check_gradients(c.f, inputs).max_rel_error);
    }
    record(c.name, worst);
  }

  // Full backbone cross-entropy, all parameters, with a random token mask per instance.
  {
    const ModelConfig cfg = grad_model();
    const std::size_t n = cfg.num_tokens();
    double worst = 0.0;
    for (int inst = 0; inst < kInstances; ++inst) {
      VideoTransformer m(cfg, derive_seed(inst, 1));
      Rng rng(derive_seed(inst, 2));
      for (auto& p : m.parameters())
        for (double& x : p.tensor.mutable_data()) x += rng.uniform(-0.3, 0.3);
      m.set_trainable(true);
      VideoClip clip;
      clip.id = static_cast<std::uint32_t>(inst);
      clip.frames = cfg.frames;
      clip.height = cfg.height;
      clip.width = cfg.width;
      clip.label = static_cast<std::size_t>(inst) % cfg.classes;
      clip.pixels.resize(cfg.frames * cfg.height * cfg.width * 3);
      for (float& p : clip.pixels) p = static_cast<float>(rng.uniform());
      const auto mask = random_mask(n, 0.25 + 0.75 * rng.uniform(), derive_seed(inst, 3));
      std::vector<Tensor> params;
      for (const auto& p : m.parameters()) params.push_back(p.tensor);
      auto r = check_gradients([&](const auto&) { return ad::cross_entropy(m.forward(clip, mask).logits, clip.label); },
                               params);
      worst = std::max(worst, r.max_rel_error);
    }
    record("backbone_ce", worst);
  }

  // Selector BCE against soft oracle targets, all parameters.
  {
    SelectorConfig sc;
    sc.embed_dim = 6;
    sc.hidden1 = 5;
    sc.hidden2 = 4;
    double worst = 0.0;
    for (int inst = 0; inst < kInstances; ++inst) {
      TokenSelector s(sc, derive_seed(inst, 4));
      s.set_trainable(true);
      Rng rng(derive_seed(inst, 5));
      const Tensor emb = random_tensor(rng, {7, sc.embed_dim}, -1.0, 1.0, false);
      std::vector<double> targets(7);
      for (double& t : targets) t = rng.uniform();
      std::vector<Tensor> params;
      for (const auto& p : s.parameters()) params.push_back(p.tensor);
      auto r = check_gradients([&](const auto&) { return ad::bce_with_logits(s.logits(emb), targets); }, params);
      worst = std::max(worst, r.max_rel_error);
    }
    record("selector_bce", worst);
  }

  v.detail = std::to_string(cases.size() + 2) + " functions x " + std::to_string(kInstances) +
             " instances, worst " + worst_name + fmt(" %.2e", worst_all) + (v.pass ? "" : "; over: " + v.detail);
  return v;
}

// ---------------------------------------------------------------------------

Verdict mask_properties() {
  std::size_t checks = 0, failures = 0;
  auto expect = [&](bool ok) {
    ++checks;
    failures += !ok;
  };
  auto valid = [](const SelectionMask& m) {
    auto ix = m.indices();
    for (std::size_t i = 0; i < ix.size(); ++i) {
      if (ix[i] >= m.num_tokens()) return false;
      if (i > 0 && ix[i] <= ix[i - 1]) return false;
    }
    return true;
  };
  Rng rng(2024);
  for (int inst = 0; inst < 2000; ++inst) {
    const std::size_t n = 1 + rng.below(400);
    // rho = a / 1000 so ceil(rho N) has an exact integer form.
    const std::size_t a = 1 + rng.below(1000);
    const double rho = static_cast<double>(a) / 1000.0;
    const std::size_t want = std::max<std::size_t>(1, (a * n + 999) / 1000);

    std::vector<double> s(n);
    const std::size_t levels = 1 + rng.below(6);
    for (double& x : s) x = static_cast<double>(rng.below(levels)) / static_cast<double>(levels);

    const auto top = top_k_mask(s, rho);
    expect(top.size() == want);
    expect(valid(top));

    // Tie-break: the kept set is the k largest by (score desc, index asc).
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return s[i] > s[j]; });
    std::vector<std::size_t> ref(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(want));
    std::sort(ref.begin(), ref.end());
    expect(std::equal(ref.begin(), ref.end(), top.indices().begin(), top.indices().end()));
    const auto again = top_k_mask(s, rho);
    expect(std::equal(again.indices().begin(), again.indices().end(), top.indices().begin(), top.indices().end()));

    // Strictly increasing transforms keep the selection.
    std::vector<double> t1(n), t2(n);
    for (std::size_t i = 0; i < n; ++i) {
      t1[i] = std::exp(3.0 * s[i]) - 5.0;
      t2[i] = 0.25 * s[i] * s[i] * s[i] + 7.0;
    }
    for (const auto& t : {t1, t2}) {
      const auto m = top_k_mask(t, rho);
      expect(std::equal(m.indices().begin(), m.indices().end(), top.indices().begin(), top.indices().end()));
    }

    const std::uint64_t seed = rng.next_u64();
    const auto r1 = random_mask(n, rho, seed);
    const auto r2 = random_mask(n, rho, seed);
    expect(r1.size() == want);
    expect(valid(r1));
    expect(std::equal(r1.indices().begin(), r1.indices().end(), r2.indices().begin(), r2.indices().end()));
  }
  // Different seeds give different draws for a non-trivial mask.
  std::size_t distinct = 0;
  const auto base = random_mask(64, 0.5, 1);
  for (std::uint64_t seed = 2; seed < 102; ++seed) {
    const auto m = random_mask(64, 0.5, seed);
    distinct += !std::equal(m.indices().begin(), m.indices().end(), base.indices().begin(), base.indices().end());
  }
  expect(distinct == 100);
  return {failures == 0, std::to_string(checks - failures) + "/" + std::to_string(checks) + " property checks"};
}

// ---------------------------------------------------------------------------

ExperimentConfig with_out(ExperimentConfig c, const fs::path& out) {
  c.out = out;
  return c;
}

std::vector<fs::path> csv_files(const fs::path& root) {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file() && e.path().extension() == ".csv") out.push_back(fs::relative(e.path(), root));
  std::sort(out.begin(), out.end());
  return out;
}

Verdict determinism(const fs::path& a, const fs::path& b, double seconds_a) {
  const auto fa = csv_files(a), fb = csv_files(b);
  std::size_t same = 0;
  std::string diff;
  for (const auto& f : fa) {
    if (fs::exists(b / f) && slurp(a / f) == slurp(b / f))
      ++same;
    else
      diff += f.string() + " ";
  }
  const bool files_match = fa == fb && same == fa.size() && !fa.empty();
  const bool fast = seconds_a < 30.0 * 60.0;
  std::string detail = std::to_string(same) + "/" + std::to_string(fa.size()) + " CSVs byte-identical, run " +
                       fmt("%.0f s", seconds_a) + " (limit 1800 s)";
  if (!diff.empty()) detail += "; differ: " + diff;
  if (fa != fb) detail += "; file sets differ";
  return {files_match && fast, detail};
}

// ---------------------------------------------------------------------------

void zero_tubes(VideoClip& clip, const ModelConfig& c, std::span<const std::size_t> tokens) {
  const TokenGrid g(c);
  for (auto t : tokens) {
    const auto co = g.coord(t);
    for (std::size_t dt = 0; dt < c.tube_t; ++dt)
      for (std::size_t dy = 0; dy < c.tube_h; ++dy)
        for (std::size_t dx = 0; dx < c.tube_w; ++dx)
          for (std::size_t ch = 0; ch < 3; ++ch)
            clip.pixels[clip.offset(co.t * c.tube_t + dt, co.h * c.tube_h + dy, co.w * c.tube_w + dx, ch)] = 0.f;
  }
}

Verdict occlusion(const ExperimentConfig& cfg) {
  const pipeline::RunLayout layout{cfg.out};
  const auto backbone = transformer_from_checkpoint(load_checkpoint(layout.checkpoint("backbone"), "backbone"));
  const auto test = load_split(layout.data(), "test");
  const auto records = load_oracle_dump(layout.oracle("test", OracleMode::true_label));
  const auto& c = backbone.config();
  const std::size_t n = c.num_tokens();
  const double rho = 0.1;
  std::vector<int> wins(test.size(), 0);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto& clip = test[i];
    const std::vector<double> s(records[i].scores.begin(), records[i].scores.end());
    const auto top = top_k_mask(s, rho);
    const auto rnd = random_mask(n, rho, derive_seed(cfg.seed, 77, clip.id));
    const double base = backbone.forward(clip).logits.data()[clip.label];
    VideoClip a = clip, b = clip;
    zero_tubes(a, c, top.indices());
    zero_tubes(b, c, rnd.indices());
    const double drop_top = base - backbone.forward(a).logits.data()[clip.label];
    const double drop_rnd = base - backbone.forward(b).logits.data()[clip.label];
    wins[i] = drop_top > drop_rnd;
  }
  const double rate = static_cast<double>(std::accumulate(wins.begin(), wins.end(), 0)) / test.size();
  return {test.size() >= 200 && rate >= 0.8,
          fmt("%.3f", rate) + " of " + std::to_string(test.size()) + " clips (need >= 0.80, >= 200 clips), " +
              std::to_string(tokens_for_ratio(rho, n)) + " of " + std::to_string(n) + " tokens zeroed"};
}

Verdict pareto(const ExperimentConfig& cfg) {
  const pipeline::RunLayout layout{cfg.out};
  std::vector<double> all;
  for (const auto& r : load_oracle_dump(layout.oracle("test", OracleMode::true_label)))
    all.insert(all.end(), r.scores.begin(), r.scores.end());
  const double skew = stats::skewness(all), share = stats::top_share(all, 0.2), g = stats::gini(all);
  const double threshold = cfg.report.pareto_threshold;
  return {skew > 0.0 && share > threshold && g > 0.3,
          "skew " + fmt("%.3f", skew) + ", top-20% share " + fmt("%.3f", share) + " (threshold " +
              fmt("%.2f", threshold) + "), gini " + fmt("%.3f", g)};
}

std::optional<double> mean_top1(const std::vector<SweepRow>& rows, ScoreSource p, double rho) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : rows)
    if (r.policy == p && format_ratio(r.p_ratio) == format_ratio(rho)) {
      sum += r.top1;
      ++n;
    }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

// Backbone seeds 0 (run A) plus two more trained on the same data.
Verdict label_mode(const ExperimentConfig& cfg, const fs::path& work) {
  std::vector<double> diffs;
  std::string detail;
  for (std::uint64_t s : {0u, 1u, 2u}) {
    fs::path dir = cfg.out;
    if (s != 0) {
      ExperimentConfig c = with_out(cfg, work / ("seed" + std::to_string(s)));
      c.seed = s;
      c.sweep.policies = {ScoreSource::oracle_true, ScoreSource::oracle_pred};
      c.sweep.p_ratios = {0.5};
      c.sweep.seeds = {0};
      fs::remove_all(c.out);
      pipeline::gen_data(c, std::cerr);
      pipeline::train_backbone(c, std::cerr);
      pipeline::compute_oracle(c, std::cerr);
      pipeline::sweep(c, std::cerr);
      dir = c.out;
    }
    const auto rows = read_sweep_csv(dir / "results" / "sweep.csv");
    const double t = mean_top1(rows, ScoreSource::oracle_true, 0.5).value();
    const double p = mean_top1(rows, ScoreSource::oracle_pred, 0.5).value();
    diffs.push_back(t - p);
    detail += "seed " + std::to_string(s) + " " + fmt("%.3f", t) + " vs " + fmt("%.3f", p) + "; ";
  }
  const double mean = std::accumulate(diffs.begin(), diffs.end(), 0.0) / diffs.size();
  return {mean >= 0.0, detail + "mean difference " + fmt("%+.4f", mean)};
}

Verdict selector_quality(const ExperimentConfig& cfg, const fs::path& source_dir) {
  const pipeline::RunLayout layout{cfg.out};
  const double rho_s = read_json(layout.results("selector_quality.json")).at("test_spearman").get<double>();

  const auto backbone = transformer_from_checkpoint(load_checkpoint(layout.checkpoint("backbone"), "backbone"));
  auto targets = [&](std::string_view split) {
    std::vector<std::vector<double>> out;
    for (const auto& r : load_oracle_dump(layout.oracle(split, OracleMode::true_label)))
      out.emplace_back(r.scores.begin(), r.scores.end());
    return out;
  };
  const auto train = load_split(layout.data(), "train");
  const auto val = load_split(layout.data(), "val");
  const auto test = load_split(layout.data(), "test");
  const auto train_emb = embed_clips(backbone, train);
  const auto val_emb = embed_clips(backbone, val);
  const auto test_emb = embed_clips(backbone, test);
  const auto train_t = targets("train"), val_t = targets("val");

  std::vector<double> sel_acc;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto r = train_selector(cfg.selector, train_emb, train_t, val_emb, val_t, cfg.selector_training,
                                  derive_seed(s, 2));
    std::vector<SelectionMask> masks;
    for (const auto& e : test_emb) masks.push_back(top_k_mask(r.selector.score(e), 0.5));
    sel_acc.push_back(accuracy(evaluate_masks(backbone, test, masks)).top1);
  }
  std::vector<double> rnd_acc;
  const auto rows = read_sweep_csv(layout.results("sweep.csv"));
  for (const auto& r : rows)
    if (r.policy == ScoreSource::random && format_ratio(r.p_ratio) == "0.5") rnd_acc.push_back(r.top1);
  const double sel = std::accumulate(sel_acc.begin(), sel_acc.end(), 0.0) / sel_acc.size();
  const double rnd =
      rnd_acc.empty() ? 0.0 : std::accumulate(rnd_acc.begin(), rnd_acc.end(), 0.0) / rnd_acc.size();

  const auto reference = read_json(source_dir / "configs" / "full_scale.json");
  const auto big = model_config_from_json(reference.at("backbone"), "backbone");
  const auto conv = convention_from_json(reference.at("flops"), "flops");
  const flops::SelectorShape shape{reference.at("selector").at("hidden1").get<std::size_t>(),
                                   reference.at("selector").at("hidden2").get<std::size_t>()};
  const double share = static_cast<double>(flops::selector_flops(big.num_tokens(), big.embed_dim, shape, conv)) /
                       static_cast<double>(flops::model_flops(big, 1.0, conv).total);

  const bool ok = rho_s >= 0.4 && rnd_acc.size() == 5 && sel >= rnd && share < 0.02;
  return {ok, "Spearman " + fmt("%.3f", rho_s) + " (need >= 0.40); top-50% selector " + fmt("%.3f", sel) +
                  " vs random " + fmt("%.3f", rnd) + " over 5 seeds; full-scale selector " +
                  fmt("%.2f%%", 100 * share) + " of backbone"};
}

Verdict adaptive(const ExperimentConfig& cfg) {
  const pipeline::RunLayout layout{cfg.out};
  // The three easy/middle-band examples for tau1 = 0.1, tau2 = 0.5.
  const BudgetPolicy p;
  const bool mapping = adaptive_budget(0.7, 0.5, p) == 0.3 && adaptive_budget(0.6, 0.3, p) == 0.2 &&
                       adaptive_budget(0.3, 0.5, p) == 0.5;
  for (const auto& a : read_json(layout.results("adaptive.json"))) {
    if (a.at("policy") != "selector" || format_ratio(a.at("base_p_ratio").get<double>()) != "0.9") continue;
    const auto& f = a.at("flops");
    const double net = f.at("reduction_pct").get<double>(), gross = f.at("gross_reduction_pct").get<double>();
    const double drop = 100.0 * (a.at("top1_fixed").get<double>() - a.at("top1_adaptive").get<double>());
    return {mapping && net > 0.0 && drop <= 2.0,
            "GFLOPs reduction " + fmt("%.2f%%", net) + " with proxy, " + fmt("%.2f%%", gross) + " without; " +
                std::to_string(f.at("easy_clips").get<std::size_t>()) + "/" +
                std::to_string(f.at("clips").get<std::size_t>()) + " easy clips; top-1 drop " +
                fmt("%.2f", drop) + " points (limit 2); budget examples " + (mapping ? "ok" : "wrong")};
  }
  return {false, "no selector row at base 0.9 in adaptive.json"};
}

// Noise knob: records the ratio at which oracle-true top-K matches or beats all tokens.
std::string noisy_oracle(const fs::path& noisy_config, const fs::path& work) {
  ExperimentConfig c = with_out(load_experiment_config(noisy_config), work / "noisy");
  c.sweep.policies = {ScoreSource::oracle_true};
  c.sweep.p_ratios = {0.3, 0.5, 0.7, 1.0};
  c.sweep.seeds = {0};
  fs::remove_all(c.out);
  pipeline::gen_data(c, std::cerr);
  pipeline::train_backbone(c, std::cerr);
  pipeline::compute_oracle(c, std::cerr);
  pipeline::sweep(c, std::cerr);
  const auto rows = read_sweep_csv(c.out / "results" / "sweep.csv");
  const double full = mean_top1(rows, ScoreSource::oracle_true, 1.0).value();
  std::string out = "noise " + fmt("%.2f", c.dataset.noise) + ", full " + fmt("%.3f", full);
  std::string best = "none";
  for (double rho : {0.3, 0.5, 0.7}) {
    const double a = mean_top1(rows, ScoreSource::oracle_true, rho).value();
    out += ", " + fmt("%.1f", rho) + ": " + fmt("%.3f", a);
    if (a >= full && best == "none") best = fmt("%.1f", rho);
  }
  return out + "; oracle >= full at p_ratio " + best;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance suite"};
  fs::path source = LITE_SOURCE_DIR;
  fs::path work = "acceptance_runs";
  fs::path config_path, noisy_path;
  bool skip_noisy = false, static_only = false;
  app.add_option("--source", source, "repository root");
  app.add_option("--work", work, "scratch directory for pipeline runs");
  app.add_option("--config", config_path, "desk config (default configs/desk.json)");
  app.add_option("--noisy-config", noisy_path, "high-noise config (default configs/desk_noisy.json)");
  app.add_flag("--skip-noisy", skip_noisy, "skip the high-noise oracle run");
  app.add_flag("--static-only", static_only, "only the criteria that need no training");
  CLI11_PARSE(app, argc, argv);
  std::cout << std::unitbuf;
  if (config_path.empty()) config_path = source / "configs" / "desk.json";
  if (noisy_path.empty()) noisy_path = source / "configs" / "desk_noisy.json";
  work = fs::absolute(work);

  std::map<int, std::pair<std::string, Verdict>> results;
  auto run = [&](int id, const std::string& name, const std::function<Verdict()>& f) {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      v = f();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    v.detail += " [" + fmt("%.1f s", seconds_since(t0)) + "]";
    results[id] = {name, v};
    std::cerr << "[" << id << "] " << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << "\n";
  };

  run(1, "flops reproduction", flops_reproduction);
  run(2, "gradient suite", gradient_suite);
  run(8, "mask and policy exactness", mask_properties);

  auto print_all = [&] {
    int failed = 0;
    for (const auto& [id, r] : results) {
      std::cout << "criterion " << id << " " << (r.second.pass ? "PASS" : "FAIL") << "  " << r.first << ": "
                << r.second.detail << "\n";
      failed += !r.second.pass;
    }
    return failed;
  };
  if (static_only) return print_all() == 0 ? 0 : 1;

  const ExperimentConfig base = load_experiment_config(config_path);
  const ExperimentConfig a = with_out(base, work / "runA"), b = with_out(base, work / "runB");
  double seconds_a = 0.0;
  bool have_a = false;
  try {
    fs::remove_all(a.out);
    fs::remove_all(b.out);
    auto t0 = std::chrono::steady_clock::now();
    pipeline::run_all(a, std::cerr);
    seconds_a = seconds_since(t0);
    have_a = true;
    pipeline::run_all(b, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "pipeline error: " << e.what() << "\n";
  }
  auto need_a = [&](const std::function<Verdict()>& f) {
    return [&, f]() -> Verdict {
      if (!have_a) return {false, "desk pipeline did not complete"};
      return f();
    };
  };

  run(3, "oracle occlusion", need_a([&] { return occlusion(a); }));
  run(4, "pareto concentration", need_a([&] { return pareto(a); }));
  run(6, "selector quality", need_a([&] { return selector_quality(a, source); }));
  run(7, "adaptive budget", need_a([&] { return adaptive(a); }));
  run(9, "end-to-end determinism", need_a([&] { return determinism(a.out, b.out, seconds_a); }));
  run(5, "oracle label mode", need_a([&] { return label_mode(a, work); }));

  std::string noisy = "skipped";
  if (!skip_noisy) {
    try {
      noisy = noisy_oracle(noisy_path, work);
    } catch (const std::exception& e) {
      noisy = std::string("error: ") + e.what();
    }
  }

  const int failed = print_all();
  std::cout << "note: high-noise oracle vs full: " << noisy << "\n";
  std::cout << (9 - failed) << "/9 criteria pass\n";
  return failed == 0 ? 0 : 1;
}
