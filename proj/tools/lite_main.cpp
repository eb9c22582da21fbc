#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "lite/errors.hpp"
#include "lite/experiment_config.hpp"
#include "lite/flops.hpp"
#include "lite/pipeline.hpp"

namespace {

constexpr int kUserError = 1;
constexpr int kInternalError = 2;

void print_table(const lite::flops::Report& r) {
  const std::pair<const char*, std::uint64_t> rows[] = {
      {"patch_embedding", r.patch_embedding}, {"attention_linear", r.attention_linear},
      {"attention_quadratic", r.attention_quadratic}, {"mlp", r.mlp},
      {"elementwise", r.elementwise}, {"head", r.head},
      {"selector", r.selector}, {"proxy", r.proxy},
  };
  std::printf("tokens %llu of %llu (p_ratio %.4g)\n", static_cast<unsigned long long>(r.n_kept),
              static_cast<unsigned long long>(r.n_total), r.p_ratio);
  for (const auto& [name, v] : rows)
    std::printf("  %-20s %16llu  %6.2f%%\n", name, static_cast<unsigned long long>(v),
                r.total ? 100.0 * static_cast<double>(v) / static_cast<double>(r.total) : 0.0);
  std::printf("  %-20s %16llu  (%.3f GFLOPs)\n", "total", static_cast<unsigned long long>(r.total), r.gflops());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Token selection experiments for video transformers"};
  std::cout << std::unitbuf;
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  app.add_option("--config", config_path, "experiment config (JSON)")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "global seed; overrides the config");
  app.add_option("--out", out, "run directory; overrides the config");

  using Stage = void (*)(const lite::ExperimentConfig&, std::ostream&);
  const std::pair<const char*, Stage> stages[] = {
      {"gen-data", lite::pipeline::gen_data},
      {"train-backbone", lite::pipeline::train_backbone},
      {"compute-oracle", lite::pipeline::compute_oracle},
      {"train-selector", lite::pipeline::train_selector},
      {"train-proxy", lite::pipeline::train_proxy},
      {"sweep", lite::pipeline::sweep},
      {"report", lite::pipeline::report},
      {"all", lite::pipeline::run_all},
  };
  const char* help[] = {"generate the synthetic dataset",
                        "train the video transformer",
                        "dump gradient-based token scores for every split",
                        "train the token selector on the oracle scores",
                        "train the confidence proxy for the adaptive budget",
                        "evaluate every (policy, p_ratio, seed) cell on the test split",
                        "write histogram, decay and summary reports",
                        "run every stage in order"};
  std::vector<std::pair<CLI::App*, Stage>> commands;
  for (std::size_t i = 0; i < std::size(stages); ++i)
    commands.emplace_back(app.add_subcommand(stages[i].first, help[i]), stages[i].second);

  double p_ratio = 1.0;
  bool table = false, with_selector = false;
  auto* flops_cmd = app.add_subcommand("flops", "print the analytical FLOPs report of the backbone");
  flops_cmd->add_option("--p-ratio", p_ratio, "kept token fraction")->check(CLI::Range(0.0, 1.0));
  flops_cmd->add_flag("--table", table, "print a component table instead of JSON");
  flops_cmd->add_flag("--with-selector", with_selector, "include the token selector");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kUserError;
  }

  try {
    if (flops_cmd->parsed()) {
      // Only the model sections are read, so a full-scale backbone needs no dataset.
      const nlohmann::json j = config_path.empty() ? nlohmann::json::object() : lite::read_json_file(config_path);
      if (!j.is_object()) throw lite::ConfigError("config", "expected an object");
      const auto backbone = lite::model_config_from_json(j.value("backbone", nlohmann::json::object()), "config.backbone");
      backbone.validate("config.backbone");
      const auto conv = lite::convention_from_json(j.value("flops", nlohmann::json::object()), "config.flops");
      if (p_ratio <= 0.0) throw lite::ConfigError("--p-ratio", "must be in (0, 1]");
      std::optional<lite::flops::SelectorShape> sel;
      if (with_selector) {
        nlohmann::json s = j.value("selector", nlohmann::json::object());
        if (s.is_object() && !s.contains("embed_dim")) s["embed_dim"] = backbone.embed_dim;
        sel = lite::selector_config_from_json(s, "config.selector").shape();
      }
      const auto r = lite::flops::model_flops(backbone, p_ratio, conv, sel);
      if (table) {
        print_table(r);
      } else {
        nlohmann::json out_json;
        to_json(out_json, r);
        std::cout << out_json.dump(2) << "\n";
      }
      return 0;
    }

    lite::ExperimentConfig config =
        config_path.empty() ? lite::experiment_config_from_json(nlohmann::json::object())
                            : lite::load_experiment_config(config_path);
    if (seed) {
      config.seed = *seed;
      config.dataset.seed = *seed;
    }
    if (!out.empty()) config.out = out;
    config.validate();

    for (const auto& [cmd, stage] : commands)
      if (cmd->parsed()) stage(config, std::cout);
    return 0;
  } catch (const lite::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUserError;
  } catch (const lite::MissingArtifactError& e) {
    std::cerr << "missing artifact: " << e.what() << "\n";
    return kUserError;
  } catch (const lite::DivergenceError& e) {
    std::cerr << "training diverged: " << e.what() << "\n";
    return kUserError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
}
