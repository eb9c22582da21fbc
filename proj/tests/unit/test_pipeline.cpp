#include "doctest.h"

#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "lite/errors.hpp"
#include "lite/pipeline.hpp"
#include "lite/sweep.hpp"

using namespace lite;
namespace fs = std::filesystem;

namespace {

ExperimentConfig smoke(const fs::path& out) {
  auto c = load_experiment_config(std::string(LITE_SOURCE_DIR) + "/configs/smoke.json");
  c.out = out;
  return c;
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream is(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

const char* kOutputs[] = {"results/sweep.csv",       "results/per_class.csv",  "results/adaptive.csv",
                          "results/confidence.csv",  "logs/backbone.csv",      "logs/selector.csv",
                          "logs/proxy.csv",          "oracle/test-oracle-true.csv",
                          "reports/histogram.csv",   "reports/decay.csv",      "reports/summary.csv"};

// Two complete smoke runs shared by the test cases below, in file order.
struct SmokeRuns {
  testing::TempDir a{"pipe-a"}, b{"pipe-b"};
  SmokeRuns() {
    std::ostringstream log;
    pipeline::run_all(smoke(a.path()), log);
    pipeline::run_all(smoke(b.path()), log);
  }
};

const SmokeRuns& runs() {
  static const SmokeRuns r;
  return r;
}

}  // namespace

TEST_CASE("identical config and seed give identical outputs") {
  const auto& a = runs().a;
  const auto& b = runs().b;
  {
    for (const char* f : kOutputs) {
      INFO(f);
      REQUIRE(fs::exists(a.path() / f));
      CHECK(testing::slurp(a.path() / f) == testing::slurp(b.path() / f));
    }
  }

}

TEST_CASE("one row per cell with consistent values") {
  const auto& a = runs().a;
  {
    const auto c = smoke(a.path());
    const auto rows = read_sweep_csv(a.path() / "results/sweep.csv");
    CHECK(rows.size() == c.sweep.policies.size() * c.sweep.p_ratios.size() * c.sweep.seeds.size());
    double full = -1.0;
    for (const auto& r : rows) {
      CHECK(r.top1 <= r.top5);
      CHECK(r.n_clips == 8);
      if (r.p_ratio == 1.0) {
        if (full < 0) full = r.top1;
        CHECK(r.top1 == full);
      }
    }
    const auto per_class = read_class_csv(a.path() / "results/per_class.csv");
    CHECK(per_class.size() == rows.size() * c.backbone.classes);
  }

}

TEST_CASE("sweep resumes from the rows on disk") {
  const auto& a = runs().a;
  {
    const fs::path csv = a.path() / "results/sweep.csv";
    const std::string before = testing::slurp(csv);
    auto kept = lines(csv);
    kept.erase(kept.begin() + 7);
    {
      std::ofstream os(csv);
      for (const auto& l : kept) os << l << "\n";
    }
    std::ostringstream resumed;
    pipeline::sweep(smoke(a.path()), resumed);
    CHECK(resumed.str().find("1 cells computed") != std::string::npos);
    CHECK(testing::slurp(csv) == before);
  }

}

TEST_CASE("changing the grid keeps matching cells") {
  const auto& a = runs().a;
  {
    auto c = smoke(a.path());
    c.sweep.policies = {ScoreSource::random, ScoreSource::selector};
    c.sweep.p_ratios = {0.3, 0.5, 1.0};
    c.sweep.seeds = {0, 1, 2, 3, 4};
    std::ostringstream out;
    pipeline::sweep(c, out);
    CHECK(read_sweep_csv(a.path() / "results/sweep.csv").size() == 30);
    CHECK(out.str().find("18 cells computed, 12 reused") != std::string::npos);
  }
}

TEST_CASE("stages name missing artifacts") {
  testing::TempDir dir("pipe-missing");
  const auto c = smoke(dir.path());
  std::ostringstream log;
  CHECK_THROWS_WITH_AS(pipeline::train_backbone(c, log), doctest::Contains("train"), MissingArtifactError);
  pipeline::gen_data(c, log);
  CHECK_THROWS_WITH_AS(pipeline::sweep(c, log), doctest::Contains("backbone"), MissingArtifactError);
  CHECK_THROWS_WITH_AS(pipeline::compute_oracle(c, log), doctest::Contains("backbone"), MissingArtifactError);
  pipeline::train_backbone(c, log);
  CHECK_THROWS_WITH_AS(pipeline::train_selector(c, log), doctest::Contains("oracle"), MissingArtifactError);
  pipeline::compute_oracle(c, log);
  CHECK_THROWS_WITH_AS(pipeline::sweep(c, log), doctest::Contains("selector"), MissingArtifactError);
  CHECK_THROWS_WITH_AS(pipeline::report(c, log), doctest::Contains("sweep"), MissingArtifactError);
}
