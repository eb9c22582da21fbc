#include <vector>

#include "doctest.h"
#include "lite/budget.hpp"
#include "lite/errors.hpp"
#include "lite/flops.hpp"

using namespace lite;

namespace {

// Counts from an independent closed-form script over the same constants.
struct Frozen {
  double rho;
  std::size_t n_kept;
  std::uint64_t total;
  double reference_gflops;
};

constexpr Frozen kFullScale[] = {
    {1.0, 1568, 182530386606ULL, 181},
    {0.9, 1412, 160367823534ULL, 159},
    {0.7, 1098, 118563762606ULL, 118},
    {0.5, 784, 80507927214ULL, 80},
    {0.3, 471, 46303627758ULL, 46},
};

flops::ProxyShape desk_proxy() {
  ModelConfig m = ModelConfig::desk();
  m.height = m.width = 8;
  m.tube_h = m.tube_w = 4;
  m.embed_dim = 32;
  m.heads = 2;
  m.blocks = 2;
  return {m, 4};
}

}  // namespace

TEST_CASE("full-scale totals") {
  const auto config = ModelConfig::full_scale();
  for (const auto& f : kFullScale) {
    CAPTURE(f.rho);
    const auto r = flops::model_flops(config, f.rho);
    CHECK(r.n_kept == f.n_kept);
    CHECK(r.total == f.total);
    CHECK(std::abs(r.gflops() - f.reference_gflops) / f.reference_gflops < 0.05);
  }
}

TEST_CASE("components sum to the total") {
  const auto r = flops::model_flops(ModelConfig::full_scale(), 0.5, {}, flops::SelectorShape{384, 384},
                                    desk_proxy());
  CHECK(r.total == r.patch_embedding + r.attention_linear + r.attention_quadratic + r.mlp +
                       r.elementwise + r.head + r.selector + r.proxy);
}

TEST_CASE("unit block by hand") {
  // N = D = heads = mlp_ratio = 1: 4 + 2 + 2 multiply-adds; elementwise
  // LN 10, softmax 4, GELU 8, biases 6, residual 2.
  const auto b = flops::block_flops(1, 1, 1, 1);
  CHECK(b.attention_linear == 4);
  CHECK(b.attention_quadratic == 2);
  CHECK(b.mlp == 2);
  CHECK(b.elementwise == 30);
  CHECK(flops::block_flops(1, 1, 1, 1, {2, false}).total() == 16);

  ModelConfig one;
  one.frames = one.height = one.width = 1;
  one.tube_t = one.tube_h = one.tube_w = 1;
  one.embed_dim = one.heads = one.blocks = one.classes = one.mlp_ratio = 1;
  // patch 3 + 2, block 38, head 1 + 1 + 1.
  CHECK(flops::model_flops(one, 1.0).total == 46);
  CHECK_THROWS_AS(flops::block_flops(0, 1, 1, 1), ContractError);
}

TEST_CASE("desk totals") {
  CHECK(flops::model_flops(ModelConfig::desk(), 1.0).total == 8894984ULL);
  CHECK(flops::model_flops(ModelConfig::desk(), 0.5).total == 5088776ULL);
}

TEST_CASE("monotone in rho and patch embedding is rho independent") {
  const auto config = ModelConfig::full_scale();
  const auto full = flops::model_flops(config, 1.0);
  std::uint64_t prev = 0;
  for (double rho : {0.05, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
    const auto r = flops::model_flops(config, rho);
    CHECK(r.total > prev);
    CHECK(r.patch_embedding == full.patch_embedding);
    prev = r.total;
  }
  CHECK(flops::model_flops(config, 1.0, {}, std::nullopt).total == full.total);
}

TEST_CASE("selector cost") {
  CHECK(flops::selector_flops(1568, 768, {384, 384}, {2}) == 1388470272ULL);
  CHECK(flops::selector_flops(1568, 768, {384, 384}) == 694235136ULL);
  CHECK(flops::selector_flops(1, 768, {384, 384}) == 768 * 384 + 384 * 384 + 384);
  const auto reference = flops::model_flops(ModelConfig::full_scale(), 1.0);
  CHECK(static_cast<double>(flops::selector_flops(1568, 768, {384, 384})) / reference.total < 0.02);
  const auto desk = flops::model_flops(ModelConfig::desk(), 1.0);
  CHECK(static_cast<double>(flops::selector_flops(32, 64, {32, 32})) / desk.total < 0.02);
}

TEST_CASE("proxy cost is small at desk scale") {
  const auto p = desk_proxy();
  CHECK(flops::proxy_flops(p) == 307720ULL);
  CHECK(static_cast<double>(flops::proxy_flops(p)) / flops::model_flops(ModelConfig::desk(), 1.0).total <
        0.05);
}

TEST_CASE("budget mapping") {
  const BudgetPolicy p;
  CHECK(adaptive_budget(0.7, 0.5, p) == 0.3);
  CHECK(adaptive_budget(0.6, 0.3, p) == 0.2);
  CHECK(adaptive_budget(0.3, 0.5, p) == 0.5);
  CHECK(adaptive_budget(0.05, 0.9, p) == 0.9);
  CHECK(adaptive_budget(0.5, 0.9, p) == 0.9);  // tau2 itself is not easy
  CHECK(adaptive_budget(0.51, 0.9, p) == 0.3);
  CHECK(adaptive_budget(1.0, 0.7, p) == 0.3);
  CHECK_THROWS_AS(adaptive_budget(0.9, 0.6, p), ConfigError);
  CHECK(adaptive_budget(0.4, 0.6, p) == 0.6);
  CHECK_THROWS_AS(adaptive_budget(1.5, 0.5, p), ContractError);
  for (double c = 0.0; c <= 1.0; c += 0.01)
    for (const auto& [base, easy] : p.reduced) CHECK(adaptive_budget(c, base, p) <= base);
}

TEST_CASE("budget config") {
  CHECK_THROWS_AS(budget_policy_from_json({{"tau1", 0.6}, {"tau2", 0.5}}, "config.budget"), ConfigError);
  CHECK_THROWS_AS(
      budget_policy_from_json({{"reduced", {{{"base", 0.5}, {"reduced", 0.7}}}}}, "config.budget"),
      ConfigError);
  try {
    budget_policy_from_json({{"tau", 0.1}}, "config.budget");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()) == "config.budget.tau: unknown key");
  }
  nlohmann::json j = BudgetPolicy{};
  const auto back = budget_policy_from_json(j, "budget");
  CHECK(back.reduced == BudgetPolicy{}.reduced);
  CHECK(back.tau1 == 0.1);
}

TEST_CASE("expected adaptive flops") {
  const auto config = ModelConfig::full_scale();
  const BudgetPolicy p;
  SUBCASE("all easy at 0.9 bills every clip at 0.3") {
    std::vector<double> c(10, 0.9);
    const auto r = flops::expected_adaptive_flops(config, c, 0.9, p);
    CHECK(r.easy_clips == 10);
    CHECK(r.mean_gflops == doctest::Approx(flops::model_flops(config, 0.3).gflops()));
  }
  SUBCASE("no easy clip gives zero reduction") {
    std::vector<double> c{0.0, 0.2, 0.5};
    const auto r = flops::expected_adaptive_flops(config, c, 0.9, p);
    CHECK(r.reduction_pct == 0.0);
    CHECK(r.easy_clips == 0);
  }
  SUBCASE("mixed") {
    std::vector<double> c{0.9, 0.2};
    const auto r = flops::expected_adaptive_flops(config, c, 0.5, p);
    const double expect = 0.5 * (flops::model_flops(config, 0.3).gflops() + flops::model_flops(config, 0.5).gflops());
    CHECK(r.mean_gflops == doctest::Approx(expect));
    CHECK(r.reduction_pct > 0.0);
  }
  SUBCASE("proxy cost is charged to every clip") {
    std::vector<double> c{0.2};
    const auto r = flops::expected_adaptive_flops(ModelConfig::desk(), c, 0.9, p, {}, std::nullopt, desk_proxy());
    CHECK(r.reduction_pct < 0.0);
    CHECK(r.gross_reduction_pct == 0.0);
  }
}
