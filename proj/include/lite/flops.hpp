#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "nlohmann/json.hpp"
#include "lite/budget.hpp"
#include "lite/model_config.hpp"

// Analytical operation counts for the video transformer as a function of the
// number of retained tokens. Counts are exact integers.
//
// Matrix products are counted in multiply-adds scaled by `flops_per_mac`.
// Elementwise work uses fixed per-element constants:
//   LayerNorm 5, GELU 8, softmax 3 + 1 for the logit scale, bias/residual add 1.
namespace lite::flops {

struct Convention {
  std::uint64_t flops_per_mac = 1;
  bool elementwise = true;
};

inline constexpr std::uint64_t kLayerNorm = 5;
inline constexpr std::uint64_t kGelu = 8;
inline constexpr std::uint64_t kSoftmax = 4;

struct BlockFlops {
  std::uint64_t attention_linear = 0;     // qkv + output projection
  std::uint64_t attention_quadratic = 0;  // QK^T and PV
  std::uint64_t mlp = 0;
  std::uint64_t elementwise = 0;
  std::uint64_t total() const { return attention_linear + attention_quadratic + mlp + elementwise; }
};

BlockFlops block_flops(std::uint64_t n, std::uint64_t d, std::uint64_t heads, std::uint64_t mlp_ratio,
                       const Convention& conv = {});

struct SelectorShape {
  std::size_t hidden1 = 0, hidden2 = 0;
};

// Per-token MLP D -> h1 -> h2 -> 1 over all n tokens, in multiply-adds x flops_per_mac.
std::uint64_t selector_flops(std::uint64_t n, std::uint64_t d, const SelectorShape& shape,
                             const Convention& conv = {});

struct ProxyShape {
  ModelConfig model;           // operates on the downsampled clip
  std::size_t downsample = 1;  // spatial factor
};

// Full-token proxy forward plus the box-filter downsampling of the input clip.
std::uint64_t proxy_flops(const ProxyShape& proxy, const Convention& conv = {});

struct Report {
  std::size_t n_total = 0, n_kept = 0;
  double p_ratio = 1.0;
  std::uint64_t patch_embedding = 0;
  std::uint64_t attention_linear = 0;
  std::uint64_t attention_quadratic = 0;
  std::uint64_t mlp = 0;
  std::uint64_t elementwise = 0;
  std::uint64_t head = 0;
  std::uint64_t selector = 0;
  std::uint64_t proxy = 0;
  std::uint64_t total = 0;
  ModelConfig config;

  double gflops() const { return static_cast<double>(total) * 1e-9; }
};

void to_json(nlohmann::json& j, const Report& r);

// Blocks run on ceil(rho N) tokens; the patch embedding always covers all N.
Report model_flops(const ModelConfig& config, double rho, const Convention& conv = {},
                   const std::optional<SelectorShape>& selector = std::nullopt,
                   const std::optional<ProxyShape>& proxy = std::nullopt);

struct AdaptiveReport {
  double base_rho = 1.0;
  std::size_t clips = 0;
  std::size_t easy_clips = 0;
  double base_gflops = 0.0;      // fixed budget, selector included
  double mean_gflops = 0.0;      // adaptive budget, selector and proxy included
  double gross_gflops = 0.0;     // adaptive budget without the proxy
  double reduction_pct = 0.0;    // 100 (1 - mean / base)
  double gross_reduction_pct = 0.0;
};

void to_json(nlohmann::json& j, const AdaptiveReport& r);

// Dataset mean of per-clip cost when each clip runs at adaptive_budget(c_i, base_rho).
AdaptiveReport expected_adaptive_flops(const ModelConfig& config, std::span<const double> confidences,
                                       double base_rho, const BudgetPolicy& policy,
                                       const Convention& conv = {},
                                       const std::optional<SelectorShape>& selector = std::nullopt,
                                       const std::optional<ProxyShape>& proxy = std::nullopt);

}  // namespace lite::flops
