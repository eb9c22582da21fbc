#include "lite/flops.hpp"

#include <string>

#include "lite/errors.hpp"
#include "lite/token_grid.hpp"

namespace lite::flops {

BlockFlops block_flops(std::uint64_t n, std::uint64_t d, std::uint64_t heads, std::uint64_t mlp_ratio,
                       const Convention& conv) {
  if (n == 0) throw ContractError("block_flops: n must be >= 1");
  const std::uint64_t f = conv.flops_per_mac;
  const std::uint64_t hidden = mlp_ratio * d;
  BlockFlops b;
  b.attention_linear = f * 4 * n * d * d;
  b.attention_quadratic = f * 2 * n * n * d;
  b.mlp = f * 2 * n * d * hidden;
  if (conv.elementwise) {
    const std::uint64_t norms = 2 * kLayerNorm * n * d;
    const std::uint64_t softmax = kSoftmax * heads * n * n;
    const std::uint64_t gelu = kGelu * n * hidden;
    const std::uint64_t biases = n * (3 * d + d + hidden + d);
    const std::uint64_t residual = 2 * n * d;
    b.elementwise = norms + softmax + gelu + biases + residual;
  }
  return b;
}

std::uint64_t selector_flops(std::uint64_t n, std::uint64_t d, const SelectorShape& s,
                             const Convention& conv) {
  return conv.flops_per_mac * n * (d * s.hidden1 + s.hidden1 * s.hidden2 + s.hidden2);
}

std::uint64_t proxy_flops(const ProxyShape& proxy, const Convention& conv) {
  const ModelConfig& m = proxy.model;
  const std::uint64_t input_pixels =
      static_cast<std::uint64_t>(m.frames) * m.height * proxy.downsample * m.width * proxy.downsample * 3;
  const std::uint64_t resample = proxy.downsample > 1 ? input_pixels : 0;
  return model_flops(m, 1.0, conv).total + resample;
}

Report model_flops(const ModelConfig& config, double rho, const Convention& conv,
                   const std::optional<SelectorShape>& selector,
                   const std::optional<ProxyShape>& proxy) {
  config.validate();
  Report r;
  r.config = config;
  r.p_ratio = rho;
  r.n_total = config.num_tokens();
  r.n_kept = tokens_for_ratio(rho, r.n_total);
  const std::uint64_t n_all = r.n_total, n = r.n_kept, d = config.embed_dim;
  const std::uint64_t f = conv.flops_per_mac;

  r.patch_embedding = f * n_all * config.patch_dim() * d;
  if (conv.elementwise) r.patch_embedding += 2 * n_all * d;

  const BlockFlops b = block_flops(n, d, config.heads, config.mlp_ratio, conv);
  r.attention_linear = config.blocks * b.attention_linear;
  r.attention_quadratic = config.blocks * b.attention_quadratic;
  r.mlp = config.blocks * b.mlp;
  r.elementwise = config.blocks * b.elementwise;

  r.head = f * d * config.classes;
  if (conv.elementwise) r.head += n * d + config.classes;

  if (selector) r.selector = selector_flops(n_all, d, *selector, conv);
  if (proxy) r.proxy = proxy_flops(*proxy, conv);

  r.total = r.patch_embedding + r.attention_linear + r.attention_quadratic + r.mlp + r.elementwise +
            r.head + r.selector + r.proxy;
  return r;
}

void to_json(nlohmann::json& j, const Report& r) {
  j = {{"n_total", r.n_total},
       {"n_kept", r.n_kept},
       {"p_ratio", r.p_ratio},
       {"components",
        {{"patch_embedding", r.patch_embedding},
         {"attention_linear", r.attention_linear},
         {"attention_quadratic", r.attention_quadratic},
         {"mlp", r.mlp},
         {"elementwise", r.elementwise},
         {"head", r.head},
         {"selector", r.selector},
         {"proxy", r.proxy}}},
       {"total", r.total},
       {"gflops", r.gflops()},
       {"config", r.config}};
}

AdaptiveReport expected_adaptive_flops(const ModelConfig& config, std::span<const double> confidences,
                                       double base_rho, const BudgetPolicy& policy,
                                       const Convention& conv,
                                       const std::optional<SelectorShape>& selector,
                                       const std::optional<ProxyShape>& proxy) {
  AdaptiveReport r;
  r.base_rho = base_rho;
  r.clips = confidences.size();
  const double base = static_cast<double>(model_flops(config, base_rho, conv, selector).total);
  r.base_gflops = base * 1e-9;
  if (confidences.empty()) {
    r.mean_gflops = r.gross_gflops = r.base_gflops;
    return r;
  }
  const double proxy_cost = proxy ? static_cast<double>(proxy_flops(*proxy, conv)) : 0.0;
  double gross = 0.0;
  for (double c : confidences) {
    const double rho = adaptive_budget(c, base_rho, policy);
    if (rho < base_rho) ++r.easy_clips;
    gross += static_cast<double>(model_flops(config, rho, conv, selector).total);
  }
  gross /= static_cast<double>(confidences.size());
  r.gross_gflops = gross * 1e-9;
  r.mean_gflops = (gross + proxy_cost) * 1e-9;
  r.gross_reduction_pct = 100.0 * (1.0 - gross / base);
  r.reduction_pct = 100.0 * (1.0 - (gross + proxy_cost) / base);
  return r;
}

void to_json(nlohmann::json& j, const AdaptiveReport& r) {
  j = {{"base_rho", r.base_rho},
       {"clips", r.clips},
       {"easy_clips", r.easy_clips},
       {"base_gflops", r.base_gflops},
       {"mean_gflops", r.mean_gflops},
       {"gross_gflops", r.gross_gflops},
       {"reduction_pct", r.reduction_pct},
       {"gross_reduction_pct", r.gross_reduction_pct}};
}

}  // namespace lite::flops
