#include "lite/budget.hpp"

#include <cmath>
#include <sstream>

#include "lite/errors.hpp"
#include "lite/json_util.hpp"

namespace lite {

namespace {

constexpr double kRatioTolerance = 1e-9;

std::string ratio_str(double r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

}  // namespace

void BudgetPolicy::validate(const std::string& path) const {
  if (!(tau1 >= 0.0 && tau1 < tau2 && tau2 <= 1.0))
    throw ConfigError(path, "thresholds must satisfy 0 <= tau1 < tau2 <= 1 (got " + ratio_str(tau1) +
                                ", " + ratio_str(tau2) + ")");
  for (std::size_t i = 0; i < reduced.size(); ++i) {
    const auto [base, easy] = reduced[i];
    const std::string p = json_util::join(path, "reduced[" + std::to_string(i) + "]");
    if (!(base > 0.0 && base <= 1.0)) throw ConfigError(p, "base ratio must be in (0, 1]");
    if (!(easy > 0.0 && easy <= base)) throw ConfigError(p, "reduced ratio must be in (0, base]");
  }
}

double BudgetPolicy::reduced_for(double base) const {
  for (const auto& [b, easy] : reduced)
    if (std::abs(b - base) < kRatioTolerance) return easy;
  throw ConfigError("budget.reduced", "no reduced ratio for base ratio " + ratio_str(base));
}

void to_json(nlohmann::json& j, const BudgetPolicy& p) {
  nlohmann::json map = nlohmann::json::array();
  for (const auto& [base, easy] : p.reduced) map.push_back({{"base", base}, {"reduced", easy}});
  j = {{"tau1", p.tau1}, {"tau2", p.tau2}, {"reduced", map}};
}

BudgetPolicy budget_policy_from_json(const nlohmann::json& j, const std::string& path) {
  json_util::require_object(j, path);
  json_util::check_keys(j, path, {"tau1", "tau2", "reduced"});
  BudgetPolicy p;
  json_util::read_double(j, "tau1", path, p.tau1);
  json_util::read_double(j, "tau2", path, p.tau2);
  if (j.contains("reduced")) {
    const std::string rp = json_util::join(path, "reduced");
    const auto& arr = j.at("reduced");
    if (!arr.is_array()) throw ConfigError(rp, "expected an array");
    p.reduced.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string ep = rp + "[" + std::to_string(i) + "]";
      json_util::require_object(arr[i], ep);
      json_util::check_keys(arr[i], ep, {"base", "reduced"});
      if (!arr[i].contains("base") || !arr[i].contains("reduced"))
        throw ConfigError(ep, "expected both 'base' and 'reduced'");
      double base = 0.0, easy = 0.0;
      json_util::read_double(arr[i], "base", ep, base);
      json_util::read_double(arr[i], "reduced", ep, easy);
      p.reduced.emplace_back(base, easy);
    }
  }
  p.validate(path);
  return p;
}

double adaptive_budget(double confidence, double base_rho, const BudgetPolicy& policy) {
  if (!(confidence >= 0.0 && confidence <= 1.0))
    throw ContractError("confidence " + ratio_str(confidence) + " outside [0, 1]");
  if (!(base_rho > 0.0 && base_rho <= 1.0))
    throw ContractError("P-Ratio " + ratio_str(base_rho) + " outside (0, 1]");
  if (confidence > policy.tau2) return policy.reduced_for(base_rho);
  return base_rho;
}

}  // namespace lite
