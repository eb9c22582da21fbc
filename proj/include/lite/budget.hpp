#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nlohmann/json.hpp"

namespace lite {

// Confidence-dependent token budget. Clips whose proxy confidence exceeds
// tau2 run at the reduced ratio mapped from their base ratio; every other
// clip keeps the base ratio.
struct BudgetPolicy {
  double tau1 = 0.1;
  double tau2 = 0.5;
  // (base rho, easy-case rho) pairs.
  std::vector<std::pair<double, double>> reduced = {{0.9, 0.3}, {0.7, 0.3}, {0.5, 0.3}, {0.3, 0.2}};

  // Throws ConfigError unless 0 <= tau1 < tau2 <= 1 and every reduced rho is in (0, base].
  void validate(const std::string& path = "budget") const;
  // Easy-case ratio for `base`; throws ConfigError when the map has no entry.
  double reduced_for(double base) const;
};

void to_json(nlohmann::json& j, const BudgetPolicy& p);
BudgetPolicy budget_policy_from_json(const nlohmann::json& j, const std::string& path);

// Ratio used for a clip with confidence `confidence` (in [0, 1]).
double adaptive_budget(double confidence, double base_rho, const BudgetPolicy& policy);

}  // namespace lite
