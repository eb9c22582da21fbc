#include "lite/scores.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "lite/errors.hpp"

namespace lite {

namespace {

constexpr std::array<std::pair<ScoreSource, std::string_view>, 6> kNames = {{
    {ScoreSource::oracle_true, "oracle-true"},
    {ScoreSource::oracle_pred, "oracle-pred"},
    {ScoreSource::selector, "selector"},
    {ScoreSource::attention, "attention"},
    {ScoreSource::motion, "motion"},
    {ScoreSource::random, "random"},
}};

}  // namespace

std::string_view to_string(ScoreSource s) {
  for (const auto& [src, name] : kNames)
    if (src == s) return name;
  return "unknown";
}

std::optional<ScoreSource> parse_score_source(std::string_view name) {
  for (const auto& [src, n] : kNames)
    if (n == name) return src;
  return std::nullopt;
}

TokenScores normalize_scores(std::vector<double> raw, ScoreSource source) {
  if (raw.empty()) throw ContractError("normalize_scores: no tokens");
  for (double v : raw)
    if (std::isnan(v)) throw NumericError("normalize_scores: NaN score");
  const auto [lo_it, hi_it] = std::minmax_element(raw.begin(), raw.end());
  const double lo = *lo_it, hi = *hi_it;
  TokenScores s;
  s.source = source;
  if (!(hi > lo)) {
    s.values.assign(raw.size(), 0.5);
    s.degenerate = true;
    return s;
  }
  const double range = hi - lo;
  s.values = std::move(raw);
  for (double& v : s.values) v = (v - lo) / range;
  return s;
}

}  // namespace lite
