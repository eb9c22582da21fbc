#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lite {

// Where a score vector came from; also the stable CLI policy names.
enum class ScoreSource { oracle_true, oracle_pred, selector, attention, motion, random };

std::string_view to_string(ScoreSource s);
std::optional<ScoreSource> parse_score_source(std::string_view name);

// Per-token scores in [0, 1].
struct TokenScores {
  std::vector<double> values;
  ScoreSource source = ScoreSource::random;
  // Raw scores were all equal; values are uniformly 0.5.
  bool degenerate = false;
};

// Min-max normalization. When max == min every score becomes 0.5 and the
// result is flagged degenerate. Throws ContractError on empty or NaN input.
TokenScores normalize_scores(std::vector<double> raw, ScoreSource source);

}  // namespace lite
