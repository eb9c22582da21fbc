#pragma once

#include <span>
#include <vector>

namespace lite::stats {

// Average ranks (1-based), ties share the mean of their positions.
std::vector<double> ranks(std::span<const double> x);
double pearson(std::span<const double> x, std::span<const double> y);
// Pearson correlation of average ranks. 0 when either input is constant.
double spearman(std::span<const double> x, std::span<const double> y);
// Gini coefficient of non-negative values (0 for all-equal or all-zero).
double gini(std::span<const double> x);
// Fraction of the total held by the largest ceil(fraction * n) values.
double top_share(std::span<const double> x, double fraction);
// Fisher-Pearson sample skewness (0 for constant input).
double skewness(std::span<const double> x);

}  // namespace lite::stats
