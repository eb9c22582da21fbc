#include <cmath>

#include "doctest.h"
#include "lite/stats.hpp"

using namespace lite;

TEST_CASE("ranks with ties") {
  CHECK(stats::ranks(std::vector<double>{3, 1, 2}) == std::vector<double>{3, 1, 2});
  CHECK(stats::ranks(std::vector<double>{5, 5, 1, 5}) == std::vector<double>{3, 3, 1, 3});
}

TEST_CASE("correlations") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> y{1, 4, 9, 16, 25};
  CHECK(stats::spearman(x, y) == doctest::Approx(1.0));
  std::vector<double> neg(y.rbegin(), y.rend());
  CHECK(stats::spearman(x, neg) == doctest::Approx(-1.0));
  CHECK(stats::spearman(x, std::vector<double>(5, 2.0)) == 0.0);
  // Hand-computed: d = ranks differ by (0, 1, -1, 0, 0) -> 1 - 6*2/(5*24) = 0.9.
  CHECK(stats::spearman(x, std::vector<double>{1, 3, 2, 4, 5}) == doctest::Approx(0.9));
  CHECK(stats::pearson(x, std::vector<double>{2, 4, 6, 8, 10}) == doctest::Approx(1.0));
}

TEST_CASE("concentration") {
  CHECK(stats::gini(std::vector<double>{1, 1, 1, 1}) == doctest::Approx(0.0));
  CHECK(stats::gini(std::vector<double>{0, 0, 0, 1}) == doctest::Approx(0.75));
  CHECK(stats::gini(std::vector<double>{0, 0, 0}) == 0.0);
  CHECK(stats::top_share(std::vector<double>{5, 1, 1, 1, 1, 1, 0, 0, 0, 0}, 0.2) == doctest::Approx(0.6));
  CHECK(stats::top_share(std::vector<double>(10, 1.0), 0.2) == doctest::Approx(0.2));
  CHECK(stats::skewness(std::vector<double>{0, 0, 0, 0, 10}) > 0.0);
  CHECK(stats::skewness(std::vector<double>{1, 1, 1}) == 0.0);
}
