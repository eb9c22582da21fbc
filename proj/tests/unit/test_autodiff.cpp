#include <cmath>

#include "doctest.h"
#include "gradcheck.hpp"
#include "lite/ops.hpp"

using namespace lite;
using ad::Tensor;
using testing::check_gradients;
using testing::random_tensor;
using testing::weighted_sum;

namespace {

constexpr int kInstances = 50;
constexpr double kPrimitiveTol = 1e-4;

std::vector<double> values(const Tensor& t) { return {t.data().begin(), t.data().end()}; }

}  // namespace

TEST_CASE("matmul forward") {
  auto a = Tensor::from({2, 2}, {1, 2, 3, 4});
  auto eye = Tensor::from({2, 2}, {1, 0, 0, 1});
  CHECK(values(ad::matmul(a, eye)) == std::vector<double>{1, 2, 3, 4});
  CHECK(ad::matmul(Tensor::from({1, 1}, {2}), Tensor::from({1, 1}, {3})).item() == 6.0);
}

TEST_CASE("matmul shape error names both shapes") {
  auto a = Tensor::zeros({2, 3});
  auto b = Tensor::zeros({4, 2});
  try {
    ad::matmul(a, b);
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("[2x3]") != std::string::npos);
    CHECK(msg.find("[4x2]") != std::string::npos);
  }
}

TEST_CASE("matmul gradient of sum vs finite differences") {
  Rng rng(7);
  auto r = check_gradients([](const auto& in) { return ad::sum(ad::matmul(in[0], in[1])); },
                           {random_tensor(rng, {3, 4}), random_tensor(rng, {4, 2})});
  CHECK(r.max_rel_error < 1e-6);
}

TEST_CASE("softmax") {
  auto s = ad::softmax(Tensor::from({3}, {0, 0, 0}), 0);
  for (double v : s.data()) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  auto big = ad::softmax(Tensor::from({2}, {1000, 0}), 0);
  CHECK(std::isfinite(big[0]));
  CHECK(big[0] == doctest::Approx(1.0));
  CHECK(big[1] < 1e-300);
  CHECK_THROWS_AS(ad::softmax(Tensor::from({2}, {NAN, 0}), 0), ContractError);
  CHECK_THROWS_AS(ad::softmax(Tensor::zeros({2, 2}), 2), ShapeError);

  Rng rng(11);
  auto r = check_gradients([](const auto& in) { return weighted_sum(ad::softmax(in[0], 0), 3); },
                           {random_tensor(rng, {5}, -2, 2)});
  CHECK(r.max_rel_error < 1e-6);
}

TEST_CASE("softmax rows sum to one along either axis") {
  Rng rng(5);
  for (int inst = 0; inst < kInstances; ++inst) {
    auto x = random_tensor(rng, {4, 6}, -30, 30, false);
    auto rows = ad::softmax(x, 1);
    for (std::size_t i = 0; i < 4; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < 6; ++j) s += rows.at(i, j);
      CHECK(std::abs(s - 1.0) <= 1e-12);
    }
    auto cols = ad::softmax(x, 0);
    for (std::size_t j = 0; j < 6; ++j) {
      double s = 0;
      for (std::size_t i = 0; i < 4; ++i) s += cols.at(i, j);
      CHECK(std::abs(s - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("layernorm") {
  auto one = Tensor::full({3}, 1.0), zero = Tensor::zeros({3});
  auto c = ad::layernorm(Tensor::from({1, 3}, {5, 5, 5}), one, zero, 1e-5);
  for (double v : c.data()) CHECK(v == 0.0);
  auto two = ad::layernorm(Tensor::from({1, 2}, {1, 3}), Tensor::full({2}, 1.0), Tensor::zeros({2}),
                           1e-14);
  CHECK(two[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(two[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(ad::layernorm(Tensor::zeros({1, 2}), one, zero, 1e-5), ShapeError);
  CHECK_THROWS_AS(ad::layernorm(Tensor::zeros({1, 3}), one, zero, 0.0), ContractError);
}

TEST_CASE("activations") {
  CHECK(values(ad::relu(Tensor::from({3}, {-1, 0, 2}))) == std::vector<double>{0, 0, 2});
  CHECK(ad::sigmoid(Tensor::scalar(0.0)).item() == 0.5);
  CHECK(ad::gelu(Tensor::scalar(0.0)).item() == 0.0);
  Rng rng(3);
  auto r = check_gradients([](const auto& in) { return weighted_sum(ad::gelu(in[0]), 1); },
                           {random_tensor(rng, {7}, -3, 3)});
  CHECK(r.max_rel_error < 1e-5);
}

TEST_CASE("backward contract") {
  SUBCASE("y = x^2 at 3") {
    auto x = Tensor::scalar(3.0, true);
    ad::Tape tape;
    ad::TapeScope scope(tape);
    auto y = ad::mul(x, x);
    auto g = tape.backward(y);
    CHECK(g.at(x)[0] == 6.0);
    CHECK(tape.consumed());
    CHECK_THROWS_AS(tape.backward(y), ContractError);
  }
  SUBCASE("sum of relu gives 0/1 gradients") {
    Rng rng(1);
    auto x = random_tensor(rng, {20});
    ad::Tape tape;
    ad::TapeScope scope(tape);
    auto g = tape.backward(ad::sum(ad::relu(x)));
    for (std::size_t i = 0; i < 20; ++i) CHECK(g.at(x)[i] == (x[i] > 0 ? 1.0 : 0.0));
  }
  SUBCASE("non-scalar loss is rejected") {
    auto x = Tensor::zeros({2}, true);
    ad::Tape tape;
    ad::TapeScope scope(tape);
    auto y = ad::scale(x, 2.0);
    CHECK_THROWS_AS(tape.backward(y), ContractError);
  }
  SUBCASE("no tape, no recording") {
    auto x = Tensor::zeros({2}, true);
    auto y = ad::scale(x, 2.0);
    CHECK(!y.requires_grad());
    CHECK(y.is_leaf());
  }
  SUBCASE("interior gradients only when retained") {
    auto x = Tensor::from({2}, {1.0, -2.0}, true);
    ad::Tape tape;
    ad::TapeScope scope(tape);
    auto h = ad::scale(x, 3.0);
    h.retain_grad();
    auto k = ad::scale(h, 2.0);
    auto g = tape.backward(ad::sum(k));
    CHECK(g.contains(h));
    CHECK(!g.contains(k));
    CHECK(g.at(h)[0] == 2.0);
    CHECK(g.at(x)[1] == 6.0);
    CHECK(g.at(x).size() == x.numel());
  }
}

// Every primitive against central differences on kInstances random inputs.
TEST_CASE("primitive gradients on random instances") {
  using Fn = std::function<Tensor(const std::vector<Tensor>&)>;
  struct Case {
    const char* name;
    Fn f;
    std::vector<Shape> shapes;
  };
  const std::vector<Case> cases = {
      {"matmul", [](const auto& in) { return weighted_sum(ad::matmul(in[0], in[1]), 1); },
       {{3, 4}, {4, 5}}},
      {"transpose", [](const auto& in) { return weighted_sum(ad::transpose(in[0]), 2); }, {{3, 2}}},
      {"add", [](const auto& in) { return weighted_sum(ad::add(in[0], in[1]), 3); }, {{2, 3}, {2, 3}}},
      {"sub", [](const auto& in) { return weighted_sum(ad::sub(in[0], in[1]), 4); }, {{2, 3}, {2, 3}}},
      {"mul", [](const auto& in) { return weighted_sum(ad::mul(in[0], in[1]), 5); }, {{2, 3}, {2, 3}}},
      {"scale", [](const auto& in) { return weighted_sum(ad::scale(in[0], -1.7), 6); }, {{4}}},
      {"add_row_bias", [](const auto& in) { return weighted_sum(ad::add_row_bias(in[0], in[1]), 7); },
       {{3, 4}, {4}}},
      {"relu", [](const auto& in) { return weighted_sum(ad::relu(in[0]), 8); }, {{6}}},
      {"gelu", [](const auto& in) { return weighted_sum(ad::gelu(in[0]), 9); }, {{6}}},
      {"sigmoid", [](const auto& in) { return weighted_sum(ad::sigmoid(in[0]), 10); }, {{6}}},
      {"softmax_rows", [](const auto& in) { return weighted_sum(ad::softmax(in[0], 1), 11); }, {{3, 5}}},
      {"softmax_cols", [](const auto& in) { return weighted_sum(ad::softmax(in[0], 0), 12); }, {{3, 5}}},
      {"layernorm",
       [](const auto& in) { return weighted_sum(ad::layernorm(in[0], in[1], in[2], 1e-5), 13); },
       {{3, 6}, {6}, {6}}},
      {"slice_cols", [](const auto& in) { return weighted_sum(ad::slice_cols(in[0], 1, 2), 14); },
       {{3, 4}}},
      {"concat_cols",
       [](const auto& in) {
         std::vector<Tensor> parts{in[0], in[1]};
         return weighted_sum(ad::concat_cols(parts), 15);
       },
       {{3, 2}, {3, 3}}},
      {"gather_rows",
       [](const auto& in) {
         std::vector<std::size_t> rows{2, 0, 2};
         return weighted_sum(ad::gather_rows(in[0], rows), 16);
       },
       {{3, 4}}},
      {"mean_rows", [](const auto& in) { return weighted_sum(ad::mean_rows(in[0]), 17); }, {{4, 3}}},
      {"cross_entropy", [](const auto& in) { return ad::cross_entropy(in[0], 2); }, {{1, 5}}},
      {"bce_with_logits",
       [](const auto& in) {
         std::vector<double> t{0.0, 0.3, 0.9, 1.0};
         return ad::bce_with_logits(in[0], t);
       },
       {{4}}},
  };
  for (const auto& c : cases) {
    CAPTURE(c.name);
    double worst = 0.0;
    for (int inst = 0; inst < kInstances; ++inst) {
      Rng rng(derive_seed(inst, 99));
      std::vector<Tensor> inputs;
      for (const auto& s : c.shapes) inputs.push_back(random_tensor(rng, s, -2.0, 2.0));
      worst = std::max(worst, check_gradients(c.f, inputs).max_rel_error);
    }
    CHECK(worst < kPrimitiveTol);
  }
}

TEST_CASE("composition follows the chain rule") {
  // softmax(layernorm(x) W): the taped gradient of the composition matches the
  // finite-difference gradient of the fused function.
  for (int inst = 0; inst < kInstances; ++inst) {
    Rng rng(derive_seed(inst, 5));
    auto x = random_tensor(rng, {3, 4});
    auto w = random_tensor(rng, {4, 4});
    auto gain = random_tensor(rng, {4}, 0.5, 1.5);
    auto bias = random_tensor(rng, {4});
    auto r = check_gradients(
        [](const auto& in) {
          return weighted_sum(
              ad::softmax(ad::matmul(ad::layernorm(in[0], in[2], in[3], 1e-5), in[1]), 1), 21);
        },
        {x, w, gain, bias});
    CHECK(r.max_rel_error < kPrimitiveTol);
  }
}

TEST_CASE("bce matches its definition on probabilities") {
  Rng rng(2);
  auto x = random_tensor(rng, {8}, -4, 4, false);
  std::vector<double> t(8);
  for (double& v : t) v = rng.uniform();
  double ref = 0.0;
  for (std::size_t i = 0; i < 8; ++i) {
    const double p = ad::sigmoid_value(x[i]);
    ref += -(t[i] * std::log(p) + (1 - t[i]) * std::log(1 - p));
  }
  CHECK(ad::bce_with_logits(x, t).item() == doctest::Approx(ref / 8).epsilon(1e-12));
}
