// Serial reference vs OpenMP kernels, plus batched desk-model inference.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"
#include "lite/kernels.hpp"
#include "lite/model_config.hpp"
#include "lite/rng.hpp"
#include "lite/sweep.hpp"
#include "lite/video_transformer.hpp"

namespace {

template <class F>
double best_ms(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    best = std::min(best, ms);
  }
  return best;
}

std::vector<double> random_vec(lite::Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lite kernel benchmark"};
  int reps = 5;
  int threads = 0;
  std::size_t clips = 64;
  app.add_option("--reps", reps, "repetitions per measurement (best is reported)")->check(CLI::PositiveNumber);
  app.add_option("--threads", threads, "OpenMP threads (0 keeps the runtime default)");
  app.add_option("--clips", clips, "clips in the batched inference run")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);
  if (threads > 0) omp_set_num_threads(threads);

  std::printf("threads %d\n\n", lite::kernels::max_threads());
  std::printf("%-22s %12s %12s %8s\n", "matmul m x k x n", "serial ms", "openmp ms", "speedup");
  lite::Rng rng(1);
  for (std::size_t s : {64, 128, 256, 512}) {
    const std::size_t m = s, k = s, n = s;
    const auto a = random_vec(rng, m * k), b = random_vec(rng, k * n);
    std::vector<double> c(m * n);
    const double ser = best_ms(reps, [&] { lite::kernels::serial::matmul(a, b, c, m, k, n); });
    const double par = best_ms(reps, [&] { lite::kernels::matmul(a, b, c, m, k, n); });
    const std::string label = std::to_string(m) + " x " + std::to_string(k) + " x " + std::to_string(n);
    std::printf("%-22s %12.3f %12.3f %8.2f\n", label.c_str(), ser, par, ser / par);
  }

  const auto cfg = lite::ModelConfig::desk();
  lite::VideoTransformer model(cfg, 7);
  std::vector<lite::VideoClip> batch(clips);
  for (std::size_t i = 0; i < clips; ++i) {
    auto& c = batch[i];
    c.id = static_cast<std::uint32_t>(i);
    c.frames = cfg.frames;
    c.height = cfg.height;
    c.width = cfg.width;
    c.label = i % cfg.classes;
    c.pixels.resize(cfg.frames * cfg.height * cfg.width * 3);
    for (float& p : c.pixels) p = static_cast<float>(rng.uniform());
  }
  const std::vector<lite::SelectionMask> full(clips, lite::SelectionMask::all(cfg.num_tokens()));
  const double ms = best_ms(reps, [&] { (void)lite::evaluate_masks(model, batch, full); });
  std::printf("\ndesk forward, %zu clips: %.1f ms (%.3f ms per clip)\n", clips, ms, ms / clips);
  return 0;
}
