#include "lite/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "lite/binary_io.hpp"
#include "lite/errors.hpp"
#include "lite/json_util.hpp"
#include "lite/rng.hpp"

namespace lite {

namespace fs = std::filesystem;

namespace {

// Chiral "F" on a 5x5 cell grid, rows top to bottom.
constexpr std::array<const char*, 5> kGlyph = {"####.", "#....", "###..", "#....", "#...."};
constexpr int kSupersample = 3;
constexpr double kMinScale = 0.5;

bool glyph_cell(double u, double v) {
  if (u < 0.0 || u >= 1.0 || v < 0.0 || v >= 1.0) return false;
  return kGlyph[static_cast<int>(v * 5.0)][static_cast<int>(u * 5.0)] == '#';
}

struct Pose {
  double cx, cy, scale, angle;
};

struct Square {
  double x0, y0, vx, vy;
  std::array<float, 3> color;
};

double half_diagonal(double side) { return side * std::numbers::sqrt2 / 2.0; }

// Start coordinate so that start + [0, delta] stays inside [margin, extent - margin].
double place(Rng& rng, double extent, double margin, double delta) {
  const double lo = margin - std::min(0.0, delta);
  const double hi = extent - margin - std::max(0.0, delta);
  return rng.uniform(lo, hi);
}

std::array<float, 3> random_color(Rng& rng, double lo, double hi) {
  return {static_cast<float>(rng.uniform(lo, hi)), static_cast<float>(rng.uniform(lo, hi)),
          static_cast<float>(rng.uniform(lo, hi))};
}

}  // namespace

void DatasetSpec::validate(const std::string& path) const {
  using json_util::join;
  if (classes < 1 || classes > kMotionClasses.size())
    throw ConfigError(join(path, "classes"), "must be between 1 and " + std::to_string(kMotionClasses.size()));
  if (clips_per_class < 3) throw ConfigError(join(path, "clips_per_class"), "need at least 3 clips per class");
  if (frames < 2) throw ConfigError(join(path, "frames"), "need at least 2 frames");
  if (frames % tube_t || height % tube_h || width % tube_w)
    throw ConfigError(join(path, "tube"), "tube does not tile the clip");
  if (!(glyph_size > 0.0)) throw ConfigError(join(path, "glyph_size"), "must be positive");
  if (noise < 0.0) throw ConfigError(join(path, "noise"), "must be non-negative");
  const double span = 2.0 * half_diagonal(glyph_size);
  const double extent = static_cast<double>(std::min(height, width));
  if (span > extent)
    throw ConfigError(join(path, "glyph_size"),
                      "glyph of size " + std::to_string(glyph_size) + " does not fit a " +
                          std::to_string(height) + "x" + std::to_string(width) + " frame");
  if (span + travel > extent)
    throw ConfigError(join(path, "travel"), "glyph cannot travel " + std::to_string(travel) +
                                                " pixels and stay in frame");
  const double dspan = distractor_size + distractor_speed * static_cast<double>(frames - 1);
  if (distractors > 0 && (distractor_size <= 0.0 || dspan > extent))
    throw ConfigError(join(path, "distractor_size"), "distractors cannot stay in frame");
}

void to_json(nlohmann::json& j, const DatasetSpec& s) {
  j = nlohmann::json{{"classes", s.classes},
                     {"clips_per_class", s.clips_per_class},
                     {"frames", s.frames},
                     {"height", s.height},
                     {"width", s.width},
                     {"tube", {s.tube_t, s.tube_h, s.tube_w}},
                     {"glyph_size", s.glyph_size},
                     {"travel", s.travel},
                     {"noise", s.noise},
                     {"distractors", s.distractors},
                     {"distractor_size", s.distractor_size},
                     {"distractor_speed", s.distractor_speed},
                     {"seed", s.seed}};
}

DatasetSpec dataset_spec_from_json(const nlohmann::json& j, const std::string& path) {
  using namespace json_util;
  check_keys(j, path,
             {"classes", "clips_per_class", "frames", "height", "width", "tube", "glyph_size",
              "travel", "noise", "distractors", "distractor_size", "distractor_speed", "seed"});
  DatasetSpec s;
  read_size(j, "classes", path, s.classes);
  read_size(j, "clips_per_class", path, s.clips_per_class);
  read_size(j, "frames", path, s.frames);
  read_size(j, "height", path, s.height);
  read_size(j, "width", path, s.width);
  if (auto it = j.find("tube"); it != j.end()) {
    if (!it->is_array() || it->size() != 3) throw ConfigError(join(path, "tube"), "expected [t, h, w]");
    for (std::size_t i = 0; i < 3; ++i)
      if (!(*it)[i].is_number_integer() || (*it)[i].get<std::int64_t>() < 1)
        throw ConfigError(join(path, "tube") + "[" + std::to_string(i) + "]", "expected a positive integer");
    s.tube_t = (*it)[0].get<std::size_t>();
    s.tube_h = (*it)[1].get<std::size_t>();
    s.tube_w = (*it)[2].get<std::size_t>();
  }
  read_double(j, "glyph_size", path, s.glyph_size);
  read_double(j, "travel", path, s.travel);
  read_double(j, "noise", path, s.noise);
  read_size(j, "distractors", path, s.distractors, true);
  read_double(j, "distractor_size", path, s.distractor_size);
  read_double(j, "distractor_speed", path, s.distractor_speed);
  read_u64(j, "seed", path, s.seed);
  s.validate(path);
  return s;
}

VideoClip render_clip(const DatasetSpec& spec, std::size_t label, std::uint32_t id) {
  if (label >= spec.classes) throw ContractError("label outside the dataset's classes");
  Rng rng(derive_seed(spec.seed, 0xc11b, id));
  const std::size_t T = spec.frames, H = spec.height, W = spec.width;
  const double last = static_cast<double>(T - 1);
  const std::string_view motion = kMotionClasses[label];

  const auto background = random_color(rng, 0.15, 0.45);
  const auto glyph_color = random_color(rng, 0.6, 1.0);
  const double angle0 = rng.uniform(0.0, 2.0 * std::numbers::pi);

  double dx = 0.0, dy = 0.0, s0 = 1.0, s1 = 1.0, spin = 0.0;
  if (motion == "translate-left") dx = -spec.travel;
  if (motion == "translate-right") dx = spec.travel;
  if (motion == "translate-up") dy = -spec.travel;
  if (motion == "translate-down") dy = spec.travel;
  if (motion == "grow") s0 = kMinScale;
  if (motion == "shrink") s1 = kMinScale;
  if (motion == "rotate-cw") spin = std::numbers::pi / 2.0;
  if (motion == "rotate-ccw") spin = -std::numbers::pi / 2.0;
  const double margin = half_diagonal(spec.glyph_size * std::max(s0, s1));
  const double cx0 = place(rng, static_cast<double>(W), margin, dx);
  const double cy0 = place(rng, static_cast<double>(H), margin, dy);

  std::vector<Square> squares(spec.distractors);
  for (auto& sq : squares) {
    const double dir = rng.uniform(0.0, 2.0 * std::numbers::pi);
    sq.vx = spec.distractor_speed * std::cos(dir);
    sq.vy = spec.distractor_speed * std::sin(dir);
    const double hs = spec.distractor_size / 2.0;
    sq.x0 = place(rng, static_cast<double>(W), hs, sq.vx * last);
    sq.y0 = place(rng, static_cast<double>(H), hs, sq.vy * last);
    sq.color = random_color(rng, 0.5, 1.0);
  }

  VideoClip clip;
  clip.id = id;
  clip.label = label;
  clip.frames = T;
  clip.height = H;
  clip.width = W;
  clip.pixels.resize(T * H * W * 3);
  const TokenGrid grid(T / spec.tube_t, H / spec.tube_h, W / spec.tube_w);
  std::vector<bool> glyph_token(grid.size(), false);
  const double sub = 1.0 / kSupersample;

  for (std::size_t t = 0; t < T; ++t) {
    const double a = static_cast<double>(t) / last;
    const Pose pose{cx0 + dx * a, cy0 + dy * a, s0 + (s1 - s0) * a, angle0 + spin * a};
    const double side = spec.glyph_size * pose.scale;
    const double ca = std::cos(pose.angle), sa = std::sin(pose.angle);
    for (std::size_t y = 0; y < H; ++y)
      for (std::size_t x = 0; x < W; ++x) {
        std::array<float, 3> px = background;
        for (const auto& sq : squares) {
          const double qx = sq.x0 + sq.vx * static_cast<double>(t);
          const double qy = sq.y0 + sq.vy * static_cast<double>(t);
          const double hs = spec.distractor_size / 2.0;
          int hits = 0;
          for (int sy = 0; sy < kSupersample; ++sy)
            for (int sx = 0; sx < kSupersample; ++sx) {
              const double px_x = static_cast<double>(x) + (sx + 0.5) * sub;
              const double px_y = static_cast<double>(y) + (sy + 0.5) * sub;
              hits += std::abs(px_x - qx) < hs && std::abs(px_y - qy) < hs;
            }
          const float cover = static_cast<float>(hits) / (kSupersample * kSupersample);
          for (int c = 0; c < 3; ++c) px[c] = (1.0f - cover) * px[c] + cover * sq.color[c];
        }
        int hits = 0;
        for (int sy = 0; sy < kSupersample; ++sy)
          for (int sx = 0; sx < kSupersample; ++sx) {
            const double rx = static_cast<double>(x) + (sx + 0.5) * sub - pose.cx;
            const double ry = static_cast<double>(y) + (sy + 0.5) * sub - pose.cy;
            // Inverse rotation into glyph-local coordinates.
            const double u = (ca * rx + sa * ry) / side + 0.5;
            const double v = (-sa * rx + ca * ry) / side + 0.5;
            hits += glyph_cell(u, v);
          }
        if (hits > 0) {
          const float cover = static_cast<float>(hits) / (kSupersample * kSupersample);
          for (int c = 0; c < 3; ++c) px[c] = (1.0f - cover) * px[c] + cover * glyph_color[c];
          glyph_token[grid.index({t / spec.tube_t, y / spec.tube_h, x / spec.tube_w})] = true;
        }
        for (int c = 0; c < 3; ++c) {
          const double noisy = px[c] + spec.noise * rng.normal();
          clip.pixels[clip.offset(t, y, x, c)] = static_cast<float>(std::clamp(noisy, 0.0, 1.0));
        }
      }
  }
  for (std::size_t i = 0; i < glyph_token.size(); ++i)
    if (glyph_token[i]) clip.glyph_tokens.push_back(i);
  return clip;
}

std::array<std::size_t, 3> split_counts(std::size_t n) {
  const auto val = static_cast<std::size_t>(std::lround(0.15 * static_cast<double>(n)));
  const std::size_t test = val;
  return {n - val - test, val, test};
}

Dataset generate_dataset(const DatasetSpec& spec) {
  spec.validate();
  Dataset d;
  d.spec = spec;
  const auto [n_train, n_val, n_test] = split_counts(spec.clips_per_class);
  // Ids are class-major so every clip is reproducible on its own.
  for (std::size_t c = 0; c < spec.classes; ++c)
    for (std::size_t i = 0; i < spec.clips_per_class; ++i) {
      const auto id = static_cast<std::uint32_t>(c * spec.clips_per_class + i);
      auto& split = i < n_train ? d.train : i < n_train + n_val ? d.val : d.test;
      split.push_back(render_clip(spec, c, id));
    }
  (void)n_test;
  return d;
}

namespace {

void save_split(const std::vector<VideoClip>& clips, const fs::path& dir, std::string_view name) {
  std::ofstream bin(dir / (std::string(name) + ".bin"), std::ios::binary | std::ios::trunc);
  nlohmann::json items = nlohmann::json::array();
  std::size_t offset = 0;
  for (const auto& c : clips) {
    items.push_back({{"id", c.id},
                     {"label", c.label},
                     {"class", kMotionClasses[c.label]},
                     {"offset", offset},
                     {"glyph_tokens", c.glyph_tokens}});
    binary_io::write_f32s(bin, c.pixels);
    offset += c.pixels.size() * sizeof(float);
  }
  if (!bin) throw std::runtime_error("failed writing split " + std::string(name));
  const auto& first = clips.front();
  nlohmann::json side{{"format_version", 1},
                      {"dtype", "float32-le"},
                      {"layout", "clip x frame x row x column x channel"},
                      {"shape", {first.frames, first.height, first.width, 3}},
                      {"clips", std::move(items)}};
  std::ofstream(dir / (std::string(name) + ".json")) << side.dump(1) << '\n';
}

}  // namespace

void save_dataset(const Dataset& data, const fs::path& dir) {
  fs::create_directories(dir);
  nlohmann::json classes = nlohmann::json::array();
  for (std::size_t c = 0; c < data.spec.classes; ++c) classes.push_back(kMotionClasses[c]);
  nlohmann::json meta{{"format_version", 1},
                      {"spec", data.spec},
                      {"class_names", classes},
                      {"splits", {{"train", data.train.size()}, {"val", data.val.size()}, {"test", data.test.size()}}}};
  std::ofstream(dir / "dataset.json") << meta.dump(2) << '\n';
  save_split(data.train, dir, "train");
  save_split(data.val, dir, "val");
  save_split(data.test, dir, "test");
}

std::vector<VideoClip> load_split(const fs::path& dir, std::string_view split) {
  const fs::path side_path = dir / (std::string(split) + ".json");
  const fs::path bin_path = dir / (std::string(split) + ".bin");
  if (!fs::exists(side_path) || !fs::exists(bin_path))
    throw MissingArtifactError("missing dataset split '" + std::string(split) + "' under " +
                               dir.string() + " (run gen-data)");
  const auto side = nlohmann::json::parse(std::ifstream(side_path));
  const auto shape = side.at("shape").get<std::vector<std::size_t>>();
  std::ifstream bin(bin_path, std::ios::binary);
  std::vector<VideoClip> clips;
  for (const auto& item : side.at("clips")) {
    VideoClip c;
    c.id = item.at("id").get<std::uint32_t>();
    c.label = item.at("label").get<std::size_t>();
    c.frames = shape[0];
    c.height = shape[1];
    c.width = shape[2];
    c.glyph_tokens = item.at("glyph_tokens").get<std::vector<std::size_t>>();
    c.pixels.resize(c.frames * c.height * c.width * 3);
    bin.seekg(static_cast<std::streamoff>(item.at("offset").get<std::size_t>()));
    if (!binary_io::read_f32s(bin, c.pixels))
      throw ShapeError("truncated clip data in " + bin_path.string());
    clips.push_back(std::move(c));
  }
  return clips;
}

Dataset load_dataset(const fs::path& dir) {
  if (!fs::exists(dir / "dataset.json"))
    throw MissingArtifactError("missing dataset at " + dir.string() + " (run gen-data)");
  const auto meta = nlohmann::json::parse(std::ifstream(dir / "dataset.json"));
  Dataset d;
  d.spec = dataset_spec_from_json(meta.at("spec"), "dataset.json.spec");
  d.train = load_split(dir, "train");
  d.val = load_split(dir, "val");
  d.test = load_split(dir, "test");
  return d;
}

}  // namespace lite
