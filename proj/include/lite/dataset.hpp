#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "nlohmann/json.hpp"
#include "lite/clip.hpp"

namespace lite {

// Motion patterns, one per class, in label order.
inline constexpr std::array<std::string_view, 8> kMotionClasses = {
    "translate-left", "translate-right", "translate-up", "translate-down",
    "grow",           "shrink",          "rotate-cw",    "rotate-ccw"};

// Synthetic moving-glyph clips. Each clip shows one chiral glyph performing
// the class motion over a noisy flat background, plus distractor squares
// drifting in random directions.
struct DatasetSpec {
  std::size_t classes = 8;
  std::size_t clips_per_class = 170;
  std::size_t frames = 8;
  std::size_t height = 32;
  std::size_t width = 32;
  // Tube layout used to compute each clip's ground-truth glyph tokens.
  std::size_t tube_t = 4, tube_h = 8, tube_w = 8;
  double glyph_size = 10.0;     // side of the glyph at scale 1, pixels
  double travel = 12.0;         // translation distance over the clip, pixels
  double noise = 0.08;          // std of i.i.d. Gaussian pixel noise
  std::size_t distractors = 2;
  double distractor_size = 4.0;
  double distractor_speed = 1.5;  // pixels per frame
  std::uint64_t seed = 0;

  // Throws ConfigError for impossible geometry or unsupported class counts.
  void validate(const std::string& path = "dataset") const;
};

void to_json(nlohmann::json& j, const DatasetSpec& s);
DatasetSpec dataset_spec_from_json(const nlohmann::json& j, const std::string& path);

struct Dataset {
  DatasetSpec spec;
  std::vector<VideoClip> train, val, test;
};

// Deterministic in (spec, seed); each split is stratified 70/15/15 per class.
Dataset generate_dataset(const DatasetSpec& spec);
// A single clip of class `label`; used by generate_dataset and tests.
VideoClip render_clip(const DatasetSpec& spec, std::size_t label, std::uint32_t id);

// Split sizes per class for n clips: {train, val, test}.
std::array<std::size_t, 3> split_counts(std::size_t clips_per_class);

// Layout under `dir`: dataset.json (spec + class names), and per split
// `<split>.bin` (clips as float32-le, T x H x W x 3 each, concatenated) with a
// `<split>.json` sidecar listing id, label, byte offset and glyph tokens.
void save_dataset(const Dataset& data, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);
std::vector<VideoClip> load_split(const std::filesystem::path& dir, std::string_view split);

}  // namespace lite
