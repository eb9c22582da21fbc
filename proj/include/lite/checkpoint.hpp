#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"
#include "lite/video_transformer.hpp"

namespace lite {

inline constexpr int kCheckpointFormatVersion = 1;

// On-disk model: `<stem>.json` manifest plus `<stem>.bin` blob of
// little-endian float32 values, parameters concatenated in manifest order.
//
// Manifest fields: format_version, kind ("backbone" | "selector" | "proxy"),
// config (kind-specific object), blob (file name relative to the manifest),
// dtype ("float32-le"), total_bytes, parameters: [{name, shape, offset, count}]
// with byte offsets into the blob.
struct Checkpoint {
  std::string kind;
  nlohmann::json config;
  std::vector<NamedTensor> tensors;
};

void save_checkpoint(const std::filesystem::path& stem, const Checkpoint& checkpoint);
// Throws MissingArtifactError when either file is absent, ShapeError on a corrupt blob.
Checkpoint load_checkpoint(const std::filesystem::path& stem);
// Same, but also rejects a manifest whose kind differs from `expected_kind`.
Checkpoint load_checkpoint(const std::filesystem::path& stem, const std::string& expected_kind);

std::filesystem::path manifest_path(const std::filesystem::path& stem);
std::filesystem::path blob_path(const std::filesystem::path& stem);
bool checkpoint_exists(const std::filesystem::path& stem);

Checkpoint to_checkpoint(const VideoTransformer& model, const std::string& kind);
VideoTransformer transformer_from_checkpoint(const Checkpoint& checkpoint);

}  // namespace lite
