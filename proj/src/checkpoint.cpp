#include "lite/checkpoint.hpp"

#include <fstream>

#include "lite/binary_io.hpp"
#include "lite/errors.hpp"

namespace lite {

namespace fs = std::filesystem;

fs::path manifest_path(const fs::path& stem) { return fs::path(stem.string() + ".json"); }
fs::path blob_path(const fs::path& stem) { return fs::path(stem.string() + ".bin"); }

bool checkpoint_exists(const fs::path& stem) {
  return fs::exists(manifest_path(stem)) && fs::exists(blob_path(stem));
}

void save_checkpoint(const fs::path& stem, const Checkpoint& checkpoint) {
  if (stem.has_parent_path()) fs::create_directories(stem.parent_path());
  nlohmann::json params = nlohmann::json::array();
  std::size_t offset = 0;
  std::ofstream blob(blob_path(stem), std::ios::binary | std::ios::trunc);
  if (!blob) throw std::runtime_error("cannot write " + blob_path(stem).string());
  for (const auto& [name, tensor] : checkpoint.tensors) {
    params.push_back({{"name", name}, {"shape", tensor.shape()}, {"offset", offset},
                      {"count", tensor.numel()}});
    std::vector<float> values(tensor.data().begin(), tensor.data().end());
    binary_io::write_f32s(blob, values);
    offset += values.size() * sizeof(float);
  }
  if (!blob) throw std::runtime_error("write failed for " + blob_path(stem).string());
  nlohmann::json manifest{{"format_version", kCheckpointFormatVersion},
                          {"kind", checkpoint.kind},
                          {"config", checkpoint.config},
                          {"blob", blob_path(stem).filename().string()},
                          {"dtype", "float32-le"},
                          {"total_bytes", offset},
                          {"parameters", std::move(params)}};
  std::ofstream(manifest_path(stem)) << manifest.dump(2) << '\n';
}

Checkpoint load_checkpoint(const fs::path& stem) {
  if (!fs::exists(manifest_path(stem)))
    throw MissingArtifactError("missing checkpoint manifest " + manifest_path(stem).string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(std::ifstream(manifest_path(stem)));
  } catch (const nlohmann::json::exception& e) {
    throw ShapeError("corrupt checkpoint manifest " + manifest_path(stem).string() + ": " + e.what());
  }
  if (manifest.value("format_version", 0) != kCheckpointFormatVersion)
    throw ShapeError("unsupported checkpoint format_version in " + manifest_path(stem).string());
  const fs::path blob_file = manifest_path(stem).parent_path() / manifest.at("blob").get<std::string>();
  std::ifstream blob(blob_file, std::ios::binary);
  if (!blob) throw MissingArtifactError("missing checkpoint blob " + blob_file.string());
  if (fs::file_size(blob_file) != manifest.at("total_bytes").get<std::size_t>())
    throw ShapeError("checkpoint blob " + blob_file.string() + " size disagrees with manifest");

  Checkpoint cp;
  cp.kind = manifest.at("kind").get<std::string>();
  cp.config = manifest.at("config");
  for (const auto& p : manifest.at("parameters")) {
    Shape shape = p.at("shape").get<Shape>();
    const std::size_t count = p.at("count").get<std::size_t>();
    if (shape_numel(shape) != count) throw ShapeError("parameter count/shape mismatch in manifest");
    std::vector<float> raw(count);
    blob.seekg(static_cast<std::streamoff>(p.at("offset").get<std::size_t>()));
    if (!binary_io::read_f32s(blob, raw))
      throw ShapeError("truncated checkpoint blob " + blob_file.string());
    cp.tensors.push_back({p.at("name").get<std::string>(),
                          ad::Tensor::from(std::move(shape), std::vector<double>(raw.begin(), raw.end()))});
  }
  return cp;
}

Checkpoint load_checkpoint(const fs::path& stem, const std::string& expected_kind) {
  Checkpoint cp = load_checkpoint(stem);
  if (cp.kind != expected_kind)
    throw ConfigError("checkpoint " + manifest_path(stem).string() + " has kind '" + cp.kind +
                      "', expected '" + expected_kind + "'");
  return cp;
}

Checkpoint to_checkpoint(const VideoTransformer& model, const std::string& kind) {
  Checkpoint cp;
  cp.kind = kind;
  cp.config = {{"model", model.config()}};
  cp.tensors = model.parameters();
  return cp;
}

VideoTransformer transformer_from_checkpoint(const Checkpoint& checkpoint) {
  const ModelConfig config = model_config_from_json(checkpoint.config.at("model"), "checkpoint.config.model");
  return VideoTransformer::from_parameters(config, checkpoint.tensors);
}

}  // namespace lite
