#include "lite/model_config.hpp"

#include "lite/errors.hpp"
#include "lite/json_util.hpp"

namespace lite {

void ModelConfig::validate(const std::string& path) const {
  auto positive = [&](std::size_t v, const char* key) {
    if (v == 0) throw ConfigError(json_util::join(path, key), "must be positive");
  };
  positive(frames, "frames");
  positive(height, "height");
  positive(width, "width");
  positive(tube_t, "tube");
  positive(tube_h, "tube");
  positive(tube_w, "tube");
  positive(embed_dim, "embed_dim");
  positive(heads, "heads");
  positive(blocks, "blocks");
  positive(classes, "classes");
  positive(mlp_ratio, "mlp_ratio");
  if (frames % tube_t || height % tube_h || width % tube_w)
    throw ConfigError(json_util::join(path, "tube"),
                      "tube " + std::to_string(tube_t) + "x" + std::to_string(tube_h) + "x" +
                          std::to_string(tube_w) + " does not tile a " + std::to_string(frames) +
                          "x" + std::to_string(height) + "x" + std::to_string(width) + " clip");
  if (embed_dim % heads)
    throw ConfigError(json_util::join(path, "heads"),
                      std::to_string(heads) + " heads do not divide embed_dim " +
                          std::to_string(embed_dim));
  if (!(layernorm_eps > 0.0)) throw ConfigError(json_util::join(path, "layernorm_eps"), "must be positive");
  if (!(pixel_std > 0.0)) throw ConfigError(json_util::join(path, "pixel_std"), "must be positive");
}

std::string_view to_string(TapPoint p) {
  switch (p) {
    case TapPoint::mlp_out: return "mlp_out";
    case TapPoint::block_out: return "block_out";
    case TapPoint::mlp_hidden: return "mlp_hidden";
    case TapPoint::block_in: return "block_in";
  }
  return "?";
}

ModelConfig ModelConfig::desk() { return ModelConfig{}; }

ModelConfig ModelConfig::full_scale() {
  ModelConfig c;
  c.frames = 16;
  c.height = c.width = 224;
  c.tube_t = 2;
  c.tube_h = c.tube_w = 16;
  c.embed_dim = 768;
  c.heads = 12;
  c.blocks = 12;
  c.classes = 174;
  c.mlp_ratio = 4;
  return c;
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = nlohmann::json{{"frames", c.frames},       {"height", c.height},
                     {"width", c.width},         {"tube", {c.tube_t, c.tube_h, c.tube_w}},
                     {"embed_dim", c.embed_dim}, {"heads", c.heads},
                     {"blocks", c.blocks},       {"classes", c.classes},
                     {"mlp_ratio", c.mlp_ratio}, {"layernorm_eps", c.layernorm_eps},
       {"pixel_mean", c.pixel_mean}, {"pixel_std", c.pixel_std}};
}

ModelConfig model_config_from_json(const nlohmann::json& j, const std::string& path) {
  using namespace json_util;
  check_keys(j, path,
             {"frames", "height", "width", "tube", "embed_dim", "heads", "blocks", "classes",
              "mlp_ratio", "layernorm_eps", "pixel_mean", "pixel_std"});
  ModelConfig c;
  read_size(j, "frames", path, c.frames);
  read_size(j, "height", path, c.height);
  read_size(j, "width", path, c.width);
  if (auto it = j.find("tube"); it != j.end()) {
    if (!it->is_array() || it->size() != 3)
      throw ConfigError(join(path, "tube"), "expected [t, h, w]");
    for (std::size_t i = 0; i < 3; ++i)
      if (!(*it)[i].is_number_integer() || (*it)[i].get<std::int64_t>() < 1)
        throw ConfigError(join(path, "tube") + "[" + std::to_string(i) + "]",
                          "expected a positive integer");
    c.tube_t = (*it)[0].get<std::size_t>();
    c.tube_h = (*it)[1].get<std::size_t>();
    c.tube_w = (*it)[2].get<std::size_t>();
  }
  read_size(j, "embed_dim", path, c.embed_dim);
  read_size(j, "heads", path, c.heads);
  read_size(j, "blocks", path, c.blocks);
  read_size(j, "classes", path, c.classes);
  read_size(j, "mlp_ratio", path, c.mlp_ratio);
  read_double(j, "layernorm_eps", path, c.layernorm_eps);
  read_double(j, "pixel_mean", path, c.pixel_mean);
  read_double(j, "pixel_std", path, c.pixel_std);
  c.validate(path);
  return c;
}

}  // namespace lite
