#include "lite/json_util.hpp"

#include <algorithm>
#include <cmath>

#include "lite/errors.hpp"

namespace lite::json_util {

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
}

void check_keys(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
  require_object(j, path);
  for (const auto& [key, _] : j.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError(join(path, key), "unknown key");
}

void read_size(const json& j, std::string_view key, const std::string& path, std::size_t& out,
               bool allow_zero) {
  auto it = j.find(key);
  if (it == j.end()) return;
  if (!it->is_number_integer() || it->get<std::int64_t>() < (allow_zero ? 0 : 1))
    throw ConfigError(join(path, key),
                      allow_zero ? "expected a non-negative integer" : "expected a positive integer");
  out = it->get<std::size_t>();
}

void read_u64(const json& j, std::string_view key, const std::string& path, std::uint64_t& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  if (!it->is_number_integer() || it->get<std::int64_t>() < 0)
    throw ConfigError(join(path, key), "expected a non-negative integer");
  out = it->get<std::uint64_t>();
}

void read_double(const json& j, std::string_view key, const std::string& path, double& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  if (!it->is_number() || !std::isfinite(it->get<double>()))
    throw ConfigError(join(path, key), "expected a finite number");
  out = it->get<double>();
}

void read_bool(const json& j, std::string_view key, const std::string& path, bool& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  if (!it->is_boolean()) throw ConfigError(join(path, key), "expected true or false");
  out = it->get<bool>();
}

void read_string(const json& j, std::string_view key, const std::string& path, std::string& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  if (!it->is_string()) throw ConfigError(join(path, key), "expected a string");
  out = it->get<std::string>();
}

}  // namespace lite::json_util
