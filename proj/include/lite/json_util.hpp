#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

#include "nlohmann/json.hpp"

// Validated readers for the JSON config. Errors name the full JSON path,
// e.g. "config.backbone.heads: expected a positive integer".
namespace lite::json_util {

using nlohmann::json;

std::string join(const std::string& path, std::string_view key);

void require_object(const json& j, const std::string& path);
// Rejects keys not in `allowed`.
void check_keys(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed);

void read_size(const json& j, std::string_view key, const std::string& path, std::size_t& out,
               bool allow_zero = false);
void read_u64(const json& j, std::string_view key, const std::string& path, std::uint64_t& out);
void read_double(const json& j, std::string_view key, const std::string& path, double& out);
void read_bool(const json& j, std::string_view key, const std::string& path, bool& out);
void read_string(const json& j, std::string_view key, const std::string& path, std::string& out);

}  // namespace lite::json_util
