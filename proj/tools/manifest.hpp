#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace srr::cli {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kDigestAlgorithm = "sha256";

// Lower-case hex SHA-256 of the file's bytes.
std::string file_digest(const std::filesystem::path& path);

// Pretty-printed with a trailing newline; stable key order.
void write_manifest(const std::filesystem::path& path, const nlohmann::json& manifest);

}  // namespace srr::cli
