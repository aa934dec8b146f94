#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace spenra {

/// Lowercase hex SHA-256 of a byte string.
[[nodiscard]] std::string sha256_hex(std::string_view bytes);
/// SHA-256 of a file's contents. Throws IoError if it cannot be read.
[[nodiscard]] std::string file_sha256(const std::filesystem::path& path);

/// Reproducibility record written next to every CLI output.
struct RunManifest {
    std::vector<std::string> command_line;
    std::vector<std::pair<std::string, std::string>> config;
    std::uint64_t seed = 0;
    std::string version;
    std::optional<std::string> input_path;
    std::optional<std::string> input_sha256;
    double wall_seconds = 0.0;

    [[nodiscard]] std::string to_json() const;
};

/// Writes the manifest as JSON. Throws IoError on failure.
void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

}  // namespace spenra
