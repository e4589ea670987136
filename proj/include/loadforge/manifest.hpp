#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include <json.hpp>

namespace loadforge {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr int kFormatVersion = 1;

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

/// Provenance record written next to every output: tool version, a hash of the
/// effective configuration, the seeds used and a checksum per emitted file.
struct Manifest {
    std::string command;
    std::string config_hash;
    std::map<std::string, std::uint64_t> seeds;
    std::map<std::string, std::string> files;  // path relative to the manifest -> sha256
    nlohmann::ordered_json details = nlohmann::ordered_json::object();

    /// Records `path` (relative to `root`) with the checksum of its current contents.
    void add_file(const std::filesystem::path& root, const std::filesystem::path& relative);

    nlohmann::ordered_json to_json() const;
    static Manifest from_json(const nlohmann::ordered_json& j);
    void write(const std::filesystem::path& path) const;
    static Manifest load(const std::filesystem::path& path);
    /// Recomputes every checksum under `root`; returns the first mismatching path or "".
    std::string verify(const std::filesystem::path& root) const;
};

}  // namespace loadforge
