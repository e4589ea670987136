#include "loadforge/manifest.hpp"

#include <array>
#include <cstdio>
#include <memory>

#include <openssl/evp.h>

#include "loadforge/errors.hpp"
#include "loadforge/io.hpp"

namespace loadforge {

std::string sha256_hex(std::string_view data) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
        throw Error("sha256: digest computation failed");
    }
    std::string hex;
    hex.reserve(2 * len);
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(io::read_file(path)); }

void Manifest::add_file(const std::filesystem::path& root, const std::filesystem::path& relative) {
    files[relative.generic_string()] = sha256_file(root / relative);
}

nlohmann::ordered_json Manifest::to_json() const {
    nlohmann::ordered_json j;
    j["tool"] = "loadforge";
    j["tool_version"] = std::string(kToolVersion);
    j["format_version"] = kFormatVersion;
    j["command"] = command;
    j["config_hash"] = config_hash;
    j["seeds"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : seeds) j["seeds"][k] = v;
    j["files"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : files) j["files"][k] = v;
    j["details"] = details;
    return j;
}

Manifest Manifest::from_json(const nlohmann::ordered_json& j) {
    Manifest m;
    m.command = j.value("command", "");
    m.config_hash = j.value("config_hash", "");
    if (j.contains("seeds")) {
        for (const auto& [k, v] : j["seeds"].items()) m.seeds[k] = v.get<std::uint64_t>();
    }
    if (j.contains("files")) {
        for (const auto& [k, v] : j["files"].items()) m.files[k] = v.get<std::string>();
    }
    if (j.contains("details")) m.details = j["details"];
    return m;
}

void Manifest::write(const std::filesystem::path& path) const {
    io::write_file(path, to_json().dump(2) + "\n");
}

Manifest Manifest::load(const std::filesystem::path& path) {
    try {
        return from_json(nlohmann::ordered_json::parse(io::read_file(path)));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput("manifest '" + path.string() + "': " + e.what());
    }
}

std::string Manifest::verify(const std::filesystem::path& root) const {
    for (const auto& [rel, sum] : files) {
        if (!std::filesystem::exists(root / rel) || sha256_file(root / rel) != sum) return rel;
    }
    return "";
}

}  // namespace loadforge
