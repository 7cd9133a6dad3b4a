#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace ossrisk {

inline constexpr const char* kToolVersion = "0.3.0";

std::string sha256_file(const std::filesystem::path& path);  // lowercase hex

struct InputDigest {
    std::string role;  // "libraries", "dependencies", ...
    std::string file;  // file name only, so relocated inputs give equal manifests
    std::string sha256;
};

struct RunManifest {
    std::string command;
    std::vector<InputDigest> inputs;
    std::optional<std::string> window_start;
    std::optional<std::string> window_end;
    bool raw_commits = false;
    std::string production;
    double contributor_exponent = 0.5;
    double tolerance = 1e-12;
    std::uint64_t max_iter = 0;  // 0: derived from graph depth
    std::optional<std::uint64_t> seed;
    std::string tool_version = kToolVersion;
    nlohmann::ordered_json extra = nlohmann::ordered_json::object();

    void add_input(const std::string& role, const std::filesystem::path& path);
    nlohmann::ordered_json to_json() const;
};

} // namespace ossrisk
