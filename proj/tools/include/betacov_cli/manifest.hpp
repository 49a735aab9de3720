#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace betacov::cli {

std::string sha256_hex(std::string_view data);

struct OutputRecord {
    std::string file;   ///< name relative to the output directory
    std::uintmax_t bytes = 0;
    std::string sha256;
};

struct RunManifest {
    std::string command;
    nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
    std::vector<std::string> argv;
    std::uint64_t master_seed = 0;
    long sims = 0;
    int threads = 1;
    std::string tool_version;
    double wall_time_seconds = 0.0;
    std::vector<OutputRecord> outputs;

    nlohmann::ordered_json to_json() const;
    static RunManifest from_json(const nlohmann::ordered_json& j);
};

/// Writes `content` to dir/name byte-for-byte and returns its record.
OutputRecord write_output(const std::filesystem::path& dir, const std::string& name, const std::string& content);

} // namespace betacov::cli
