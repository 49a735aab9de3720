#include "betacov_cli/manifest.hpp"

#include <array>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>
#include <openssl/evp.h>

namespace betacov::cli {

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256: EVP_Digest failed");
    }
    std::string hex;
    hex.reserve(2 * length);
    for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

nlohmann::ordered_json RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["parameters"] = parameters;
    j["argv"] = argv;
    j["master_seed"] = master_seed;
    j["sims"] = sims;
    j["threads"] = threads;
    j["tool_version"] = tool_version;
    j["wall_time_seconds"] = wall_time_seconds;
    auto& files = j["outputs"] = nlohmann::ordered_json::array();
    for (const auto& o : outputs) {
        nlohmann::ordered_json entry;
        entry["file"] = o.file;
        entry["bytes"] = o.bytes;
        entry["sha256"] = o.sha256;
        files.push_back(std::move(entry));
    }
    return j;
}

RunManifest RunManifest::from_json(const nlohmann::ordered_json& j) {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.parameters = j.at("parameters");
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.master_seed = j.at("master_seed").get<std::uint64_t>();
    m.sims = j.at("sims").get<long>();
    m.threads = j.at("threads").get<int>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.wall_time_seconds = j.at("wall_time_seconds").get<double>();
    for (const auto& o : j.at("outputs")) {
        m.outputs.push_back(
            {o.at("file").get<std::string>(), o.at("bytes").get<std::uintmax_t>(), o.at("sha256").get<std::string>()});
    }
    return m;
}

OutputRecord write_output(const std::filesystem::path& dir, const std::string& name, const std::string& content) {
    std::filesystem::create_directories(dir);
    const auto path = dir / name;
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("cannot open " + path.string() + " for writing");
    file.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!file) throw std::runtime_error("write failed: " + path.string());
    return {name, content.size(), sha256_hex(content)};
}

} // namespace betacov::cli
