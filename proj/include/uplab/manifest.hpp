#ifndef UPLAB_MANIFEST_HPP
#define UPLAB_MANIFEST_HPP

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "uplab/common.hpp"
#include "uplab/version.hpp"

namespace uplab {

inline std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 14695981039346656037ull;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

inline std::uint64_t hash_file(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    require(file.good(), "manifest: cannot hash missing file: " + path);
    std::vector<char> bytes((std::istreambuf_iterator<char>(file)),
                            std::istreambuf_iterator<char>());
    return fnv1a64(bytes.data(), bytes.size());
}

inline std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Provenance sidecar for every command run. Data outputs are deterministic
/// given (seed, config); the manifest alone carries wall-clock timestamps.
struct RunManifest {
    std::string command;
    std::uint64_t seed = 0;
    std::string config_hash; // fnv1a64 over the canonical config string
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::string started_utc;
    std::string finished_utc;

    static std::string now_utc() {
        const auto now = std::chrono::system_clock::now();
        const std::time_t t = std::chrono::system_clock::to_time_t(now);
        std::tm tm{};
        gmtime_r(&t, &tm);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        return buf;
    }
};

inline void write_manifest(const std::string& path, const RunManifest& m) {
    nlohmann::json inputs = nlohmann::json::array();
    for (const auto& f : m.inputs)
        inputs.push_back({{"path", f}, {"fnv1a64", hex64(hash_file(f))}});
    nlohmann::json outputs = nlohmann::json::array();
    for (const auto& f : m.outputs)
        outputs.push_back({{"path", f}, {"fnv1a64", hex64(hash_file(f))}});
    nlohmann::json j{{"tool_version", kVersion},
                     {"command", m.command},
                     {"seed", m.seed},
                     {"config_hash", m.config_hash},
                     {"inputs", inputs},
                     {"outputs", outputs},
                     {"started_utc", m.started_utc},
                     {"finished_utc", m.finished_utc}};
    std::ofstream file(path, std::ios::trunc);
    require(file.good(), "manifest: cannot open for writing: " + path);
    file << j.dump(2) << '\n';
    require(file.good(), "manifest: write failed: " + path);
}

} // namespace uplab

#endif
