#include "cpid/manifest.hpp"

#include <cstdio>

#include "cpid/text.hpp"

#ifndef CPID_VERSION
#define CPID_VERSION "0.0.0"
#endif

namespace cpid {

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RunManifest::RunManifest(std::string command) : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {}

void RunManifest::add_input(const std::string& path, std::string_view contents) {
    inputs_.emplace_back(path, "fnv1a64:" + fnv1a_hex(contents));
}

void RunManifest::add_file(const std::string& path) { add_input(path, read_file(path)); }

nlohmann::json RunManifest::to_json() const {
    nlohmann::json j;
    j["command"] = command_;
    j["inputs"] = nlohmann::json::array();
    for (const auto& [p, d] : inputs_) j["inputs"].push_back({{"path", p}, {"digest", d}});
    j["seed"] = seed_ ? nlohmann::json(*seed_) : nlohmann::json(nullptr);
    j["version"] = version();
    std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start_;
    j["timing"] = {{"seconds", dt.count()}};
    return j;
}

const char* RunManifest::version() { return CPID_VERSION; }

}  // namespace cpid
