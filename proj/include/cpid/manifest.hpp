#ifndef CPID_MANIFEST_HPP_
#define CPID_MANIFEST_HPP_

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace cpid {

// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

// Provenance block embedded in every machine-readable output.
class RunManifest {
public:
    explicit RunManifest(std::string command);
    void add_input(const std::string& path, std::string_view contents);
    void add_file(const std::string& path);  // reads and digests the file
    void set_seed(std::uint64_t seed) { seed_ = seed; }
    // Wall-clock seconds since construction go in the "timing" field only.
    nlohmann::json to_json() const;

    static const char* version();

private:
    std::string command_;
    std::vector<std::pair<std::string, std::string>> inputs_;
    std::optional<std::uint64_t> seed_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace cpid

#endif  // CPID_MANIFEST_HPP_
