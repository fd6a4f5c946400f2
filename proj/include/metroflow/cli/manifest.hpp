#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace metroflow::cli {

struct FileRecord {
    std::string path;    // inputs: as given on the command line; outputs: relative to the output directory
    std::string sha256;  // lowercase hex
};

// Record of one command invocation, written as manifest.json next to its outputs.
struct RunManifest {
    std::string command;
    std::vector<std::string> args;  // full argument list after the program name
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string tool_version;
    std::vector<FileRecord> inputs;
    std::vector<FileRecord> outputs;

    [[nodiscard]] std::string to_json() const;
    [[nodiscard]] static RunManifest from_json(const std::string& text);
    [[nodiscard]] static RunManifest load(const std::string& path);
};

[[nodiscard]] std::string sha256_hex(const std::string& bytes);
// Throws ConfigError when the file cannot be read.
[[nodiscard]] std::string sha256_file(const std::string& path);

// Hashes every regular file under out_dir except manifest.json, sorted by relative path.
[[nodiscard]] std::vector<FileRecord> hash_outputs(const std::string& out_dir);

}  // namespace metroflow::cli
