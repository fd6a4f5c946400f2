#include "metroflow/cli/manifest.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "json.hpp"
#include "metroflow/errors.hpp"

namespace metroflow::cli {

namespace fs = std::filesystem;

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw NumericalError("SHA-256 digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

std::vector<FileRecord> hash_outputs(const std::string& out_dir) {
    std::vector<FileRecord> out;
    for (const auto& entry : fs::recursive_directory_iterator(out_dir)) {
        if (!entry.is_regular_file()) continue;
        const auto rel = fs::relative(entry.path(), out_dir).generic_string();
        if (rel == "manifest.json") continue;
        out.push_back({rel, sha256_file(entry.path().string())});
    }
    std::sort(out.begin(), out.end(), [](const FileRecord& a, const FileRecord& b) { return a.path < b.path; });
    return out;
}

namespace {

nlohmann::ordered_json records(const std::vector<FileRecord>& files) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& f : files) arr.push_back({{"path", f.path}, {"sha256", f.sha256}});
    return arr;
}

std::vector<FileRecord> parse_records(const nlohmann::json& arr) {
    std::vector<FileRecord> out;
    for (const auto& r : arr) out.push_back({r.at("path").get<std::string>(), r.at("sha256").get<std::string>()});
    return out;
}

}  // namespace

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["args"] = args;
    j["config"] = config_path;
    j["seed"] = seed ? nlohmann::ordered_json(*seed) : nlohmann::ordered_json(nullptr);
    j["out_dir"] = out_dir;
    j["tool_version"] = tool_version;
    j["inputs"] = records(inputs);
    j["outputs"] = records(outputs);
    return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        RunManifest m;
        m.command = j.at("command").get<std::string>();
        m.args = j.at("args").get<std::vector<std::string>>();
        m.config_path = j.at("config").get<std::string>();
        if (!j.at("seed").is_null()) m.seed = j.at("seed").get<std::uint64_t>();
        m.out_dir = j.at("out_dir").get<std::string>();
        m.tool_version = j.at("tool_version").get<std::string>();
        m.inputs = parse_records(j.at("inputs"));
        m.outputs = parse_records(j.at("outputs"));
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad manifest: ") + e.what());
    }
}

RunManifest RunManifest::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open manifest " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

}  // namespace metroflow::cli
