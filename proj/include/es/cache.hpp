#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "es/report.hpp"

namespace es::cache {

inline constexpr const char* kCacheDirEnv = "ES_CACHE_DIR";

// $ES_CACHE_DIR, else $XDG_CACHE_HOME/es, else $HOME/.cache/es.
std::filesystem::path default_dir();

// 16 hex digits of FNV-1a over computation, canonical parameter JSON and schema version.
std::string key(const std::string& computation, const std::string& params_json,
                std::string_view version = kSchemaVersion);

class Cache {
public:
    explicit Cache(std::filesystem::path dir) : dir_(std::move(dir)) {}

    const std::filesystem::path& dir() const { return dir_; }
    std::filesystem::path report_path(const std::string& k) const { return dir_ / (k + ".json"); }
    std::filesystem::path sidecar_path(const std::string& k) const { return dir_ / (k + ".params.json"); }

    // Writes <key>.json (the bytes given) and <key>.params.json, each through a
    // temporary file and rename.
    void store(const std::string& computation, const std::string& params_json, const std::string& bytes,
               std::string_view version = kSchemaVersion) const;

    // Stored bytes, or nullopt when absent or when the sidecar names other inputs.
    std::optional<std::string> load(const std::string& computation, const std::string& params_json,
                                    std::string_view version = kSchemaVersion) const;

private:
    std::filesystem::path dir_;
};

}  // namespace es::cache
