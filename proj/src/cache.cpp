#include "es/cache.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace es::cache {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

u64 fnv1a(u64 h, std::string_view s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

json sidecar(const std::string& computation, const std::string& params_json, std::string_view version) {
    return {{"computation", computation}, {"parameters", json::parse(params_json)}, {"version", version}};
}

void write_atomic(const fs::path& target, const std::string& bytes) {
    static std::atomic<unsigned> counter{0};
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.close();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw CapacityError("cache: cannot write " + tmp.string());
        }
    }
    fs::rename(tmp, target);
}

std::optional<std::string> read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

fs::path default_dir() {
    if (const char* d = std::getenv(kCacheDirEnv); d && *d) return d;
    if (const char* x = std::getenv("XDG_CACHE_HOME"); x && *x) return fs::path(x) / "es";
    if (const char* h = std::getenv("HOME"); h && *h) return fs::path(h) / ".cache" / "es";
    return fs::temp_directory_path() / "es-cache";
}

std::string key(const std::string& computation, const std::string& params_json, std::string_view version) {
    u64 h = 0xcbf29ce484222325ULL;
    h = fnv1a(h, computation);
    h = fnv1a(h, std::string_view("\0", 1));
    h = fnv1a(h, json::parse(params_json).dump());
    h = fnv1a(h, std::string_view("\0", 1));
    h = fnv1a(h, version);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void Cache::store(const std::string& computation, const std::string& params_json, const std::string& bytes,
                  std::string_view version) const {
    fs::create_directories(dir_);
    const std::string k = key(computation, params_json, version);
    write_atomic(report_path(k), bytes);
    write_atomic(sidecar_path(k), sidecar(computation, params_json, version).dump(2) + "\n");
}

std::optional<std::string> Cache::load(const std::string& computation, const std::string& params_json,
                                       std::string_view version) const {
    const std::string k = key(computation, params_json, version);
    const auto side = read_file(sidecar_path(k));
    if (!side) return std::nullopt;
    const json stored = json::parse(*side, nullptr, false);
    if (stored.is_discarded() || stored != sidecar(computation, params_json, version)) return std::nullopt;
    return read_file(report_path(k));
}

}  // namespace es::cache
