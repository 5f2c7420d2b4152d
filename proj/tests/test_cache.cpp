#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "es/cache.hpp"

using namespace es;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const char* name) {
    const fs::path d = fs::temp_directory_path() / ("es-cache-test-" + std::to_string(::getpid())) / name;
    fs::remove_all(d);
    return d;
}

}  // namespace

TEST_CASE("cache store then load returns the same bytes") {
    const cache::Cache c(fresh_dir("roundtrip"));
    const std::string bytes = "{\n  \"label\": \"x\"\n}\n\x01\xff";
    c.store("mean", R"({"x":100})", bytes);
    const auto got = c.load("mean", R"({"x":100})");
    REQUIRE(got.has_value());
    CHECK(*got == bytes);

    // Exactly the report and its sidecar; no temporaries left behind.
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(c.dir())) {
        ++files;
        CHECK(e.path().string().find(".tmp") == std::string::npos);
    }
    CHECK(files == 2);
    const std::string k = cache::key("mean", R"({"x":100})");
    CHECK(k.size() == 16);
    CHECK(k.find_first_not_of("0123456789abcdef") == std::string::npos);
    std::ifstream side(c.sidecar_path(k));
    std::stringstream ss;
    ss << side.rdbuf();
    CHECK(ss.str().find("\"x\": 100") != std::string::npos);
    CHECK(ss.str().find("\"computation\": \"mean\"") != std::string::npos);
}

TEST_CASE("cache misses are not errors") {
    const cache::Cache c(fresh_dir("miss"));
    CHECK_FALSE(c.load("mean", R"({"x":5})").has_value());
    c.store("mean", R"({"x":5})", "a");
    CHECK_FALSE(c.load("mean", R"({"x":6})").has_value());
    CHECK_FALSE(c.load("weightsum", R"({"x":5})").has_value());
    CHECK_FALSE(c.load("mean", R"({"x":5})", "0.0-other").has_value());
}

TEST_CASE("cache keys depend on every input but not on JSON spelling") {
    const std::string a = cache::key("bilinear", R"({"V":4,"W":4})");
    CHECK(a == cache::key("bilinear", R"({ "W": 4, "V": 4 })"));
    CHECK(a != cache::key("bilinear", R"({"V":4,"W":8})"));
    CHECK(a != cache::key("mean", R"({"V":4,"W":4})"));
    CHECK(a != cache::key("bilinear", R"({"V":4,"W":4})", "2.0"));
}

TEST_CASE("a second store replaces the entry") {
    const cache::Cache c(fresh_dir("replace"));
    c.store("mean", R"({"x":7})", "first");
    c.store("mean", R"({"x":7})", "second");
    CHECK(c.load("mean", R"({"x":7})") == std::optional<std::string>("second"));
}

TEST_CASE("cache directory comes from the environment") {
    const char* old = std::getenv(cache::kCacheDirEnv);
    const std::string saved = old ? old : "";
    const char* old_xdg = std::getenv("XDG_CACHE_HOME");
    const std::string saved_xdg = old_xdg ? old_xdg : "";
    ::setenv(cache::kCacheDirEnv, "/tmp/es-env-dir", 1);
    CHECK(cache::default_dir() == fs::path("/tmp/es-env-dir"));
    ::unsetenv(cache::kCacheDirEnv);
    ::setenv("XDG_CACHE_HOME", "/tmp/xdg", 1);
    CHECK(cache::default_dir() == fs::path("/tmp/xdg/es"));
    if (old) ::setenv(cache::kCacheDirEnv, saved.c_str(), 1);
    if (old_xdg) {
        ::setenv("XDG_CACHE_HOME", saved_xdg.c_str(), 1);
    } else {
        ::unsetenv("XDG_CACHE_HOME");
    }
}
