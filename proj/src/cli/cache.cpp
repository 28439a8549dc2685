#include "loopcoh/cli.hpp"

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <unistd.h>

namespace loopcoh::cli {

namespace fs = std::filesystem;

std::string cache_key(const JobConfig& c, const std::string& code_version)
{
    const std::string fields[] = {c.command,
                                  c.spec.is_point() ? "point" : c.spec.to_string(),
                                  std::to_string(c.n),
                                  std::to_string(c.degree),
                                  c.module,
                                  c.page ? "page" : "",
                                  c.corrupt_zeta ? std::to_string(*c.corrupt_zeta) : "",
                                  code_version};
    std::uint64_t h = 14695981039346656037ull;
    for (const auto& f : fields) {
        for (unsigned char ch : f) {
            h ^= ch;
            h *= 1099511628211ull;
        }
        h ^= 0x1f;  // field separator
        h *= 1099511628211ull;
    }
    return fmt::format("{:016x}", h);
}

Cache::Cache(std::string dir, int format_version, std::ostream* warnings)
    : dir_(std::move(dir)), format_version_(format_version), warnings_(warnings)
{
}

std::string Cache::path_for(const std::string& key) const { return (fs::path(dir_) / (key + ".json")).string(); }

void Cache::warn(const std::string& message) const
{
    if (warnings_)
        *warnings_ << "warning: " << message << '\n';
}

std::optional<nlohmann::json> Cache::load(const std::string& key, int cutoff) const
{
    if (!enabled())
        return std::nullopt;
    const std::string path = path_for(key);
    std::error_code ec;
    if (!fs::exists(path, ec))
        return std::nullopt;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        warn("cannot read cache entry " + path + "; recomputing");
        return std::nullopt;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::exception& e) {
        warn("cache entry " + path + " is corrupt (" + e.what() + "); recomputing");
        return std::nullopt;
    }
    if (!j.is_object() || !j.contains("format_version") || !j["format_version"].is_number_integer()) {
        warn("cache entry " + path + " has no format version; recomputing");
        return std::nullopt;
    }
    if (j["format_version"].get<int>() != format_version_)
        return std::nullopt;
    if (!j.contains("key") || !j.contains("cutoff") || !j.contains("payload")) {
        warn("cache entry " + path + " is incomplete; recomputing");
        return std::nullopt;
    }
    if (j["key"] != key || j["cutoff"] != cutoff)
        return std::nullopt;
    return j["payload"];
}

void Cache::store(const std::string& key, int cutoff, const nlohmann::json& payload) const
{
    if (!enabled())
        return;
    static std::atomic<unsigned> counter{0};
    nlohmann::json j;
    j["format_version"] = format_version_;
    j["key"] = key;
    j["cutoff"] = cutoff;
    j["payload"] = payload;
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) {
        warn("cannot create cache directory " + dir_ + ": " + ec.message());
        return;
    }
    const std::string path = path_for(key);
    const std::string tmp = fmt::format("{}.tmp.{}.{}", path, static_cast<long>(::getpid()), counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << j.dump() << '\n';
        if (!out) {
            warn("cannot write cache entry " + tmp);
            fs::remove(tmp, ec);
            return;
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        warn("cannot move cache entry into place: " + ec.message());
        fs::remove(tmp, ec);
    }
}

}  // namespace loopcoh::cli
