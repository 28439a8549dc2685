#pragma once

#include "loopcoh/unstable.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace loopcoh::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitUsage = 2;

// Goes into every cache key; bump when results could change.
inline constexpr const char* kCodeVersion = "loopcoh-0.1.0";
inline constexpr int kCacheFormatVersion = 1;

class UsageError : public std::runtime_error {
public:
    UsageError(const std::string& flag, const std::string& message)
        : std::runtime_error(flag + ": " + message), flag_(flag)
    {
    }
    const std::string& flag() const { return flag_; }

private:
    std::string flag_;
};

struct JobConfig {
    std::string command;
    unstable::EMSpaceSpec spec;
    int n = 1;
    int degree = 12;
    std::string format = "csv";
    std::string out_dir;
    std::string cache_dir;
    unsigned jobs = 1;
    std::string module;
    bool page = false;
    std::optional<std::size_t> corrupt_zeta;
};

// Flat key=value lines; blank lines and lines starting with '#' are skipped.
std::map<std::string, std::string> read_config_file(const std::string& path);

// 64-bit FNV-1a over the fields that determine a result, as 16 hex digits.
std::string cache_key(const JobConfig& config, const std::string& code_version = kCodeVersion);

// One JSON file per key. Unreadable entries are misses with a warning; entries
// written by another format version are silent misses.
class Cache {
public:
    explicit Cache(std::string dir, int format_version = kCacheFormatVersion, std::ostream* warnings = nullptr);

    bool enabled() const { return !dir_.empty(); }
    std::string path_for(const std::string& key) const;
    std::optional<nlohmann::json> load(const std::string& key, int cutoff) const;
    // Writes to a temporary file and renames it into place.
    void store(const std::string& key, int cutoff, const nlohmann::json& payload) const;

private:
    void warn(const std::string& message) const;

    std::string dir_;
    int format_version_;
    std::ostream* warnings_;
};

// The whole command line front end. Returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace loopcoh::cli
