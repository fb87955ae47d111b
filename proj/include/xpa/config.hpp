#pragma once

#include "xpa/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace xpa {

// Missing or malformed configuration entry.
class ConfigError : public InputError
{
public:
    using InputError::InputError;
};

// Flat `key = value` file; '#' starts a comment. An environment variable
// PREFIX + KEY (uppercased, '.' and '-' mapped to '_') overrides the file value.
class Config
{
public:
    static Config parse(std::istream& in, const std::string& source = "config");
    static Config load(const std::filesystem::path& path);

    // Looks up env overrides for every key already present and for `extra_keys`.
    void apply_env(const std::string& prefix, const std::vector<std::string>& extra_keys = {});
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::string& get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    // Relative paths resolve against the config file's directory.
    std::filesystem::path get_path(const std::string& key) const;
    std::optional<std::filesystem::path> get_optional_path(const std::string& key) const;

    const std::map<std::string, std::string>& values() const { return values_; }
    const std::filesystem::path& base_dir() const { return base_; }
    void set_base_dir(std::filesystem::path p) { base_ = std::move(p); }

    static std::string env_name(const std::string& prefix, const std::string& key);

private:
    std::map<std::string, std::string> values_;
    std::filesystem::path base_ = ".";
    std::string source_ = "config";
};

} // namespace xpa
