#include "xpa/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>

namespace xpa {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

Config Config::parse(std::istream& in, const std::string& source)
{
    Config c;
    c.source_ = source;
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source + ":" + std::to_string(no) + ": expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        if (key.empty())
            throw ConfigError(source + ":" + std::to_string(no) + ": empty key");
        if (c.values_.count(key))
            throw ConfigError(source + ":" + std::to_string(no) + ": duplicate key '" + key + "'");
        c.values_[key] = trim(line.substr(eq + 1));
    }
    return c;
}

Config Config::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path.string());
    auto c = parse(in, path.string());
    c.base_ = path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path();
    return c;
}

std::string Config::env_name(const std::string& prefix, const std::string& key)
{
    std::string name = prefix;
    for (char ch : key)
        name += (ch == '.' || ch == '-') ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    return name;
}

void Config::apply_env(const std::string& prefix, const std::vector<std::string>& extra_keys)
{
    std::vector<std::string> keys = extra_keys;
    for (const auto& [k, v] : values_)
        keys.push_back(k);
    for (const auto& k : keys)
        if (const char* v = std::getenv(env_name(prefix, k).c_str()))
            values_[k] = v;
}

const std::string& Config::get(const std::string& key) const
{
    auto it = values_.find(key);
    if (it == values_.end())
        throw ConfigError(source_ + ": missing required key '" + key + "'");
    return it->second;
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const
{
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const
{
    auto it = values_.find(key);
    if (it == values_.end())
        return fallback;
    const auto& s = it->second;
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw ConfigError(source_ + ": key '" + key + "' is not a number: " + s);
    return v;
}

long long Config::get_int(const std::string& key, long long fallback) const
{
    auto it = values_.find(key);
    if (it == values_.end())
        return fallback;
    const auto& s = it->second;
    long long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw ConfigError(source_ + ": key '" + key + "' is not an integer: " + s);
    return v;
}

std::filesystem::path Config::get_path(const std::string& key) const
{
    std::filesystem::path p = get(key);
    return p.is_absolute() ? p : base_ / p;
}

std::optional<std::filesystem::path> Config::get_optional_path(const std::string& key) const
{
    if (!has(key) || get(key).empty())
        return std::nullopt;
    return get_path(key);
}

} // namespace xpa
