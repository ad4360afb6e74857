#include "config.hpp"

#include "fbnl/error.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fbnl::cli {

namespace {

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_real(const std::string& key, const std::string& v)
{
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(x))
        throw ParameterError("config key " + key + ": '" + v + "' is not a finite number");
    return x;
}

} // namespace

Config Config::parse(const std::string& text, const std::string& origin)
{
    Config c;
    std::istringstream is(text);
    std::string line, section = "run";
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3)
                throw ParameterError(origin + ":" + std::to_string(lineno) + ": bad section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParameterError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty() || key.find('.') != std::string::npos)
            throw ParameterError(origin + ":" + std::to_string(lineno) + ": bad key '" + key + "'");
        c.values_[section + "." + key] = trim(line.substr(eq + 1));
    }
    return c;
}

Config Config::load(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw ParameterError("cannot read config file " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse(ss.str(), path);
}

void Config::set_override(const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ParameterError("override '" + assignment + "' is not key=value");
    std::string key = trim(assignment.substr(0, eq));
    if (key.find('.') == std::string::npos)
        key = "run." + key;
    set(key, trim(assignment.substr(eq + 1)));
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

std::string Config::str(const std::string& key, const std::string& fallback) const
{
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double Config::real(const std::string& key, double fallback) const
{
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : to_real(key, it->second);
}

int Config::integer(const std::string& key, int fallback) const
{
    const auto it = values_.find(key);
    if (it == values_.end())
        return fallback;
    const double x = to_real(key, it->second);
    if (x != std::floor(x) || std::abs(x) > 1e9)
        throw ParameterError("config key " + key + ": '" + it->second + "' is not an integer");
    return static_cast<int>(x);
}

bool Config::flag(const std::string& key, bool fallback) const
{
    const auto it = values_.find(key);
    if (it == values_.end())
        return fallback;
    if (it->second == "true" || it->second == "1" || it->second == "yes")
        return true;
    if (it->second == "false" || it->second == "0" || it->second == "no")
        return false;
    throw ParameterError("config key " + key + ": '" + it->second + "' is not a boolean");
}

std::vector<double> Config::reals(const std::string& key, const std::vector<double>& fallback) const
{
    const auto it = values_.find(key);
    if (it == values_.end())
        return fallback;
    std::vector<double> out;
    std::istringstream is(it->second);
    std::string item;
    while (std::getline(is, item, ','))
        out.push_back(to_real(key, trim(item)));
    if (out.empty())
        throw ParameterError("config key " + key + " is an empty list");
    return out;
}

std::string Config::canonical() const
{
    std::string out;
    for (const auto& [k, v] : values_)
        out += k + "=" + v + "\n";
    return out;
}

std::uint64_t fnv1a(const std::string& bytes)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace fbnl::cli
