#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fbnl::cli {

/*! \brief Flat "section.key" -> value map.
 *
 *  File syntax: "[section]" headers, "key = value" lines, '#' comments.
 *  Keys before any header land in section "run".
 */
class Config {
public:
    static Config parse(const std::string& text, const std::string& origin);
    static Config load(const std::string& path);

    // "section.key=value"; a bare key means "run.key".
    void set_override(const std::string& assignment);
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const;
    std::string str(const std::string& key, const std::string& fallback) const;
    double real(const std::string& key, double fallback) const;
    int integer(const std::string& key, int fallback) const;
    bool flag(const std::string& key, bool fallback) const;
    std::vector<double> reals(const std::string& key, const std::vector<double>& fallback) const;

    // Sorted "key=value" lines; the manifest hashes this text.
    std::string canonical() const;
    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t v);

} // namespace fbnl::cli
