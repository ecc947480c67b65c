#ifndef UAVSIM_TEXT_CONFIG_HPP
#define UAVSIM_TEXT_CONFIG_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uavsim/geometry.hpp"

namespace uavsim {

// Minimal structured-text configuration: `[section]` headers (sections
// may repeat), `key = value` entries, `#` comments. Values are scalars
// or whitespace-separated lists.
class ConfigSection {
public:
    std::string name;
    int line = 0;

    bool has(const std::string& key) const;
    // Typed getters; every failure is a ValidationError naming the key.
    std::string get_string(const std::string& key) const;
    double get_double(const std::string& key) const;
    long long get_int(const std::string& key) const;
    Point3 get_point(const std::string& key) const;  // "x y z"
    std::string get_string_or(const std::string& key, const std::string& fallback) const;
    double get_double_or(const std::string& key, double fallback) const;
    long long get_int_or(const std::string& key, long long fallback) const;

    void set(const std::string& key, const std::string& value, int line_no);
    // Every key must have been read (or be in `known`); unknown keys are
    // hard errors so typos cannot silently fall back to defaults.
    void require_known_keys(const std::vector<std::string>& known) const;

private:
    std::map<std::string, std::pair<std::string, int>> values_;
};

struct ConfigFile {
    std::vector<ConfigSection> sections;

    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_string(const std::string& text, const std::string& origin);

    const ConfigSection* find_one(const std::string& name) const;  // nullptr when absent
    std::vector<const ConfigSection*> find_all(const std::string& name) const;
};

} // namespace uavsim

#endif
