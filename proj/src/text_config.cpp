#include "uavsim/text_config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "uavsim/errors.hpp"

namespace uavsim {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos)
        return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

} // namespace

bool ConfigSection::has(const std::string& key) const { return values_.count(key) > 0; }

std::string ConfigSection::get_string(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end())
        throw ValidationError("[" + name + "] missing required key '" + key + "'");
    return it->second.first;
}

double ConfigSection::get_double(const std::string& key) const {
    const std::string raw = get_string(key);
    try {
        size_t used = 0;
        const double v = std::stod(raw, &used);
        if (trim(raw.substr(used)).empty())
            return v;
    } catch (const std::exception&) {
    }
    throw ValidationError("[" + name + "] key '" + key + "': expected a number, got '" + raw + "'");
}

long long ConfigSection::get_int(const std::string& key) const {
    const std::string raw = get_string(key);
    try {
        size_t used = 0;
        const long long v = std::stoll(raw, &used);
        if (trim(raw.substr(used)).empty())
            return v;
    } catch (const std::exception&) {
    }
    throw ValidationError("[" + name + "] key '" + key + "': expected an integer, got '" + raw + "'");
}

Point3 ConfigSection::get_point(const std::string& key) const {
    const std::string raw = get_string(key);
    std::istringstream in(raw);
    Point3 p;
    std::string rest;
    if (in >> p.x >> p.y >> p.z && !(in >> rest))
        return p;
    throw ValidationError("[" + name + "] key '" + key + "': expected 'x y z', got '" + raw + "'");
}

std::string ConfigSection::get_string_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}

double ConfigSection::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long long ConfigSection::get_int_or(const std::string& key, long long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

void ConfigSection::set(const std::string& key, const std::string& value, int line_no) {
    if (values_.count(key))
        throw ValidationError("[" + name + "] duplicate key '" + key + "' (line " +
                              std::to_string(line_no) + ")");
    values_[key] = {value, line_no};
}

void ConfigSection::require_known_keys(const std::vector<std::string>& known) const {
    for (const auto& [key, value] : values_) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ValidationError("[" + name + "] unknown key '" + key + "' (line " +
                                  std::to_string(value.second) + ")");
    }
}

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& origin) {
    ConfigFile file;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    ConfigSection* current = nullptr;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ValidationError(origin + ":" + std::to_string(line_no) +
                                      ": malformed section header '" + line + "'");
            ConfigSection section;
            section.name = trim(line.substr(1, line.size() - 2));
            section.line = line_no;
            if (section.name.empty())
                throw ValidationError(origin + ":" + std::to_string(line_no) + ": empty section name");
            file.sections.push_back(section);
            current = &file.sections.back();
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError(origin + ":" + std::to_string(line_no) +
                                  ": expected 'key = value', got '" + line + "'");
        if (!current)
            throw ValidationError(origin + ":" + std::to_string(line_no) +
                                  ": key outside any [section]");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ValidationError(origin + ":" + std::to_string(line_no) + ": empty key");
        current->set(key, value, line_no);
    }
    return file;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_string(buffer.str(), path);
}

const ConfigSection* ConfigFile::find_one(const std::string& name) const {
    const ConfigSection* found = nullptr;
    for (const ConfigSection& s : sections) {
        if (s.name != name)
            continue;
        if (found)
            throw ValidationError("section [" + name + "] appears more than once");
        found = &s;
    }
    return found;
}

std::vector<const ConfigSection*> ConfigFile::find_all(const std::string& name) const {
    std::vector<const ConfigSection*> out;
    for (const ConfigSection& s : sections)
        if (s.name == name)
            out.push_back(&s);
    return out;
}

} // namespace uavsim
