#include "ldspec/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ldspec/errors.hpp"

namespace ldspec {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

} // namespace

void ConfigFile::fail(int line, const std::string& message) const {
    throw ConfigError(origin_ + ":" + std::to_string(line) + ": " + message);
}

ConfigFile ConfigFile::parse(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << is.rdbuf();
    return parse_string(buffer.str(), path.string());
}

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& origin) {
    ConfigFile cfg;
    cfg.origin_ = origin;

    std::istringstream is(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        const std::size_t hash = raw.find('#');
        std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') cfg.fail(line_no, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) cfg.fail(line_no, "empty section name");
            if (cfg.sections_.count(section))
                cfg.fail(line_no, "duplicate section [" + section + "]");
            cfg.sections_[section] = {};
            cfg.section_lines_[section] = line_no;
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) cfg.fail(line_no, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) cfg.fail(line_no, "empty key");
        if (section.empty()) cfg.fail(line_no, "key '" + key + "' outside any section");
        auto& sec = cfg.sections_[section];
        if (sec.count(key))
            cfg.fail(line_no, "duplicate key '" + key + "' in section [" + section + "]");
        sec[key] = Entry{value, line_no, false};
    }
    return cfg;
}

bool ConfigFile::has_section(const std::string& section) const {
    return sections_.count(section) != 0;
}

void ConfigFile::require_section(const std::string& section) const {
    if (!has_section(section))
        throw ConfigError(origin_ + ": missing required section [" + section + "]");
}

std::vector<std::string> ConfigFile::section_names() const {
    std::vector<std::string> names;
    for (const auto& [name, _] : sections_) names.push_back(name);
    return names;
}

bool ConfigFile::has_key(const std::string& section, const std::string& key) const {
    const auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) != 0;
}

const ConfigFile::Entry& ConfigFile::entry(const std::string& section,
                                           const std::string& key) const {
    const auto sec = sections_.find(section);
    if (sec == sections_.end())
        throw ConfigError(origin_ + ": missing required section [" + section + "]");
    const auto it = sec->second.find(key);
    if (it == sec->second.end())
        throw ConfigError(origin_ + ": missing key '" + key + "' in section [" + section + "] (line " +
                          std::to_string(section_lines_.at(section)) + ")");
    it->second.consumed = true;
    return it->second;
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key) const {
    return entry(section, key).value;
}

double ConfigFile::get_double(const std::string& section, const std::string& key) const {
    const Entry& e = entry(section, key);
    char* end = nullptr;
    const double v = std::strtod(e.value.c_str(), &end);
    if (end == e.value.c_str() || *end != '\0')
        fail(e.line, "value of '" + key + "' is not a number: '" + e.value + "'");
    return v;
}

std::uint64_t ConfigFile::get_uint(const std::string& section, const std::string& key) const {
    const Entry& e = entry(section, key);
    char* end = nullptr;
    const unsigned long long v = std::strtoull(e.value.c_str(), &end, 10);
    if (end == e.value.c_str() || *end != '\0' || e.value.find('-') != std::string::npos)
        fail(e.line, "value of '" + key + "' is not a non-negative integer: '" + e.value + "'");
    return v;
}

std::vector<double> ConfigFile::get_double_list(const std::string& section,
                                                const std::string& key) const {
    const Entry& e = entry(section, key);
    std::vector<double> out;
    std::istringstream is(e.value);
    std::string item;
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (item.empty()) fail(e.line, "empty element in list '" + key + "'");
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (end == item.c_str() || *end != '\0')
            fail(e.line, "list element of '" + key + "' is not a number: '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) fail(e.line, "list '" + key + "' is empty");
    return out;
}

int ConfigFile::line_of(const std::string& section, const std::string& key) const {
    const auto sec = sections_.find(section);
    if (sec == sections_.end()) return 0;
    const auto it = sec->second.find(key);
    return it == sec->second.end() ? 0 : it->second.line;
}

void ConfigFile::require_all_consumed() const {
    std::string unknown;
    for (const auto& [section, entries] : sections_) {
        for (const auto& [key, e] : entries) {
            if (!e.consumed) {
                if (!unknown.empty()) unknown += ", ";
                unknown += "[" + section + "] " + key + " (line " + std::to_string(e.line) + ")";
            }
        }
    }
    if (!unknown.empty())
        throw ConfigError(origin_ + ": unknown keys rejected: " + unknown);
}

} // namespace ldspec
