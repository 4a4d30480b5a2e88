#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace ldspec {

/// Strict sectioned key-value text format:
///   # comment
///   [section]
///   key = value
/// Duplicate sections/keys are parse errors. Accessors mark keys consumed;
/// require_all_consumed() rejects anything a schema did not read, so unknown
/// keys fail loudly with their line number.
class ConfigFile {
public:
    static ConfigFile parse(const std::filesystem::path& path);
    static ConfigFile parse_string(const std::string& text, const std::string& origin);

    const std::string& origin() const { return origin_; }

    bool has_section(const std::string& section) const;
    void require_section(const std::string& section) const;
    std::vector<std::string> section_names() const;
    bool has_key(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key) const;
    std::uint64_t get_uint(const std::string& section, const std::string& key) const;
    std::vector<double> get_double_list(const std::string& section, const std::string& key) const;

    int line_of(const std::string& section, const std::string& key) const;

    /// Throws ConfigError naming every key no schema consumed.
    void require_all_consumed() const;

private:
    struct Entry {
        std::string value;
        int line = 0;
        mutable bool consumed = false;
    };

    const Entry& entry(const std::string& section, const std::string& key) const;
    [[noreturn]] void fail(int line, const std::string& message) const;

    std::string origin_;
    std::map<std::string, std::map<std::string, Entry>> sections_;
    std::map<std::string, int> section_lines_;
};

} // namespace ldspec
