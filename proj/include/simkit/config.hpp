#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace simkit {

/// Flat key=value configuration with [section] headers; keys are addressed as
/// "section.key". '#' and ';' start comments. Later assignments win, so
/// command-line overrides are plain re-assignments.
class ConfigMap {
public:
    static ConfigMap parse_text(const std::string& text);
    static ConfigMap parse_file(const std::string& path);

    /// "section.key=value" (the form taken by --set).
    void apply_override(const std::string& key_eq_value);

    bool has(const std::string& key) const;
    std::string get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;
    int get_int_or(const std::string& key, int fallback) const;
    bool get_bool_or(const std::string& key, bool fallback) const;

    void set(const std::string& key, const std::string& value);

    /// Sorted "key = value" lines; the provenance hash is computed over this.
    std::string canonical() const;
    std::uint64_t hash() const;  // FNV-1a 64 over canonical()

    const std::map<std::string, std::string>& entries() const { return kv_; }

private:
    std::map<std::string, std::string> kv_;
};

}  // namespace simkit
