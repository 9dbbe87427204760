#include "simkit/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace simkit {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

}  // namespace

ConfigMap ConfigMap::parse_text(const std::string& text) {
    ConfigMap cfg;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(line_no) +
                                            ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
        cfg.kv_[section.empty() ? key : section + "." + key] = value;
    }
    return cfg;
}

ConfigMap ConfigMap::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str());
}

void ConfigMap::apply_override(const std::string& key_eq_value) {
    const auto eq = key_eq_value.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("--set expects section.key=value, got '" + key_eq_value + "'");
    kv_[trim(key_eq_value.substr(0, eq))] = trim(key_eq_value.substr(eq + 1));
}

bool ConfigMap::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string ConfigMap::get(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw std::invalid_argument("missing config key '" + key + "'");
    return it->second;
}

std::string ConfigMap::get_or(const std::string& key, const std::string& fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

double ConfigMap::get_double(const std::string& key) const {
    const std::string v = get(key);
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (trim(v.substr(pos)).size())
        throw std::invalid_argument("config key '" + key + "': not a number: '" + v + "'");
    return x;
}

double ConfigMap::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

int ConfigMap::get_int_or(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    return static_cast<int>(get_double(key));
}

bool ConfigMap::get_bool_or(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = lower(get(key));
    if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
    if (v == "off" || v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("config key '" + key + "': not a boolean: '" + v + "'");
}

void ConfigMap::set(const std::string& key, const std::string& value) { kv_[key] = value; }

std::string ConfigMap::canonical() const {
    std::string out;
    for (const auto& [k, v] : kv_) {  // std::map iterates sorted
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    }
    return out;
}

std::uint64_t ConfigMap::hash() const {
    // FNV-1a 64
    std::uint64_t h = 1469598103934665603ull;
    for (const char c : canonical()) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace simkit
