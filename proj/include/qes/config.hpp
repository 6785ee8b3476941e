#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qes/errors.hpp"

namespace qes {

/// Flat key-value config with [section] headers. Values are kept as text;
/// typed accessors parse on demand. Consumers must mark every key they read
/// so unknown keys can be rejected.
class Config {
public:
    static Config parse(std::istream& in) {
        Config cfg;
        std::string line;
        std::string section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::string t = strip(line);
            if (t.empty() || t[0] == '#') continue;
            if (t.front() == '[' && t.back() == ']') {
                section = strip(t.substr(1, t.size() - 2));
                continue;
            }
            auto eq = t.find('=');
            if (eq == std::string::npos)
                throw config_error("line " + std::to_string(lineno) + ": expected key = value");
            std::string key = strip(t.substr(0, eq));
            std::string value = strip(t.substr(eq + 1));
            if (key.empty())
                throw config_error("line " + std::to_string(lineno) + ": empty key");
            std::string full = section.empty() ? key : section + "." + key;
            if (cfg.values_.count(full))
                throw config_error("duplicate key '" + full + "'");
            cfg.values_[full] = value;
        }
        return cfg;
    }

    static Config parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw config_error("cannot open config file '" + path + "'");
        return parse(in);
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw config_error("missing key '" + key + "'");
        read_.insert(key);
        return it->second;
    }
    std::string get_string(const std::string& key, const std::string& dflt) const {
        return has(key) ? get_string(key) : dflt;
    }

    double get_double(const std::string& key) const {
        return parse_double(get_string(key), key);
    }
    double get_double(const std::string& key, double dflt) const {
        return has(key) ? get_double(key) : dflt;
    }

    long long get_int(const std::string& key) const {
        std::string v = get_string(key);
        long long out = 0;
        auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc{} || p != v.data() + v.size())
            throw config_error("key '" + key + "': not an integer: '" + v + "'");
        return out;
    }
    long long get_int(const std::string& key, long long dflt) const {
        return has(key) ? get_int(key) : dflt;
    }

    bool get_bool(const std::string& key, bool dflt) const {
        if (!has(key)) return dflt;
        std::string v = get_string(key);
        if (v == "true" || v == "yes" || v == "1") return true;
        if (v == "false" || v == "no" || v == "0") return false;
        throw config_error("key '" + key + "': not a boolean: '" + v + "'");
    }

    /// Bracketed comma-separated list; entries returned as trimmed strings.
    std::vector<std::string> get_list(const std::string& key) const {
        std::string v = get_string(key);
        if (v.size() < 2 || v.front() != '[' || v.back() != ']')
            throw config_error("key '" + key + "': expected [a, b, ...]");
        std::vector<std::string> out;
        std::string body = v.substr(1, v.size() - 2);
        std::stringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(strip(item));
        if (out.size() == 1 && out[0].empty()) out.clear();
        return out;
    }

    std::vector<double> get_double_list(const std::string& key) const {
        std::vector<double> out;
        for (const std::string& item : get_list(key)) out.push_back(parse_double(item, key));
        return out;
    }

    /// Every key must have been read by now; anything else is an error.
    void reject_unknown_keys() const {
        for (const auto& [key, value] : values_)
            if (!read_.count(key))
                throw config_error("unknown key '" + key + "'");
    }

private:
    static std::string strip(const std::string& s) {
        auto b = s.find_first_not_of(" \t\r");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    }
    static double parse_double(const std::string& v, const std::string& key) {
        try {
            std::size_t pos = 0;
            double out = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return out;
        } catch (const std::exception&) {
            throw config_error("key '" + key + "': not a number: '" + v + "'");
        }
    }

    std::map<std::string, std::string> values_;
    mutable std::set<std::string> read_;
};

} // namespace qes
