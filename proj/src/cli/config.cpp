#include "config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace grafluid::cli {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool parse_real(const std::string& s, double& out) {
    if (s == "inf" || s == "+inf") {
        out = std::numeric_limits<double>::infinity();
        return true;
    }
    try {
        size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

bool parse_integer(const std::string& s, long long& out) {
    try {
        size_t pos = 0;
        out = std::stoll(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

bool parse_boolean(const std::string& s, bool& out) {
    if (s == "true" || s == "yes" || s == "on") {
        out = true;
        return true;
    }
    if (s == "false" || s == "no" || s == "off") {
        out = false;
        return true;
    }
    return false;
}

}  // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str(), path);
}

Config Config::parse_text(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key or value");
        if (cfg.values_.count(key))
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" +
                              key + "'");
        cfg.values_[key] = value;
    }
    return cfg;
}

void Config::validate(const Schema& schema) {
    if (!values_.count("schema_version"))
        throw ConfigError(origin_ + ": missing required key 'schema_version'");
    long long ver = 0;
    if (!parse_integer(values_["schema_version"], ver) || ver != supported_schema_version)
        throw ConfigError(origin_ + ": unsupported schema_version '" +
                          values_["schema_version"] + "'");

    for (const auto& [key, value] : values_) {
        if (key == "schema_version") continue;
        const auto it = schema.find(key);
        if (it == schema.end())
            throw ConfigError(origin_ + ": unknown key '" + key + "'");
        const KeySpec& spec = it->second;
        switch (spec.type) {
            case ValueType::real: {
                double d;
                if (!parse_real(value, d))
                    throw ConfigError(origin_ + ": key '" + key + "' expects a real number");
                break;
            }
            case ValueType::integer: {
                long long v;
                if (!parse_integer(value, v))
                    throw ConfigError(origin_ + ": key '" + key + "' expects an integer");
                break;
            }
            case ValueType::boolean: {
                bool b;
                if (!parse_boolean(value, b))
                    throw ConfigError(origin_ + ": key '" + key + "' expects a boolean");
                break;
            }
            case ValueType::text:
                if (!spec.one_of.empty() &&
                    std::find(spec.one_of.begin(), spec.one_of.end(), value) ==
                        spec.one_of.end())
                    throw ConfigError(origin_ + ": key '" + key + "' has unsupported value '" +
                                      value + "'");
                break;
        }
    }
    for (const auto& [key, spec] : schema) {
        if (values_.count(key)) continue;
        if (spec.required)
            throw ConfigError(origin_ + ": missing required key '" + key + "'");
        values_[key] = spec.default_value;
    }
}

double Config::get_real(const std::string& key) const {
    double d;
    const auto it = values_.find(key);
    if (it == values_.end() || !parse_real(it->second, d))
        throw ConfigError("config key '" + key + "' missing or not a real number");
    return d;
}

long long Config::get_integer(const std::string& key) const {
    long long v;
    const auto it = values_.find(key);
    if (it == values_.end() || !parse_integer(it->second, v))
        throw ConfigError("config key '" + key + "' missing or not an integer");
    return v;
}

bool Config::get_boolean(const std::string& key) const {
    bool b;
    const auto it = values_.find(key);
    if (it == values_.end() || !parse_boolean(it->second, b))
        throw ConfigError("config key '" + key + "' missing or not a boolean");
    return b;
}

const std::string& Config::get_text(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("config key '" + key + "' missing");
    return it->second;
}

}  // namespace grafluid::cli
