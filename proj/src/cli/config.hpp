#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Flat key-value run configuration: one `key = value` pair per line, `#`
// comments, schema-validated before any computation. Unknown keys are
// rejected by name; every file must carry a supported `schema_version`.

namespace grafluid::cli {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ValueType { real, integer, boolean, text };

struct KeySpec {
    ValueType type = ValueType::real;
    bool required = false;
    std::string default_value;           // used when not required
    std::vector<std::string> one_of;     // allowed values for text keys (empty = any)
};

using Schema = std::map<std::string, KeySpec>;

class Config {
  public:
    static Config parse_file(const std::string& path);
    static Config parse_text(const std::string& text, const std::string& origin = "<memory>");

    /// Checks every key against the schema, fills defaults, and verifies
    /// types. Throws ConfigError naming the offending key.
    void validate(const Schema& schema);

    double get_real(const std::string& key) const;
    long long get_integer(const std::string& key) const;
    bool get_boolean(const std::string& key) const;
    const std::string& get_text(const std::string& key) const;
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    const std::map<std::string, std::string>& entries() const { return values_; }

  private:
    std::map<std::string, std::string> values_;
    std::string origin_;
};

inline constexpr long long supported_schema_version = 1;

}  // namespace grafluid::cli
