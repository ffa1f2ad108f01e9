#pragma once

#include <fstream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"

namespace grafluid::cli {

/// CSV emitter with a `#`-prefixed comment header carrying units and the
/// nondimensionalization constants. Numbers print with %.17g so identical
/// runs produce byte-identical files.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& comments,
              const std::vector<std::string>& columns);
    void row(std::span<const double> values);
    static std::string format(double v);

  private:
    std::ofstream out_;
    size_t columns_;
};

/// End-of-run record: config echo, version, wall time, diagnostics series,
/// and the outcomes of the command's inline checks. Written atomically
/// (temp file + rename) so a crashed run never leaves a partial manifest.
struct RunManifest {
    std::string command;
    std::map<std::string, std::string> config;
    unsigned long long seed = 0;
    double wall_seconds = 0.0;
    nlohmann::json diagnostics = nlohmann::json::object();
    struct Check {
        std::string name;
        bool pass = false;
        std::string detail;
    };
    std::vector<Check> checks;

    bool all_checks_pass() const;
    void write_atomic(const std::string& dir) const;
};

void write_error_record(const std::string& dir, const std::string& kind,
                        const std::string& message);

}  // namespace grafluid::cli
