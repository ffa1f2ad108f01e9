#include "output.hpp"

#include <cstdio>
#include <filesystem>

namespace grafluid::cli {

namespace fs = std::filesystem;

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& comments,
                     const std::vector<std::string>& columns)
    : out_(path), columns_(columns.size()) {
    if (!out_) throw IoError("cannot open output file '" + path + "'");
    for (const auto& c : comments) out_ << "# " << c << "\n";
    for (size_t i = 0; i < columns.size(); ++i)
        out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
}

std::string CsvWriter::format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void CsvWriter::row(std::span<const double> values) {
    if (values.size() != columns_) throw IoError("CsvWriter: row width mismatch");
    for (size_t i = 0; i < values.size(); ++i)
        out_ << format(values[i]) << (i + 1 < values.size() ? "," : "\n");
    if (!out_) throw IoError("CsvWriter: write failed");
}

bool RunManifest::all_checks_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

void RunManifest::write_atomic(const std::string& dir) const {
    nlohmann::json j;
    j["schema_version"] = supported_schema_version;
    j["command"] = command;
    j["code_version"] = "grafluid 1.0.0";
    j["config"] = config;
    j["seed"] = seed;
    j["wall_seconds"] = wall_seconds;
    j["diagnostics"] = diagnostics;
    auto arr = nlohmann::json::array();
    for (const auto& c : checks)
        arr.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    j["checks"] = arr;

    const fs::path target = fs::path(dir) / "manifest.json";
    const fs::path tmp = fs::path(dir) / "manifest.json.tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw IoError("cannot write '" + tmp.string() + "'");
        out << j.dump(2) << "\n";
    }
    fs::rename(tmp, target);
}

void write_error_record(const std::string& dir, const std::string& kind,
                        const std::string& message) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    nlohmann::json j{{"error", kind}, {"message", message}};
    std::ofstream out(fs::path(dir) / "error.json");
    if (out) out << j.dump(2) << "\n";
}

}  // namespace grafluid::cli
