#pragma once

// Result tables, charts, and the files an experiment writes.

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace hybridq::report {

struct Table {
    std::string name;  // file stem
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

/// Fixed-point text for a table cell; empty for NaN.
std::string cell(double v, int decimals = 6);
std::string cell(long long v);

struct Provenance {
    std::string preset;
    std::string config_hash;
    std::uint64_t seed = 0;
};

/// "# hybridq <version> preset=<p> config_hash=<h> seed=<s>" then the CSV.
std::string to_csv(const Table& t, const Provenance& p);

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

struct Bubble {
    double x = 0.0;
    double y = 0.0;
    double size = 0.0;  // drawn as radius proportional to sqrt(size)
};

/// Minimal deterministic SVG charts (640x400, fixed palette).
std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<Series>& series);
std::string bubble_chart(const std::string& title, const std::string& x_label,
                         const std::string& y_label, const std::vector<Bubble>& bubbles);

struct Chart {
    std::string name;
    std::string svg;
};

struct Output {
    std::string preset;
    nlohmann::json parameters;  // everything needed to regenerate; hashed
    std::vector<Table> tables;
    nlohmann::json summary;
    std::vector<Chart> charts;
};

/// Writes <table>.csv for every table, summary.json, manifest.json and, when
/// present, <chart>.svg into `dir` (created if needed). Files are written in
/// a fixed order after all results exist. Throws IoError.
void write_output(const Output& out, const std::filesystem::path& dir, std::uint64_t seed);

}  // namespace hybridq::report
