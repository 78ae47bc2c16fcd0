#pragma once

// Machine-readable (JSON/CSV) and aligned plain-text renderings of reports.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include <json.hpp>

#include "kgeval/eval.hpp"
#include "kgeval/graph.hpp"

namespace kgeval {

nlohmann::json to_json(const GraphStats& s);
nlohmann::json to_json(const StatsReport& r);
// One train-graph row and one test-graph row per dataset.
std::string stats_table(std::span<const StatsReport> reports);

nlohmann::json to_json(const MetricSummary& s);
nlohmann::json to_json(const MetricReport& r);
MetricSummary summary_from_json(const nlohmann::json& j);
MetricReport report_from_json(const nlohmann::json& j);

// Columns: dataset,model,protocol,direction,metric,k,value
void write_report_csv(std::ostream& out, std::span<const MetricReport> reports);
std::string report_table(std::span<const MetricReport> reports);

// Columns: model,protocol,metric,k,value,delta
void write_delta_csv(std::ostream& out, std::span<const DeltaRow> rows);

// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace kgeval
