#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "alexbench/harness/experiment.hpp"

namespace alexbench::harness {

// report.csv: a "# key=value" block echoing the configuration, then
//   repetition,iteration,strategy,labeled_count,test_accuracy,wall_ms
// with accuracies printed to 17 significant digits.
std::string format_report_csv(const RunReport& report);
void write_report_csv(const RunReport& report, const std::filesystem::path& path);

struct ParsedReport {
  std::vector<std::pair<std::string, std::string>> echo;
  std::vector<IterationRecord> records;  // selection summaries are not part of the CSV
};

ParsedReport parse_report_csv(const std::string& text);
ParsedReport read_report_csv(const std::filesystem::path& path);

// Rebuilds the configuration from an echo block.
ALConfig config_from_echo(const std::vector<std::pair<std::string, std::string>>& echo);

// selection.csv: per-iteration means of the chosen batch's scores.
std::string format_selection_csv(const RunReport& report);

// Writes `text` to `path` through a temporary file; throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace alexbench::harness
