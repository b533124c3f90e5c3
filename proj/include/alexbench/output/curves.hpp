#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "alexbench/harness/experiment.hpp"

namespace alexbench::output {

// strategy,repetition,iteration,labeled_count,test_accuracy
// One row per record, then per (strategy, iteration) a row with repetition
// "mean" holding the mean over repetitions.
std::string format_curves(const harness::RunReport& report);
void export_curves(const harness::RunReport& report, const std::filesystem::path& path);

struct CurveRow {
  std::string strategy;
  std::string repetition;  // number or "mean"
  std::size_t iteration = 0;
  std::size_t labeled_count = 0;
  double test_accuracy = 0.0;
};

std::vector<CurveRow> parse_curves(const std::string& text);

}  // namespace alexbench::output
