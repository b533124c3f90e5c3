#include "alexbench/output/curves.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>

#include "alexbench/error.hpp"
#include "alexbench/harness/report.hpp"

namespace alexbench::output {
namespace {

constexpr const char* kHeader = "strategy,repetition,iteration,labeled_count,test_accuracy";

std::string row(std::string_view strategy, const std::string& rep, std::size_t iteration, std::size_t labeled,
                double accuracy) {
  char acc[40];
  std::snprintf(acc, sizeof acc, "%.17g", accuracy);
  return std::string(strategy) + "," + rep + "," + std::to_string(iteration) + "," + std::to_string(labeled) + "," +
         acc + "\n";
}

}  // namespace

std::string format_curves(const harness::RunReport& report) {
  if (report.records.empty()) throw Error(ErrorCode::InvalidValue, "report has no records");
  std::string out = std::string(kHeader) + "\n";
  for (const auto& r : report.records) {
    out += row(strategies::to_string(r.strategy), std::to_string(r.repetition), r.iteration, r.labeled_count,
               r.test_accuracy);
  }

  struct Acc {
    double sum = 0.0;
    std::size_t n = 0;
    std::size_t labeled = 0;
  };
  // Strategy order follows first appearance in the report.
  std::vector<strategies::StrategyId> order;
  std::map<std::pair<int, std::size_t>, Acc> means;
  for (const auto& r : report.records) {
    if (std::find(order.begin(), order.end(), r.strategy) == order.end()) order.push_back(r.strategy);
    auto& a = means[{static_cast<int>(r.strategy), r.iteration}];
    a.sum += r.test_accuracy;
    a.labeled = r.labeled_count;
    ++a.n;
  }
  for (auto s : order) {
    for (const auto& [key, a] : means) {
      if (key.first != static_cast<int>(s)) continue;
      out += row(strategies::to_string(s), "mean", key.second, a.labeled, a.sum / static_cast<double>(a.n));
    }
  }
  return out;
}

void export_curves(const harness::RunReport& report, const std::filesystem::path& path) {
  harness::write_text_file(path, format_curves(report));
}

std::vector<CurveRow> parse_curves(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw Error(ErrorCode::InvalidValue, "bad curves header");
  std::vector<CurveRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream cells(line);
    std::string f[5];
    for (auto& c : f) {
      if (!std::getline(cells, c, ',')) throw Error(ErrorCode::InvalidValue, "short curves row: " + line);
    }
    CurveRow r;
    r.strategy = f[0];
    r.repetition = f[1];
    r.iteration = std::strtoull(f[2].c_str(), nullptr, 10);
    r.labeled_count = std::strtoull(f[3].c_str(), nullptr, 10);
    r.test_accuracy = std::strtod(f[4].c_str(), nullptr);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace alexbench::output
