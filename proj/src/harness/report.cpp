#include "alexbench/harness/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "alexbench/error.hpp"

namespace alexbench::harness {
namespace {

constexpr const char* kColumns = "repetition,iteration,strategy,labeled_count,test_accuracy,wall_ms";

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::uint64_t to_uint(const std::string& s) {
  char* end = nullptr;
  const auto v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) throw Error(ErrorCode::InvalidValue, "bad integer '" + s + "'");
  return v;
}

}  // namespace

std::string format_report_csv(const RunReport& report) {
  std::string out = "# alexbench report\n";
  for (const auto& [k, v] : report.config.echo()) out += "# " + k + "=" + v + "\n";
  for (std::size_t r = 0; r < report.config.repetitions; ++r) {
    out += "# rep-seed." + std::to_string(r) + "=" + std::to_string(report.config.repetition_seed(r)) + "\n";
  }
  out += kColumns;
  out += '\n';
  for (const auto& rec : report.records) {
    out += std::to_string(rec.repetition) + "," + std::to_string(rec.iteration) + "," +
           std::string(strategies::to_string(rec.strategy)) + "," + std::to_string(rec.labeled_count) + "," +
           g17(rec.test_accuracy) + "," + std::to_string(rec.wall_ms) + "\n";
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.empty()) throw Error(ErrorCode::IoError, "output path is empty");
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw Error(ErrorCode::IoError, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot create " + path.string());
  }
}

void write_report_csv(const RunReport& report, const std::filesystem::path& path) {
  write_text_file(path, format_report_csv(report));
}

ParsedReport parse_report_csv(const std::string& text) {
  ParsedReport parsed;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (line.rfind("# ", 0) == 0 && eq != std::string::npos) {
        parsed.echo.emplace_back(line.substr(2, eq - 2), line.substr(eq + 1));
      }
      continue;
    }
    if (!header) {
      if (line != kColumns) throw Error(ErrorCode::InvalidValue, "unexpected report header: " + line);
      header = true;
      continue;
    }
    const auto cells = split_commas(line);
    if (cells.size() != 6) throw Error(ErrorCode::InvalidValue, "report row has wrong width: " + line);
    IterationRecord rec;
    rec.repetition = to_uint(cells[0]);
    rec.iteration = to_uint(cells[1]);
    rec.strategy = strategies::parse_strategy(cells[2]);
    rec.labeled_count = to_uint(cells[3]);
    char* end = nullptr;
    rec.test_accuracy = std::strtod(cells[4].c_str(), &end);
    if (cells[4].empty() || end != cells[4].c_str() + cells[4].size()) {
      throw Error(ErrorCode::InvalidValue, "bad accuracy '" + cells[4] + "'");
    }
    rec.wall_ms = static_cast<std::int64_t>(std::strtoll(cells[5].c_str(), nullptr, 10));
    parsed.records.push_back(rec);
  }
  if (!header) throw Error(ErrorCode::InvalidValue, "report has no header row");
  return parsed;
}

ParsedReport read_report_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_report_csv(ss.str());
}

ALConfig config_from_echo(const std::vector<std::pair<std::string, std::string>>& echo) {
  ALConfig cfg;
  for (const auto& [k, v] : echo) {
    if (is_experiment_key(k)) apply_setting(cfg, k, v);
  }
  cfg.validate();
  return cfg;
}

std::string format_selection_csv(const RunReport& report) {
  std::string out = "strategy,repetition,iteration,chosen,mean_confidence,mean_margin,mean_divergence,mean_distance\n";
  for (const auto& rec : report.records) {
    const auto& s = rec.selection;
    out += std::string(strategies::to_string(rec.strategy)) + "," + std::to_string(rec.repetition) + "," +
           std::to_string(rec.iteration) + "," + std::to_string(s.chosen) + "," + g17(s.mean_confidence) + "," +
           g17(s.mean_margin) + "," + g17(s.mean_divergence) + "," + g17(s.mean_distance) + "\n";
  }
  return out;
}

}  // namespace alexbench::harness
