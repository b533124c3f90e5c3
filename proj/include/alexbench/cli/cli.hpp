#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "alexbench/harness/config.hpp"
#include "alexbench/harness/experiment.hpp"

namespace alexbench::cli {

enum class Command { Fetch, Run, Render, Export };

struct CliConfig {
  Command command = Command::Run;
  std::filesystem::path config_file;      // empty when none given
  harness::ALConfig experiment;           // file settings, then flag overrides
  std::filesystem::path out_dir = "out";
  std::filesystem::path data_dir;         // root holding <dataset>/ subdirectories
  std::size_t heatmaps = 0;               // test images per class to render (run, render)
  bool fresh = false;                     // run: ignore existing checkpoints

  std::string url;                        // fetch: base URL, empty for the default mirror
  std::vector<std::string> render_strategies;  // render: empty means every strategy in the report
  std::size_t render_repetition = 0;
  std::filesystem::path report_path;      // export input, default <out-dir>/report.csv
  std::filesystem::path curves_path;      // export output, default <out-dir>/curves.csv
};

// Thrown by parse_args when it prints usage instead of producing a config.
struct UsageExit {
  int status = 0;
  std::string text;
};

// Throws UsageExit for --help or no arguments (status 2), Error with
// UnknownFlag, InvalidValue or MissingConfig otherwise.
CliConfig parse_args(int argc, const char* const* argv);

// Flat key=value lines; '#' starts a comment. Throws MissingConfig when the
// file is absent and InvalidValue on a malformed line.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path);

// Executes a parsed command. Returns 0 when every artifact was written and
// re-read successfully; errors propagate as exceptions.
int run_all(const CliConfig& cfg, std::ostream& log);

// parse_args + run_all with diagnostics mapped to exit statuses:
// 0 success, 1 runtime failure, 2 usage error.
int main_with(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

std::string default_url(std::string_view dataset);

// Downloads the four IDX archives of `dataset` from `base_url` into `dest`
// and checks that they parse.
void fetch_dataset(std::string_view dataset, const std::string& base_url, const std::filesystem::path& dest,
                   std::ostream& log);

// Explains the first `per_class` test images of each class with the model and
// a surrogate fitted on `labeled`, writing one PPM per image to `dir`.
std::vector<std::filesystem::path> render_class_heatmaps(const harness::ALConfig& cfg,
                                                         const harness::ExperimentData& data,
                                                         const model::ClassifierModel& model,
                                                         const data::LabeledPool& labeled, std::size_t repetition,
                                                         std::size_t per_class, const std::filesystem::path& dir,
                                                         std::string_view prefix);

}  // namespace alexbench::cli
