#include "alexbench/cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>

#include "alexbench/error.hpp"
#include "alexbench/explainer/divergence.hpp"
#include "alexbench/harness/report.hpp"
#include "alexbench/output/curves.hpp"
#include "alexbench/output/heatmap.hpp"

namespace alexbench::cli {
namespace {

constexpr std::string_view kRunKeys[] = {"out-dir", "data-dir", "heatmaps"};

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t parse_count(std::string_view key, const std::string& value) {
  char* end = nullptr;
  const auto v = std::strtoull(value.c_str(), &end, 10);
  if (value.empty() || value[0] == '-' || end != value.c_str() + value.size()) {
    throw Error(ErrorCode::InvalidValue, std::string(key) + "='" + value + "' is not a non-negative integer");
  }
  return v;
}

void apply_run_setting(CliConfig& cfg, std::string_view key, const std::string& value) {
  if (key == "out-dir") cfg.out_dir = value;
  else if (key == "data-dir") cfg.data_dir = value;
  else if (key == "heatmaps") cfg.heatmaps = parse_count(key, value);
  else harness::apply_setting(cfg.experiment, key, value);
}

std::filesystem::path resolve_data_dir(const CliConfig& cfg) {
  if (!cfg.data_dir.empty()) return cfg.data_dir;
  if (const char* env = std::getenv("ALEXBENCH_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return "data";
}

[[noreturn]] void rethrow_parse_error(const CLI::ParseError& e) {
  const std::string what = e.what();
  if (dynamic_cast<const CLI::ExtrasError*>(&e) != nullptr) throw Error(ErrorCode::UnknownFlag, what);
  if (dynamic_cast<const CLI::RequiredError*>(&e) != nullptr) throw Error(ErrorCode::MissingConfig, what);
  if (what.find("not a subcommand") != std::string::npos || what.find("was not expected") != std::string::npos) {
    throw Error(ErrorCode::UnknownFlag, what);
  }
  throw Error(ErrorCode::InvalidValue, what);
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
}

int do_run(const CliConfig& cfg, std::ostream& log) {
  const auto& exp = cfg.experiment;
  const auto data_dir = resolve_data_dir(cfg) / exp.dataset;
  log << "loading " << data_dir.string() << "\n";
  const auto data = harness::ExperimentData::load(data_dir);

  ensure_dir(cfg.out_dir);
  const auto ckpt_dir = cfg.out_dir / "checkpoints";
  if (cfg.fresh) std::filesystem::remove_all(ckpt_dir);
  const auto heat_dir = cfg.out_dir / "heatmaps";
  if (cfg.heatmaps > 0) ensure_dir(heat_dir);

  std::mutex log_mutex;
  harness::RunOptions options;
  options.checkpoint_dir = ckpt_dir;
  if (cfg.heatmaps > 0) {
    options.on_final = [&](const harness::RunState& state, const model::ClassifierModel& model) {
      if (state.repetition != 0) return;
      const auto files = render_class_heatmaps(exp, data, model, state.labeled, state.repetition, cfg.heatmaps,
                                               heat_dir, strategies::to_string(state.strategy));
      std::lock_guard lock(log_mutex);
      log << "wrote " << files.size() << " heatmaps for " << strategies::to_string(state.strategy) << "\n";
    };
  }
  log << "running " << exp.strategies.size() << " strategies x " << exp.repetitions << " repetitions, p="
      << exp.p << " b=" << exp.batch_size() << " k=" << exp.candidate_size() << "\n";
  const auto report = harness::run_experiment(exp, data, options);

  const auto report_path = cfg.out_dir / "report.csv";
  harness::write_report_csv(report, report_path);
  output::export_curves(report, cfg.out_dir / "curves.csv");
  harness::write_text_file(cfg.out_dir / "selection.csv", harness::format_selection_csv(report));

  const auto reread = harness::read_report_csv(report_path);
  const std::size_t expected = exp.strategies.size() * exp.repetitions * (exp.p + 1);
  if (reread.records.size() != expected) {
    throw Error(ErrorCode::IoError, "report.csv holds " + std::to_string(reread.records.size()) +
                                        " records, expected " + std::to_string(expected));
  }
  if (cfg.heatmaps > 0) {
    std::size_t files = 0;
    for (const auto& entry : std::filesystem::directory_iterator(heat_dir)) files += entry.path().extension() == ".ppm";
    if (files < exp.strategies.size() * exp.classes * cfg.heatmaps) {
      throw Error(ErrorCode::IoError, "fewer heatmaps than requested in " + heat_dir.string());
    }
  }
  log << "wrote " << report_path.string() << "\n";
  return 0;
}

int do_render(const CliConfig& cfg, std::ostream& log) {
  const auto parsed = harness::read_report_csv(cfg.out_dir / "report.csv");
  const auto exp = harness::config_from_echo(parsed.echo);
  const auto data = harness::ExperimentData::load(resolve_data_dir(cfg) / exp.dataset);
  std::vector<strategies::StrategyId> wanted;
  if (cfg.render_strategies.empty()) {
    wanted = exp.strategies;
  } else {
    for (const auto& s : cfg.render_strategies) wanted.push_back(strategies::parse_strategy(s));
  }
  const auto heat_dir = cfg.out_dir / "heatmaps";
  ensure_dir(heat_dir);
  const std::size_t per_class = cfg.heatmaps == 0 ? 1 : cfg.heatmaps;
  for (auto s : wanted) {
    const auto path = harness::checkpoint_path(cfg.out_dir / "checkpoints", s, cfg.render_repetition);
    const auto state = harness::load_checkpoint(path);
    if (state.config_digest != exp.digest() || !state.finished(exp)) {
      throw Error(ErrorCode::InvalidConfig, path.string() + " is not a finished run of this report");
    }
    const auto model = harness::train_iteration_model(exp, data, state.labeled, state.repetition, exp.p);
    const auto files = render_class_heatmaps(exp, data, model, state.labeled, state.repetition, per_class, heat_dir,
                                             strategies::to_string(s));
    log << "wrote " << files.size() << " heatmaps for " << strategies::to_string(s) << "\n";
  }
  return 0;
}

int do_export(const CliConfig& cfg, std::ostream& log) {
  const auto in = cfg.report_path.empty() ? cfg.out_dir / "report.csv" : cfg.report_path;
  const auto out = cfg.curves_path.empty() ? cfg.out_dir / "curves.csv" : cfg.curves_path;
  const auto parsed = harness::read_report_csv(in);
  harness::RunReport report;
  report.config = harness::config_from_echo(parsed.echo);
  report.records = parsed.records;
  output::export_curves(report, out);
  log << "wrote " << out.string() << "\n";
  return 0;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingConfig, "config file " + path.string() + " not found");
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::InvalidValue, path.string() + ":" + std::to_string(n) + ": expected key=value");
    }
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

CliConfig parse_args(int argc, const char* const* argv) {
  CLI::App app{"Active learning benchmark with explanation-guided selection", "alexbench"};
  app.require_subcommand(1);
  app.fallthrough(false);

  auto* fetch = app.add_subcommand("fetch", "download a dataset into the data directory");
  auto* run = app.add_subcommand("run", "run the bootstrapping experiment and write report.csv");
  auto* render = app.add_subcommand("render", "render heatmaps from a finished run's checkpoints");
  auto* exportc = app.add_subcommand("export", "write accuracy curves from report.csv");

  CliConfig cfg;
  std::string config_file, fetch_dataset_name = "mnist", fetch_data_dir, render_out = "out", render_data_dir,
                           export_out = "out", export_report, export_curves;
  std::size_t render_heatmaps = 1;

  fetch->add_option("--dataset", fetch_dataset_name, "mnist or fmnist")->check(CLI::IsMember({"mnist", "fmnist"}));
  fetch->add_option("--data-dir", fetch_data_dir, "data root (default $ALEXBENCH_DATA_DIR or ./data)");
  fetch->add_option("--url", cfg.url, "base URL holding the *-ubyte.gz files");

  run->add_option("--config", config_file, "flat key=value config file; flags override it");
  std::map<std::string, std::string> flag_values;
  for (auto key : harness::experiment_keys()) {
    run->add_option("--" + std::string(key), flag_values[std::string(key)]);
  }
  for (auto key : kRunKeys) run->add_option("--" + std::string(key), flag_values[std::string(key)]);
  run->add_flag("--fresh", cfg.fresh, "ignore checkpoints left by an earlier run");

  render->add_option("--out-dir", render_out, "directory of a finished run");
  render->add_option("--data-dir", render_data_dir, "data root");
  render->add_option("--strategy", cfg.render_strategies, "strategies to render (default: all in the report)");
  render->add_option("--rep", cfg.render_repetition, "repetition to render");
  render->add_option("--heatmaps", render_heatmaps, "test images per class");

  exportc->add_option("--out-dir", export_out, "directory of a finished run");
  exportc->add_option("--report", export_report, "report.csv to read");
  exportc->add_option("--output", export_curves, "curves CSV to write");

  if (argc <= 1) throw UsageExit{2, app.help()};
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* target = &app;
    for (auto* sub : {fetch, run, render, exportc}) {
      if (sub->parsed()) target = sub;
    }
    throw UsageExit{0, target->help()};
  } catch (const CLI::CallForAllHelp&) {
    throw UsageExit{0, app.help("", CLI::AppFormatMode::All)};
  } catch (const CLI::ParseError& e) {
    rethrow_parse_error(e);
  }

  if (fetch->parsed()) {
    cfg.command = Command::Fetch;
    cfg.experiment.dataset = fetch_dataset_name;
    cfg.data_dir = fetch_data_dir;
  } else if (run->parsed()) {
    cfg.command = Command::Run;
    if (!config_file.empty()) {
      cfg.config_file = config_file;
      for (const auto& [k, v] : read_config_file(config_file)) {
        const bool run_key = std::find(std::begin(kRunKeys), std::end(kRunKeys), k) != std::end(kRunKeys);
        if (!run_key && !harness::is_experiment_key(k)) {
          throw Error(ErrorCode::UnknownFlag, "unknown key '" + k + "' in " + config_file);
        }
        apply_run_setting(cfg, k, v);
      }
    }
    for (auto key : harness::experiment_keys()) {
      if (run->count("--" + std::string(key)) > 0) apply_run_setting(cfg, key, flag_values[std::string(key)]);
    }
    for (auto key : kRunKeys) {
      if (run->count("--" + std::string(key)) > 0) apply_run_setting(cfg, key, flag_values[std::string(key)]);
    }
    cfg.experiment.validate();
  } else if (render->parsed()) {
    cfg.command = Command::Render;
    cfg.out_dir = render_out;
    cfg.data_dir = render_data_dir;
    cfg.heatmaps = render_heatmaps;
    for (const auto& s : cfg.render_strategies) strategies::parse_strategy(s);
  } else {
    cfg.command = Command::Export;
    cfg.out_dir = export_out;
    cfg.report_path = export_report;
    cfg.curves_path = export_curves;
  }
  return cfg;
}

std::vector<std::filesystem::path> render_class_heatmaps(const harness::ALConfig& cfg,
                                                         const harness::ExperimentData& data,
                                                         const model::ClassifierModel& model,
                                                         const data::LabeledPool& labeled, std::size_t repetition,
                                                         std::size_t per_class, const std::filesystem::path& dir,
                                                         std::string_view prefix) {
  const auto surrogate = harness::fit_iteration_surrogate(cfg, data, model, labeled, repetition, cfg.p);
  const auto& test = *data.test;
  std::vector<std::filesystem::path> written;
  for (std::size_t c = 0; c < cfg.classes; ++c) {
    std::size_t taken = 0;
    for (std::size_t i = 0; i < test.size() && taken < per_class; ++i) {
      if (test.labels[i] != c) continue;
      const auto x = data::feature_vector(test.images, static_cast<data::SourceIndex>(i));
      const auto e = explainer::explanation_vector(surrogate, x, model);
      const auto path =
          dir / (std::string(prefix) + "-class" + std::to_string(c) + "-" + std::to_string(taken) + ".ppm");
      output::render_heatmap(x, e, surrogate.grid, path);
      written.push_back(path);
      ++taken;
    }
  }
  return written;
}

int run_all(const CliConfig& cfg, std::ostream& log) {
  switch (cfg.command) {
    case Command::Fetch: {
      const auto dest = resolve_data_dir(cfg) / cfg.experiment.dataset;
      fetch_dataset(cfg.experiment.dataset, cfg.url.empty() ? default_url(cfg.experiment.dataset) : cfg.url, dest,
                    log);
      return 0;
    }
    case Command::Run:
      return do_run(cfg, log);
    case Command::Render:
      return do_render(cfg, log);
    case Command::Export:
      return do_export(cfg, log);
  }
  return 1;
}

int main_with(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CliConfig cfg;
  try {
    cfg = parse_args(argc, argv);
  } catch (const UsageExit& u) {
    (u.status == 0 ? out : err) << u.text;
    return u.status;
  } catch (const Error& e) {
    err << "alexbench: " << e.what() << "\n";
    return 2;
  }
  try {
    return run_all(cfg, out);
  } catch (const Error& e) {
    err << "alexbench: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "alexbench: " << e.what() << "\n";
  }
  return 1;
}

}  // namespace alexbench::cli
