#include <doctest.h>

#include <fstream>
#include <sstream>

#include "alexbench/cli/cli.hpp"
#include "alexbench/error.hpp"
#include "alexbench/harness/report.hpp"
#include "alexbench/output/curves.hpp"
#include "support/expect.hpp"
#include "support/testing.hpp"

using namespace alexbench;
using namespace alexbench::cli;
using namespace testing_support;
using strategies::StrategyId;

namespace {

struct Argv {
  std::vector<std::string> words;
  std::vector<const char*> ptrs;

  explicit Argv(std::vector<std::string> w) : words(std::move(w)) {
    words.insert(words.begin(), "alexbench");
    for (const auto& s : words) ptrs.push_back(s.c_str());
  }
  int argc() const { return static_cast<int>(ptrs.size()); }
  const char* const* argv() const { return ptrs.data(); }
};

CliConfig parse(std::vector<std::string> words) {
  Argv a(std::move(words));
  return parse_args(a.argc(), a.argv());
}

int invoke(std::vector<std::string> words, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  Argv a(std::move(words));
  std::ostringstream out, err;
  const int status = main_with(a.argc(), a.argv(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return status;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::string> tiny_run(const std::filesystem::path& out) {
  return {"run",      "--data-dir", fixture("data").string(), "--out-dir", out.string(), "--q", "2", "--p", "2",
          "--epochs", "2",          "--samples",             "8",         "--patch",     "7",   "--reps", "1"};
}

}  // namespace

TEST_CASE("run flags map onto the configuration") {
  const auto cfg = parse({"run", "--dataset", "mnist", "--strategy", "alex", "--q", "10", "--p", "10", "--seed", "7"});
  CHECK(cfg.command == Command::Run);
  CHECK(cfg.experiment.strategies == std::vector<StrategyId>{StrategyId::Alex});
  CHECK(cfg.experiment.candidate_size() == 300);
  CHECK(cfg.experiment.batch_size() == 100);
  CHECK(cfg.experiment.seed == 7);
  CHECK(cfg.out_dir == "out");

  const auto all = parse({"run", "--strategy", "all", "--arch", "conv", "--jobs", "2", "--fresh"});
  CHECK(all.experiment.strategies.size() == 5);
  CHECK(all.experiment.arch == model::ArchKind::Conv);
  CHECK(all.experiment.jobs == 2);
  CHECK(all.fresh);
}

TEST_CASE("bad invocations map to typed errors") {
  CHECK(code_of([] { parse({"run", "--q", "0"}); }) == ErrorCode::InvalidValue);
  CHECK(code_of([] { parse({"run", "--q", "ten"}); }) == ErrorCode::InvalidValue);
  CHECK(code_of([] { parse({"run", "--frobnicate", "1"}); }) == ErrorCode::UnknownFlag);
  CHECK(code_of([] { parse({"run", "--arch", "rnn"}); }) == ErrorCode::InvalidValue);
  CHECK(code_of([] { parse({"run", "--config", "/nonexistent/cfg.txt"}); }) == ErrorCode::MissingConfig);
  CHECK(code_of([] { parse({"render", "--strategy", "nope"}); }) == ErrorCode::InvalidValue);
  CHECK(code_of([] { parse({"fetch", "--dataset", "cifar"}); }) == ErrorCode::InvalidValue);
}

TEST_CASE("usage and exit statuses") {
  std::string out, err;
  CHECK(invoke({}, &out, &err) == 2);
  CHECK(err.find("run") != std::string::npos);
  CHECK(invoke({"--help"}, &out, &err) == 0);
  CHECK(out.find("export") != std::string::npos);
  CHECK(invoke({"run", "--help"}, &out, &err) == 0);
  CHECK(out.find("--candidate-multiplier") != std::string::npos);
  CHECK(invoke({"run", "--q", "0"}, &out, &err) == 2);
  CHECK(err.find("InvalidValue") != std::string::npos);
  CHECK(invoke({"dance"}, &out, &err) == 2);
  CHECK(invoke({"export", "--report", "/nonexistent/r.csv"}, &out, &err) == 1);
  CHECK(err.find("IoError") != std::string::npos);
}

TEST_CASE("config files with flag overrides") {
  TempDir dir("cfg");
  const auto path = dir.path / "exp.cfg";
  std::ofstream(path) << "# experiment\nq = 3\np=4\nstrategy=rs,dw  # two\nheatmaps=2\n\nseed=11\n";
  const auto cfg = parse({"run", "--config", path.string(), "--p", "6"});
  CHECK(cfg.config_file == path);
  CHECK(cfg.experiment.q == 3);
  CHECK(cfg.experiment.p == 6);
  CHECK(cfg.experiment.seed == 11);
  CHECK(cfg.heatmaps == 2);
  CHECK(cfg.experiment.strategies == std::vector<StrategyId>{StrategyId::Random, StrategyId::DensityWeighted});

  std::ofstream(path) << "q 3\n";
  CHECK(code_of([&] { parse({"run", "--config", path.string()}); }) == ErrorCode::InvalidValue);
  std::ofstream(path) << "colour=red\n";
  CHECK(code_of([&] { parse({"run", "--config", path.string()}); }) == ErrorCode::UnknownFlag);
  CHECK(read_config_file(path).size() == 1);
}

TEST_CASE("run writes every artifact and reruns reproduce it") {
  TempDir dir("run");
  auto args = tiny_run(dir.path / "a");
  args.insert(args.end(), {"--strategy", "alex,rs", "--heatmaps", "1"});
  std::string out, err;
  REQUIRE(invoke(args, &out, &err) == 0);
  CHECK(err.empty());
  const auto a = dir.path / "a";
  for (const char* f : {"report.csv", "curves.csv", "selection.csv"}) CHECK(std::filesystem::exists(a / f));
  const auto report = harness::read_report_csv(a / "report.csv");
  CHECK(report.records.size() == 2 * 3);
  std::size_t ppm = 0;
  for (const auto& e : std::filesystem::directory_iterator(a / "heatmaps")) ppm += e.path().extension() == ".ppm";
  CHECK(ppm == 20);
  CHECK(std::filesystem::exists(a / "heatmaps" / "alex-class0-0.ppm"));
  CHECK(std::filesystem::exists(a / "checkpoints" / "run-rs-rep0.ckpt"));

  auto again = tiny_run(dir.path / "b");
  again.insert(again.end(), {"--strategy", "alex,rs", "--heatmaps", "1", "--jobs", "2"});
  REQUIRE(invoke(again, &out, &err) == 0);
  const auto b = dir.path / "b";
  CHECK(slurp(a / "report.csv") == slurp(b / "report.csv"));
  CHECK(slurp(a / "curves.csv") == slurp(b / "curves.csv"));
  CHECK(slurp(a / "heatmaps" / "alex-class3-0.ppm") == slurp(b / "heatmaps" / "alex-class3-0.ppm"));

  // A finished run resumes from its checkpoints and rewrites identical files.
  REQUIRE(invoke(args, &out, &err) == 0);
  CHECK(slurp(a / "report.csv") == slurp(b / "report.csv"));
  args.push_back("--fresh");
  REQUIRE(invoke(args, &out, &err) == 0);
  CHECK(slurp(a / "report.csv") == slurp(b / "report.csv"));

  // A different configuration in the same directory is refused unless --fresh.
  auto changed = tiny_run(dir.path / "a");
  changed.insert(changed.end(), {"--strategy", "alex,rs", "--seed", "5"});
  CHECK(invoke(changed, &out, &err) == 1);
  CHECK(err.find("InvalidConfig") != std::string::npos);
}

TEST_CASE("render and export operate on a finished run") {
  TempDir dir("render");
  auto args = tiny_run(dir.path);
  args.insert(args.end(), {"--strategy", "us-m"});
  REQUIRE(invoke(args) == 0);
  CHECK_FALSE(std::filesystem::exists(dir.path / "heatmaps"));

  std::string out, err;
  REQUIRE(invoke({"render", "--out-dir", dir.path.string(), "--data-dir", fixture("data").string()}, &out, &err) == 0);
  std::size_t ppm = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir.path / "heatmaps")) ppm += e.path().extension() == ".ppm";
  CHECK(ppm == 10);
  CHECK(invoke({"render", "--out-dir", dir.path.string(), "--data-dir", fixture("data").string(), "--strategy",
                "alex"},
               &out, &err) == 1);

  const auto curves = dir.path / "c.csv";
  REQUIRE(invoke({"export", "--out-dir", dir.path.string(), "--output", curves.string()}) == 0);
  const auto rows = output::parse_curves(slurp(curves));
  CHECK(rows.size() == 3 + 3);
}

TEST_CASE("missing data is a runtime failure") {
  TempDir dir("nodata");
  std::string err;
  CHECK(invoke({"run", "--data-dir", (dir.path / "void").string(), "--out-dir", (dir.path / "o").string()}, nullptr,
               &err) == 1);
  CHECK(err.find("IoError") != std::string::npos);
}

TEST_CASE("fetch downloads, stores and verifies the archives") {
  TempDir dir("fetch");
  const std::string url = "file://" + fixture("mirror").string();
  std::string out, err;
  REQUIRE(invoke({"fetch", "--dataset", "mnist", "--data-dir", dir.path.string(), "--url", url}, &out, &err) == 0);
  CHECK(out.find("120 train, 50 test") != std::string::npos);
  const auto train = data::load_split(dir.path / "mnist", data::Split::Train);
  CHECK(train.size() == 120);
  CHECK(invoke({"fetch", "--data-dir", dir.path.string(), "--url", "file:///nonexistent/"}, &out, &err) == 1);
  CHECK(default_url("mnist").starts_with("https://"));
  CHECK(code_of([] { default_url("cifar"); }) == ErrorCode::InvalidValue);
}
