#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "alexbench/error.hpp"
#include "alexbench/harness/experiment.hpp"

// Text checkpoint of one run. The last line is "digest <hex>", the FNV-1a hash
// of every byte before it. Doubles are stored as hexfloats so they round-trip.

namespace alexbench::harness {
namespace {

constexpr const char* kMagic = "alexbench-checkpoint 1";

std::string hex_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

[[noreturn]] void corrupt(const std::string& what) { throw Error(ErrorCode::CorruptCheckpoint, what); }

class Reader {
 public:
  explicit Reader(const std::string& body) : in_(body) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) corrupt("unexpected end of checkpoint");
    return w;
  }
  void expect(const char* key) {
    if (word() != key) corrupt(std::string("expected '") + key + "'");
  }
  std::uint64_t number() {
    const std::string w = word();
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(w.c_str(), &end, 10);
    if (errno != 0 || end != w.c_str() + w.size() || w.empty() || w[0] == '-') corrupt("bad integer '" + w + "'");
    return v;
  }
  std::int64_t signed_number() {
    const std::string w = word();
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(w.c_str(), &end, 10);
    if (errno != 0 || end != w.c_str() + w.size()) corrupt("bad integer '" + w + "'");
    return v;
  }
  double real() {
    const std::string w = word();
    char* end = nullptr;
    const double v = std::strtod(w.c_str(), &end);
    if (end != w.c_str() + w.size()) corrupt("bad real '" + w + "'");
    return v;
  }

 private:
  std::istringstream in_;
};

}  // namespace

std::filesystem::path checkpoint_path(const std::filesystem::path& dir, strategies::StrategyId strategy,
                                      std::size_t repetition) {
  return dir / ("run-" + std::string(strategies::to_string(strategy)) + "-rep" + std::to_string(repetition) + ".ckpt");
}

void save_checkpoint(const RunState& state, const std::filesystem::path& path) {
  if (path.empty()) throw Error(ErrorCode::IoError, "checkpoint path is empty");
  std::ostringstream out;
  out << kMagic << '\n';
  char digest[32];
  std::snprintf(digest, sizeof digest, "%016llx", static_cast<unsigned long long>(state.config_digest));
  out << "config " << digest << '\n';
  out << "strategy " << strategies::to_string(state.strategy) << '\n';
  out << "repetition " << state.repetition << '\n';
  out << "next-iteration " << state.next_iteration << '\n';
  out << "labeled " << state.labeled.size() << '\n';
  for (const auto& e : state.labeled.entries()) out << e.index << ' ' << int(e.label) << '\n';
  out << "unlabeled " << state.unlabeled.size() << '\n';
  for (auto i : state.unlabeled.indices()) out << i << '\n';
  out << "records " << state.records.size() << '\n';
  for (const auto& r : state.records) {
    out << r.iteration << ' ' << r.labeled_count << ' ' << r.unlabeled_count << ' ' << hex_double(r.test_accuracy)
        << ' ' << r.wall_ms << ' ' << r.selection.chosen << ' ' << hex_double(r.selection.mean_confidence) << ' '
        << hex_double(r.selection.mean_margin) << ' ' << hex_double(r.selection.mean_divergence) << ' '
        << hex_double(r.selection.mean_distance) << '\n';
  }
  std::string body = out.str();
  std::snprintf(digest, sizeof digest, "%016llx", static_cast<unsigned long long>(fnv1a64(body)));
  body += "digest ";
  body += digest;
  body += '\n';

  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!f) throw Error(ErrorCode::IoError, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot rename checkpoint into " + path.string());
  }
}

RunState load_checkpoint(const std::filesystem::path& path) {
  if (path.empty()) throw Error(ErrorCode::IoError, "checkpoint path is empty");
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

  if (text.empty() || text.back() != '\n') corrupt("missing digest line");
  const auto cut = text.rfind('\n', text.size() - 2);
  if (cut == std::string::npos) corrupt("missing digest line");
  const std::string body = text.substr(0, cut + 1);
  const std::string tail = text.substr(cut + 1);
  char expected[64];
  std::snprintf(expected, sizeof expected, "digest %016llx\n", static_cast<unsigned long long>(fnv1a64(body)));
  if (tail != expected) corrupt("digest mismatch in " + path.string());

  Reader r(body);
  if (r.word() != "alexbench-checkpoint" || r.word() != "1") corrupt("not a checkpoint");
  RunState s;
  r.expect("config");
  {
    const std::string w = r.word();
    char* end = nullptr;
    s.config_digest = std::strtoull(w.c_str(), &end, 16);
    if (w.size() != 16 || end != w.c_str() + w.size()) corrupt("bad config digest");
  }
  r.expect("strategy");
  try {
    s.strategy = strategies::parse_strategy(r.word());
  } catch (const Error&) {
    corrupt("unknown strategy");
  }
  r.expect("repetition");
  s.repetition = r.number();
  r.expect("next-iteration");
  s.next_iteration = r.number();

  r.expect("labeled");
  std::vector<data::LabeledEntry> labeled(r.number());
  for (auto& e : labeled) {
    e.index = static_cast<data::SourceIndex>(r.number());
    const auto label = r.number();
    if (label > 255) corrupt("bad label");
    e.label = static_cast<std::uint8_t>(label);
  }
  r.expect("unlabeled");
  std::vector<data::SourceIndex> unlabeled(r.number());
  for (auto& i : unlabeled) i = static_cast<data::SourceIndex>(r.number());
  try {
    s.labeled = data::LabeledPool(std::move(labeled));
    s.unlabeled = data::UnlabeledPool(std::move(unlabeled));
  } catch (const Error& e) {
    corrupt(e.what());
  }

  r.expect("records");
  s.records.resize(r.number());
  for (auto& rec : s.records) {
    rec.strategy = s.strategy;
    rec.repetition = s.repetition;
    rec.iteration = r.number();
    rec.labeled_count = r.number();
    rec.unlabeled_count = r.number();
    rec.test_accuracy = r.real();
    rec.wall_ms = r.signed_number();
    rec.selection.chosen = r.number();
    rec.selection.mean_confidence = r.real();
    rec.selection.mean_margin = r.real();
    rec.selection.mean_divergence = r.real();
    rec.selection.mean_distance = r.real();
  }
  return s;
}

}  // namespace alexbench::harness
