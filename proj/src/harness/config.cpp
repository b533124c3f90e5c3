#include "alexbench/harness/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "alexbench/error.hpp"

namespace alexbench::harness {
namespace {

std::size_t parse_size(std::string_view key, std::string_view value) {
  std::size_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
    throw Error(ErrorCode::InvalidValue, std::string(key) + "='" + std::string(value) + "' is not a non-negative integer");
  }
  return out;
}

std::uint64_t parse_u64(std::string_view key, std::string_view value) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
    throw Error(ErrorCode::InvalidValue, std::string(key) + "='" + std::string(value) + "' is not an unsigned integer");
  }
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  std::string s(value);
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(out)) {
    throw Error(ErrorCode::InvalidValue, std::string(key) + "='" + s + "' is not a real number");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  throw Error(ErrorCode::InvalidValue, std::string(key) + "='" + std::string(value) + "' is not a boolean");
}

std::string format_real(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

constexpr std::string_view kExperimentKeys[] = {
    "dataset", "strategy", "q",     "p",       "batch",  "candidates", "candidate-multiplier",
    "arch",    "epochs",   "minibatch", "lr",  "beta1",  "beta2",      "adam-eps",
    "patch",   "samples",  "ridge", "weighting", "seed", "reps",       "pool-limit",
    "kmeans-rounds", "jobs", "wall-clock"};

}  // namespace

std::span<const std::string_view> experiment_keys() { return kExperimentKeys; }

bool is_experiment_key(std::string_view key) {
  for (auto k : kExperimentKeys) {
    if (k == key) return true;
  }
  return false;
}

void apply_setting(ALConfig& cfg, std::string_view key, std::string_view value) {
  if (key == "dataset") {
    if (value != "mnist" && value != "fmnist") {
      throw Error(ErrorCode::InvalidValue, "dataset must be mnist or fmnist, got '" + std::string(value) + "'");
    }
    cfg.dataset = value;
  } else if (key == "strategy") {
    cfg.strategies.clear();
    if (value == "all") {
      cfg.strategies = strategies::all_strategies();
    } else {
      std::size_t start = 0;
      while (start <= value.size()) {
        const auto comma = value.find(',', start);
        const auto item = value.substr(start, comma == std::string_view::npos ? value.npos : comma - start);
        cfg.strategies.push_back(strategies::parse_strategy(item));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
      }
    }
  } else if (key == "q") {
    cfg.q = parse_size(key, value);
  } else if (key == "p") {
    cfg.p = parse_size(key, value);
  } else if (key == "batch") {
    cfg.batch = parse_size(key, value);
  } else if (key == "candidates") {
    cfg.candidates = parse_size(key, value);
  } else if (key == "candidate-multiplier") {
    cfg.candidate_multiplier = parse_size(key, value);
  } else if (key == "arch") {
    try {
      cfg.arch = model::parse_arch_kind(value);
    } catch (const Error&) {
      throw Error(ErrorCode::InvalidValue, "arch must be conv or dense, got '" + std::string(value) + "'");
    }
  } else if (key == "epochs") {
    cfg.train.epochs = parse_size(key, value);
  } else if (key == "minibatch") {
    cfg.train.batch_size = parse_size(key, value);
  } else if (key == "lr") {
    cfg.train.learning_rate = parse_real(key, value);
  } else if (key == "beta1") {
    cfg.train.beta1 = parse_real(key, value);
  } else if (key == "beta2") {
    cfg.train.beta2 = parse_real(key, value);
  } else if (key == "adam-eps") {
    cfg.train.epsilon = parse_real(key, value);
  } else if (key == "patch") {
    cfg.patch_size = parse_size(key, value);
  } else if (key == "samples") {
    cfg.explainer_samples = parse_size(key, value);
  } else if (key == "ridge") {
    cfg.ridge = parse_real(key, value);
  } else if (key == "weighting") {
    if (value == "uniform") cfg.weighting = explainer::SampleWeighting::Uniform;
    else if (value == "shapley") cfg.weighting = explainer::SampleWeighting::ShapleyKernel;
    else throw Error(ErrorCode::InvalidValue, "weighting must be uniform or shapley");
  } else if (key == "seed") {
    cfg.seed = parse_u64(key, value);
  } else if (key == "reps") {
    cfg.repetitions = parse_size(key, value);
  } else if (key == "pool-limit") {
    cfg.pool_limit = parse_size(key, value);
  } else if (key == "kmeans-rounds") {
    cfg.kmeans_rounds = parse_size(key, value);
  } else if (key == "jobs") {
    cfg.jobs = parse_size(key, value);
  } else if (key == "wall-clock") {
    cfg.wall_clock = parse_bool(key, value);
  } else {
    throw Error(ErrorCode::UnknownFlag, "unknown setting '" + std::string(key) + "'");
  }
}

void ALConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidValue, what); };
  if (strategies.empty()) fail("at least one strategy is required");
  if (q < 1) fail("q must be >= 1");
  if (repetitions < 1) fail("reps must be >= 1");
  if (jobs < 1) fail("jobs must be >= 1");
  if (candidate_multiplier < 1 && candidates == 0) fail("candidate-multiplier must be >= 1");
  if (candidate_size() < batch_size()) fail("candidate set size k must be >= batch size b");
  if (train.epochs < 1) fail("epochs must be >= 1");
  if (train.batch_size < 1) fail("minibatch must be >= 1");
  if (!(train.learning_rate > 0.0)) fail("lr must be > 0");
  if (!(train.beta1 >= 0.0 && train.beta1 < 1.0) || !(train.beta2 >= 0.0 && train.beta2 < 1.0)) {
    fail("beta1/beta2 must lie in [0, 1)");
  }
  if (!(train.epsilon > 0.0)) fail("adam-eps must be > 0");
  if (patch_size < 1 || 28 % patch_size != 0) fail("patch must divide 28");
  if (explainer_samples < 1) fail("samples must be >= 1");
  if (!(ridge >= 0.0)) fail("ridge must be >= 0");
  if (kmeans_rounds < 1) fail("kmeans-rounds must be >= 1");
  if (pool_limit != 0 && pool_limit < seed_size() + batch_size() * p) {
    fail("pool-limit too small for q*classes + p*b labeled instances");
  }
}

std::vector<std::pair<std::string, std::string>> ALConfig::echo() const {
  std::string strategy_list;
  for (auto s : strategies) {
    if (!strategy_list.empty()) strategy_list += ',';
    strategy_list += strategies::to_string(s);
  }
  return {
      {"dataset", dataset},
      {"strategy", strategy_list},
      {"q", std::to_string(q)},
      {"p", std::to_string(p)},
      {"batch", std::to_string(batch_size())},
      {"candidates", std::to_string(candidate_size())},
      {"arch", std::string(model::to_string(arch))},
      {"epochs", std::to_string(train.epochs)},
      {"minibatch", std::to_string(train.batch_size)},
      {"lr", format_real(train.learning_rate)},
      {"beta1", format_real(train.beta1)},
      {"beta2", format_real(train.beta2)},
      {"adam-eps", format_real(train.epsilon)},
      {"patch", std::to_string(patch_size)},
      {"samples", std::to_string(explainer_samples)},
      {"ridge", format_real(ridge)},
      {"weighting", weighting == explainer::SampleWeighting::Uniform ? "uniform" : "shapley"},
      {"seed", std::to_string(seed)},
      {"reps", std::to_string(repetitions)},
      {"pool-limit", std::to_string(pool_limit)},
      {"kmeans-rounds", std::to_string(kmeans_rounds)},
  };
}

std::uint64_t ALConfig::digest() const {
  // The strategy list is left out: a run's state does not depend on which
  // other strategies share the invocation.
  std::uint64_t h = fnv1a64("");
  for (const auto& [k, v] : echo()) {
    if (k == "strategy") continue;
    h = fnv1a64(k, h);
    h = fnv1a64("=", h);
    h = fnv1a64(v, h);
    h = fnv1a64("\n", h);
  }
  return h;
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t hash) {
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001B3ull;
  }
  return hash;
}

}  // namespace alexbench::harness
