#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "alexbench/explainer/surrogate.hpp"
#include "alexbench/model/architecture.hpp"
#include "alexbench/model/train.hpp"
#include "alexbench/strategies/selectors.hpp"

namespace alexbench::harness {

struct ALConfig {
  std::string dataset = "mnist";
  std::vector<strategies::StrategyId> strategies{strategies::StrategyId::Alex};
  std::size_t q = 10;                     // seed instances per class
  std::size_t p = 10;                     // bootstrapping steps
  std::size_t batch = 0;                  // b; 0 means |S0| = q * classes
  std::size_t candidate_multiplier = 3;   // k = multiplier * b
  std::size_t candidates = 0;             // explicit k; 0 means use the multiplier
  model::ArchKind arch = model::ArchKind::Dense;
  model::TrainConfig train;
  std::size_t patch_size = 2;
  std::size_t explainer_samples = 64;
  double ridge = 1e-3;
  explainer::SampleWeighting weighting = explainer::SampleWeighting::Uniform;
  std::uint64_t seed = 0;
  std::size_t repetitions = 3;
  std::size_t pool_limit = 0;             // 0 keeps the whole train split
  std::size_t kmeans_rounds = 50;
  std::size_t classes = 10;

  // Execution-only settings; not part of the echo.
  std::size_t jobs = 1;
  bool wall_clock = false;

  std::size_t seed_size() const { return q * classes; }
  std::size_t batch_size() const { return batch == 0 ? seed_size() : batch; }
  std::size_t candidate_size() const { return candidates == 0 ? candidate_multiplier * batch_size() : candidates; }
  std::uint64_t repetition_seed(std::size_t repetition) const { return seed + repetition; }

  // Throws InvalidValue when an invariant is violated.
  void validate() const;

  // Canonical key=value pairs covering everything that affects results.
  std::vector<std::pair<std::string, std::string>> echo() const;
  std::uint64_t digest() const;
};

// Applies one key=value setting (shared by config files and CLI flags).
// Throws UnknownFlag for an unrecognised key and InvalidValue for a bad value.
void apply_setting(ALConfig& cfg, std::string_view key, std::string_view value);

bool is_experiment_key(std::string_view key);
std::span<const std::string_view> experiment_keys();

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t hash = 0xCBF29CE484222325ull);

}  // namespace alexbench::harness
