#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "alexbench/data/dataset.hpp"
#include "alexbench/data/pools.hpp"
#include "alexbench/explainer/surrogate.hpp"
#include "alexbench/harness/config.hpp"
#include "alexbench/model/classifier.hpp"
#include "alexbench/strategies/selectors.hpp"

namespace alexbench::harness {

struct ExperimentData {
  std::shared_ptr<const data::RawDataset> train;
  std::shared_ptr<const data::RawDataset> test;

  static ExperimentData from(data::RawDataset train, data::RawDataset test);
  static ExperimentData load(const std::filesystem::path& dir);
};

struct SelectionSummary {
  std::size_t chosen = 0;
  double mean_confidence = strategies::kNotScored;
  double mean_margin = strategies::kNotScored;
  double mean_divergence = strategies::kNotScored;
  double mean_distance = strategies::kNotScored;
};

struct IterationRecord {
  strategies::StrategyId strategy = strategies::StrategyId::Random;
  std::size_t repetition = 0;
  std::size_t iteration = 0;       // 0 = seed-only model
  std::size_t labeled_count = 0;   // |S_j| the model was trained on
  std::size_t unlabeled_count = 0;
  double test_accuracy = 0.0;
  std::int64_t wall_ms = 0;        // 0 unless wall-clock recording is enabled
  SelectionSummary selection;      // the batch chosen after this iteration (none at j = p)
};

struct RunReport {
  ALConfig config;
  // Ordered by (strategy position in config, repetition, iteration).
  std::vector<IterationRecord> records;
};

// State of one (strategy, repetition) bootstrapping run between iterations.
struct RunState {
  std::uint64_t config_digest = 0;
  strategies::StrategyId strategy = strategies::StrategyId::Random;
  std::size_t repetition = 0;
  std::size_t next_iteration = 0;  // p + 1 once finished
  data::LabeledPool labeled;
  data::UnlabeledPool unlabeled;
  std::vector<IterationRecord> records;

  bool finished(const ALConfig& cfg) const { return next_iteration > cfg.p; }
};

// Observer called once per run after the final model is trained.
using FinalModelHook =
    std::function<void(const RunState& state, const model::ClassifierModel& final_model)>;

struct RunOptions {
  std::filesystem::path checkpoint_dir;  // empty disables checkpointing
  FinalModelHook on_final;
};

// Train pool (source indices) after the optional pool limit.
std::vector<data::SourceIndex> train_universe(const ALConfig& cfg, const ExperimentData& data);

RunState initial_state(const ALConfig& cfg, const ExperimentData& data, strategies::StrategyId strategy,
                       std::size_t repetition);

// Runs iterations until `state.next_iteration > stop_after` or the run finishes.
void advance(const ALConfig& cfg, const ExperimentData& data, RunState& state,
             std::size_t stop_after = std::numeric_limits<std::size_t>::max(), const RunOptions& options = {});

// Every (strategy, repetition) run, `cfg.jobs` at a time. Existing matching
// checkpoints in `options.checkpoint_dir` are resumed.
RunReport run_experiment(const ALConfig& cfg, const ExperimentData& data, const RunOptions& options = {});

// Model for iteration j of a repetition, trained from scratch on `labeled`.
model::ClassifierModel train_iteration_model(const ALConfig& cfg, const ExperimentData& data,
                                             const data::LabeledPool& labeled, std::size_t repetition,
                                             std::size_t iteration);

explainer::SurrogateModel fit_iteration_surrogate(const ALConfig& cfg, const ExperimentData& data,
                                                  const model::PosteriorModel& model,
                                                  const data::LabeledPool& labeled, std::size_t repetition,
                                                  std::size_t iteration);

// Fraction of instances whose argmax posterior equals the label.
double evaluate_accuracy(const model::PosteriorModel& model, const data::RawDataset& split);

void save_checkpoint(const RunState& state, const std::filesystem::path& path);
RunState load_checkpoint(const std::filesystem::path& path);
std::filesystem::path checkpoint_path(const std::filesystem::path& dir, strategies::StrategyId strategy,
                                      std::size_t repetition);

}  // namespace alexbench::harness
