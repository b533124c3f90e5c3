#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "alexbench/data/dataset.hpp"
#include "alexbench/data/pools.hpp"
#include "alexbench/explainer/surrogate.hpp"
#include "alexbench/model/classifier.hpp"
#include "alexbench/random.hpp"

namespace alexbench::strategies {

using data::SourceIndex;

enum class StrategyId { Random, UncertaintyPosterior, UncertaintyMargin, DensityWeighted, Alex };

// CLI identifiers: rs, us-p, us-m, dw, alex.
std::string_view to_string(StrategyId id);
StrategyId parse_strategy(std::string_view name);
std::vector<StrategyId> all_strategies();

struct SelectionContext {
  const model::PosteriorModel* model = nullptr;
  const data::FeatureTable* features = nullptr;
  const data::LabeledPool* labeled = nullptr;
  const data::UnlabeledPool* unlabeled = nullptr;
  const explainer::SurrogateModel* surrogate = nullptr;  // ALEX only
  const Eigen::MatrixXd* centroids = nullptr;            // DW only, d x clusters
  std::size_t batch = 0;                                 // b
  std::size_t candidates = 0;                            // k
  Rng* rng = nullptr;                                    // RS only
};

inline constexpr double kNotScored = std::numeric_limits<double>::quiet_NaN();

struct CandidateDiagnostics {
  SourceIndex index = 0;
  double confidence = kNotScored;  // s(x), max posterior
  double margin = kNotScored;
  double divergence = kNotScored;  // mean explanation divergence
  double distance = kNotScored;    // DW: distance to nearest labeled-occupied centroid
};

struct SelectionResult {
  std::vector<SourceIndex> chosen;
  // ALEX: every member of the candidate set; other strategies: chosen only.
  std::vector<CandidateDiagnostics> diagnostics;
};

SelectionResult select_random(const SelectionContext& ctx);
SelectionResult select_uncertainty(const SelectionContext& ctx);
SelectionResult select_margin(const SelectionContext& ctx);
SelectionResult select_density_weighted(const SelectionContext& ctx);
SelectionResult select_alex(const SelectionContext& ctx);

SelectionResult select(StrategyId id, const SelectionContext& ctx);

// Positions of the `count` smallest (largest) scores; ties go to the smaller id.
std::vector<std::size_t> lowest(std::span<const double> scores, std::span<const SourceIndex> ids,
                                std::size_t count);
std::vector<std::size_t> highest(std::span<const double> scores, std::span<const SourceIndex> ids,
                                 std::size_t count);

}  // namespace alexbench::strategies
