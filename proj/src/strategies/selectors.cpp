#include "alexbench/strategies/selectors.hpp"

#include <algorithm>
#include <numeric>

#include "alexbench/error.hpp"
#include "alexbench/explainer/divergence.hpp"
#include "alexbench/strategies/kmeans.hpp"

namespace alexbench::strategies {

using Eigen::Index;
using Eigen::MatrixXd;

std::string_view to_string(StrategyId id) {
  switch (id) {
    case StrategyId::Random: return "rs";
    case StrategyId::UncertaintyPosterior: return "us-p";
    case StrategyId::UncertaintyMargin: return "us-m";
    case StrategyId::DensityWeighted: return "dw";
    case StrategyId::Alex: return "alex";
  }
  return "?";
}

StrategyId parse_strategy(std::string_view name) {
  for (StrategyId id : all_strategies()) {
    if (to_string(id) == name) return id;
  }
  throw Error(ErrorCode::InvalidValue, "unknown strategy '" + std::string(name) + "'");
}

std::vector<StrategyId> all_strategies() {
  return {StrategyId::Random, StrategyId::UncertaintyPosterior, StrategyId::UncertaintyMargin,
          StrategyId::DensityWeighted, StrategyId::Alex};
}

namespace {

template <class Before>
std::vector<std::size_t> top_positions(std::size_t n, std::size_t count, Before before) {
  std::vector<std::size_t> pos(n);
  std::iota(pos.begin(), pos.end(), std::size_t{0});
  count = std::min(count, n);
  std::partial_sort(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(count), pos.end(), before);
  pos.resize(count);
  return pos;
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw Error(ErrorCode::InvalidConfig, std::string("selection context lacks ") + what);
}

const std::vector<SourceIndex>& checked_pool(const SelectionContext& ctx) {
  require(ctx.unlabeled, "unlabeled pool");
  const auto& pool = ctx.unlabeled->indices();
  if (ctx.batch > pool.size()) {
    throw Error(ErrorCode::BatchTooLarge, "batch " + std::to_string(ctx.batch) + " exceeds pool of " +
                                              std::to_string(pool.size()));
  }
  return pool;
}

MatrixXd pool_posteriors(const SelectionContext& ctx, std::span<const SourceIndex> ids) {
  require(ctx.model, "model");
  require(ctx.features, "feature table");
  return model::predict_indices(*ctx.model, *ctx.features, ids);
}

std::span<const double> column(const MatrixXd& m, std::size_t j) {
  return {m.col(static_cast<Index>(j)).data(), static_cast<std::size_t>(m.rows())};
}

}  // namespace

std::vector<std::size_t> lowest(std::span<const double> scores, std::span<const SourceIndex> ids,
                                std::size_t count) {
  return top_positions(scores.size(), count, [&](std::size_t a, std::size_t b) {
    return scores[a] != scores[b] ? scores[a] < scores[b] : ids[a] < ids[b];
  });
}

std::vector<std::size_t> highest(std::span<const double> scores, std::span<const SourceIndex> ids,
                                 std::size_t count) {
  return top_positions(scores.size(), count, [&](std::size_t a, std::size_t b) {
    return scores[a] != scores[b] ? scores[a] > scores[b] : ids[a] < ids[b];
  });
}

SelectionResult select_random(const SelectionContext& ctx) {
  const auto& pool = checked_pool(ctx);
  require(ctx.rng, "random stream");
  std::vector<SourceIndex> ids = pool;
  SelectionResult r;
  for (std::size_t k = 0; k < ctx.batch; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, ids.size() - 1);
    std::swap(ids[k], ids[pick(*ctx.rng)]);
    r.chosen.push_back(ids[k]);
    r.diagnostics.push_back({ids[k]});
  }
  return r;
}

SelectionResult select_uncertainty(const SelectionContext& ctx) {
  const auto& pool = checked_pool(ctx);
  const MatrixXd post = pool_posteriors(ctx, pool);
  std::vector<double> conf(pool.size());
  for (std::size_t j = 0; j < pool.size(); ++j) conf[j] = model::uncertainty_score(column(post, j));
  SelectionResult r;
  for (std::size_t p : lowest(conf, pool, ctx.batch)) {
    r.chosen.push_back(pool[p]);
    r.diagnostics.push_back({.index = pool[p], .confidence = conf[p]});
  }
  return r;
}

SelectionResult select_margin(const SelectionContext& ctx) {
  const auto& pool = checked_pool(ctx);
  const MatrixXd post = pool_posteriors(ctx, pool);
  std::vector<double> margin(pool.size());
  for (std::size_t j = 0; j < pool.size(); ++j) margin[j] = model::margin_score(column(post, j));
  SelectionResult r;
  for (std::size_t p : lowest(margin, pool, ctx.batch)) {
    r.chosen.push_back(pool[p]);
    r.diagnostics.push_back({.index = pool[p], .margin = margin[p]});
  }
  return r;
}

SelectionResult select_density_weighted(const SelectionContext& ctx) {
  const auto& pool = checked_pool(ctx);
  if (ctx.centroids == nullptr || ctx.centroids->cols() == 0) {
    throw Error(ErrorCode::NoCentroids, "density-weighted selection needs cluster centroids");
  }
  require(ctx.features, "feature table");
  require(ctx.labeled, "labeled pool");
  const MatrixXd& centroids = *ctx.centroids;

  std::vector<bool> occupied(static_cast<std::size_t>(centroids.cols()), false);
  const auto labeled_ids = ctx.labeled->indices();
  for (std::size_t c : nearest_centroid(centroids, ctx.features->gather(labeled_ids))) occupied[c] = true;

  std::vector<double> score(pool.size());
  constexpr std::size_t kChunk = 4096;
  for (std::size_t start = 0; start < pool.size(); start += kChunk) {
    const std::size_t len = std::min(kChunk, pool.size() - start);
    const MatrixXd block = ctx.features->gather(std::span(pool).subspan(start, len));
    for (std::size_t j = 0; j < len; ++j) {
      double best = std::numeric_limits<double>::infinity();
      for (Index c = 0; c < centroids.cols(); ++c) {
        if (!occupied[static_cast<std::size_t>(c)]) continue;
        best = std::min(best, (block.col(static_cast<Index>(j)) - centroids.col(c)).norm());
      }
      score[start + j] = best;
    }
  }
  SelectionResult r;
  for (std::size_t p : highest(score, pool, ctx.batch)) {
    r.chosen.push_back(pool[p]);
    r.diagnostics.push_back({.index = pool[p], .distance = score[p]});
  }
  return r;
}

SelectionResult select_alex(const SelectionContext& ctx) {
  const auto& pool = checked_pool(ctx);
  if (ctx.surrogate == nullptr) throw Error(ErrorCode::MissingSurrogate, "ALEX needs a fitted surrogate");
  require(ctx.labeled, "labeled pool");
  if (ctx.labeled->empty()) throw Error(ErrorCode::EmptyPool, "ALEX needs a non-empty labeled pool");
  const std::size_t k = std::min(ctx.candidates, pool.size());
  if (k < ctx.batch) {
    throw Error(ErrorCode::InvalidConfig, "candidate set size " + std::to_string(k) +
                                              " smaller than batch " + std::to_string(ctx.batch));
  }

  // (1) s(x) over U, (2) the k least confident form the candidate set C.
  const MatrixXd post = pool_posteriors(ctx, pool);
  std::vector<double> conf(pool.size());
  for (std::size_t j = 0; j < pool.size(); ++j) conf[j] = model::uncertainty_score(column(post, j));
  const auto cand_pos = lowest(conf, pool, k);

  // (3) mean explanation divergence of each candidate against S.
  const auto labeled_ids = ctx.labeled->indices();
  const MatrixXd labeled_inputs = ctx.features->gather(labeled_ids);
  const MatrixXd labeled_post = ctx.model->predict(labeled_inputs);
  std::vector<std::size_t> labeled_classes(labeled_ids.size());
  for (std::size_t j = 0; j < labeled_ids.size(); ++j) {
    Index c = 0;
    labeled_post.col(static_cast<Index>(j)).maxCoeff(&c);
    labeled_classes[j] = static_cast<std::size_t>(c);
  }
  const MatrixXd labeled_dists =
      explainer::explanation_distributions(*ctx.surrogate, labeled_inputs, labeled_classes);

  std::vector<SourceIndex> cand_ids(k);
  std::vector<std::size_t> cand_classes(k);
  for (std::size_t i = 0; i < k; ++i) {
    cand_ids[i] = pool[cand_pos[i]];
    Index c = 0;
    post.col(static_cast<Index>(cand_pos[i])).maxCoeff(&c);
    cand_classes[i] = static_cast<std::size_t>(c);
  }
  const MatrixXd cand_dists =
      explainer::explanation_distributions(*ctx.surrogate, ctx.features->gather(cand_ids), cand_classes);
  std::vector<double> divergence(k);
  for (std::size_t i = 0; i < k; ++i) divergence[i] = explainer::mean_divergence(column(cand_dists, i), labeled_dists);

  // (4) the b most divergent candidates.
  SelectionResult r;
  for (std::size_t p : highest(divergence, cand_ids, ctx.batch)) r.chosen.push_back(cand_ids[p]);
  for (std::size_t i = 0; i < k; ++i) {
    r.diagnostics.push_back({.index = cand_ids[i], .confidence = conf[cand_pos[i]], .divergence = divergence[i]});
  }
  return r;
}

SelectionResult select(StrategyId id, const SelectionContext& ctx) {
  switch (id) {
    case StrategyId::Random: return select_random(ctx);
    case StrategyId::UncertaintyPosterior: return select_uncertainty(ctx);
    case StrategyId::UncertaintyMargin: return select_margin(ctx);
    case StrategyId::DensityWeighted: return select_density_weighted(ctx);
    case StrategyId::Alex: return select_alex(ctx);
  }
  throw Error(ErrorCode::InvalidValue, "unknown strategy");
}

}  // namespace alexbench::strategies
