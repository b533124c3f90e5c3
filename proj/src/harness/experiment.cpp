#include "alexbench/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "alexbench/error.hpp"
#include "alexbench/model/train.hpp"
#include "alexbench/random.hpp"
#include "alexbench/strategies/kmeans.hpp"

namespace alexbench::harness {
namespace {

using strategies::StrategyId;

// Stream tags for derive_seed.
enum SeedTag : std::uint64_t {
  kPoolTag = 1,
  kSeedSetTag = 2,
  kInitTag = 3,
  kShuffleTag = 4,
  kExplainTag = 5,
  kSelectTag = 6,
  kKMeansTag = 7,
};

data::FeatureTable table_of(const std::shared_ptr<const data::RawDataset>& split) {
  return data::FeatureTable(std::shared_ptr<const data::ImageTensor>(split, &split->images));
}

double mean_of(const std::vector<strategies::CandidateDiagnostics>& diags,
               double strategies::CandidateDiagnostics::*field, const std::vector<data::SourceIndex>& chosen) {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& d : diags) {
    if (std::find(chosen.begin(), chosen.end(), d.index) == chosen.end()) continue;
    if (d.*field != d.*field) continue;  // NaN: not scored
    total += d.*field;
    ++n;
  }
  return n == 0 ? strategies::kNotScored : total / static_cast<double>(n);
}

SelectionSummary summarize(const strategies::SelectionResult& r) {
  using D = strategies::CandidateDiagnostics;
  return {r.chosen.size(), mean_of(r.diagnostics, &D::confidence, r.chosen),
          mean_of(r.diagnostics, &D::margin, r.chosen), mean_of(r.diagnostics, &D::divergence, r.chosen),
          mean_of(r.diagnostics, &D::distance, r.chosen)};
}

}  // namespace

ExperimentData ExperimentData::from(data::RawDataset train, data::RawDataset test) {
  if (train.images.image_size() != test.images.image_size()) {
    throw Error(ErrorCode::ShapeMismatch, "train and test images differ in size");
  }
  return {std::make_shared<const data::RawDataset>(std::move(train)),
          std::make_shared<const data::RawDataset>(std::move(test))};
}

ExperimentData ExperimentData::load(const std::filesystem::path& dir) {
  return from(data::load_split(dir, data::Split::Train), data::load_split(dir, data::Split::Test));
}

std::vector<data::SourceIndex> train_universe(const ALConfig& cfg, const ExperimentData& data) {
  Rng rng(derive_seed(cfg.seed, {kPoolTag}));
  return data::subsample_universe(data.train->size(), cfg.pool_limit, rng);
}

RunState initial_state(const ALConfig& cfg, const ExperimentData& data, StrategyId strategy,
                       std::size_t repetition) {
  cfg.validate();
  const auto universe = train_universe(cfg, data);
  Rng rng(derive_seed(cfg.repetition_seed(repetition), {kSeedSetTag}));
  auto split = data::stratified_seed(data.train->labels, universe, cfg.q, rng,
                                     static_cast<std::uint8_t>(cfg.classes));
  RunState s;
  s.config_digest = cfg.digest();
  s.strategy = strategy;
  s.repetition = repetition;
  s.labeled = std::move(split.labeled);
  s.unlabeled = std::move(split.unlabeled);
  return s;
}

model::ClassifierModel train_iteration_model(const ALConfig& cfg, const ExperimentData& data,
                                             const data::LabeledPool& labeled, std::size_t repetition,
                                             std::size_t iteration) {
  const std::uint64_t rep_seed = cfg.repetition_seed(repetition);
  const auto& images = data.train->images;
  model::Architecture arch = cfg.arch == model::ArchKind::Conv ? model::Architecture::conv(images.rows, images.cols)
                                                               : model::Architecture::dense(images.rows, images.cols);
  arch.classes = cfg.classes;
  // Retrained from the same initialisation at every iteration.
  auto init = model::init_model(arch, derive_seed(rep_seed, {kInitTag}));
  return model::train(std::move(init), labeled, table_of(data.train), cfg.train,
                      derive_seed(rep_seed, {kShuffleTag, iteration}));
}

explainer::SurrogateModel fit_iteration_surrogate(const ALConfig& cfg, const ExperimentData& data,
                                                  const model::PosteriorModel& model,
                                                  const data::LabeledPool& labeled, std::size_t repetition,
                                                  std::size_t iteration) {
  const auto& images = data.train->images;
  explainer::SurrogateConfig sc;
  sc.grid = explainer::PatchGrid::square(images.rows, images.cols, cfg.patch_size);
  sc.samples_per_instance = cfg.explainer_samples;
  sc.ridge = cfg.ridge;
  sc.weighting = cfg.weighting;
  return explainer::fit_surrogate(model, labeled, table_of(data.train), sc,
                                  derive_seed(cfg.repetition_seed(repetition), {kExplainTag, iteration}));
}

double evaluate_accuracy(const model::PosteriorModel& model, const data::RawDataset& split) {
  if (split.size() == 0) return 0.0;
  auto images = std::make_shared<const data::ImageTensor>(split.images);
  const data::FeatureTable table(images);
  std::vector<data::SourceIndex> ids(split.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<data::SourceIndex>(i);
  const Eigen::MatrixXd post = model::predict_indices(model, table, ids);
  std::size_t correct = 0;
  for (Eigen::Index j = 0; j < post.cols(); ++j) {
    Eigen::Index c = 0;
    post.col(j).maxCoeff(&c);
    if (static_cast<std::size_t>(c) == split.labels[static_cast<std::size_t>(j)]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(split.size());
}

void advance(const ALConfig& cfg, const ExperimentData& data, RunState& state, std::size_t stop_after,
             const RunOptions& options) {
  if (state.config_digest != cfg.digest()) {
    throw Error(ErrorCode::InvalidConfig, "run state belongs to a different configuration");
  }
  if (state.finished(cfg) || state.next_iteration > stop_after) return;

  const std::uint64_t rep_seed = cfg.repetition_seed(state.repetition);
  const data::FeatureTable train_table = table_of(data.train);
  const data::Oracle oracle(data.train->labels);
  const std::size_t b = cfg.batch_size();

  Eigen::MatrixXd centroids;
  if (state.strategy == StrategyId::DensityWeighted) {
    const auto universe = train_universe(cfg, data);
    Rng rng(derive_seed(rep_seed, {kKMeansTag}));
    centroids = strategies::kmeans(train_table, universe, cfg.classes, rng, cfg.kmeans_rounds).centroids;
  }

  using Clock = std::chrono::steady_clock;
  while (!state.finished(cfg) && state.next_iteration <= stop_after) {
    const std::size_t j = state.next_iteration;
    const auto t0 = Clock::now();
    const auto model = train_iteration_model(cfg, data, state.labeled, state.repetition, j);

    IterationRecord rec;
    rec.strategy = state.strategy;
    rec.repetition = state.repetition;
    rec.iteration = j;
    rec.labeled_count = state.labeled.size();
    rec.unlabeled_count = state.unlabeled.size();
    rec.test_accuracy = evaluate_accuracy(model, *data.test);

    if (j == cfg.p) {
      if (options.on_final) options.on_final(state, model);
    } else {
      if (state.unlabeled.size() < b) {
        throw Error(ErrorCode::PoolExhausted, std::to_string(state.unlabeled.size()) +
                                                  " unlabeled instances left, batch needs " + std::to_string(b));
      }
      std::optional<explainer::SurrogateModel> surrogate;
      if (state.strategy == StrategyId::Alex) {
        surrogate = fit_iteration_surrogate(cfg, data, model, state.labeled, state.repetition, j);
      }
      Rng rng(derive_seed(rep_seed, {kSelectTag, j}));
      strategies::SelectionContext ctx;
      ctx.model = &model;
      ctx.features = &train_table;
      ctx.labeled = &state.labeled;
      ctx.unlabeled = &state.unlabeled;
      ctx.surrogate = surrogate ? &*surrogate : nullptr;
      ctx.centroids = centroids.size() > 0 ? &centroids : nullptr;
      ctx.batch = b;
      ctx.candidates = cfg.candidate_size();
      ctx.rng = &rng;
      const auto result = strategies::select(state.strategy, ctx);
      oracle.annotate(result.chosen, state.unlabeled, state.labeled);
      rec.selection = summarize(result);
    }
    if (cfg.wall_clock) {
      rec.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
    }
    state.records.push_back(rec);
    state.next_iteration = j + 1;
    if (!options.checkpoint_dir.empty()) {
      save_checkpoint(state, checkpoint_path(options.checkpoint_dir, state.strategy, state.repetition));
    }
  }
}

RunReport run_experiment(const ALConfig& cfg, const ExperimentData& data, const RunOptions& options) {
  cfg.validate();
  if (!options.checkpoint_dir.empty()) std::filesystem::create_directories(options.checkpoint_dir);

  struct Job {
    StrategyId strategy;
    std::size_t repetition;
    std::vector<IterationRecord> records;
  };
  std::vector<Job> jobs;
  for (StrategyId s : cfg.strategies) {
    for (std::size_t r = 0; r < cfg.repetitions; ++r) jobs.push_back({s, r, {}});
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        Job& job = jobs[i];
        RunState state;
        const auto ckpt = options.checkpoint_dir.empty()
                              ? std::filesystem::path{}
                              : checkpoint_path(options.checkpoint_dir, job.strategy, job.repetition);
        if (!ckpt.empty() && std::filesystem::exists(ckpt)) {
          state = load_checkpoint(ckpt);
          if (state.config_digest != cfg.digest() || state.strategy != job.strategy ||
              state.repetition != job.repetition) {
            throw Error(ErrorCode::InvalidConfig, ckpt.string() + " belongs to a different run");
          }
        } else {
          state = initial_state(cfg, data, job.strategy, job.repetition);
        }
        advance(cfg, data, state, std::numeric_limits<std::size_t>::max(), options);
        job.records = std::move(state.records);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };
  const std::size_t workers = std::min(cfg.jobs, jobs.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  RunReport report;
  report.config = cfg;
  for (auto& job : jobs) {
    report.records.insert(report.records.end(), job.records.begin(), job.records.end());
  }
  return report;
}

}  // namespace alexbench::harness
