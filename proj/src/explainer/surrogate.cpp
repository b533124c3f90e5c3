#include "alexbench/explainer/surrogate.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <cmath>
#include <limits>

#include "alexbench/error.hpp"

namespace alexbench::explainer {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

PatchGrid PatchGrid::square(std::size_t image_rows, std::size_t image_cols, std::size_t patch_size) {
  if (patch_size == 0 || image_rows % patch_size != 0 || image_cols % patch_size != 0) {
    throw Error(ErrorCode::BadGrid, "patch size " + std::to_string(patch_size) + " does not tile " +
                                        std::to_string(image_rows) + "x" + std::to_string(image_cols));
  }
  PatchGrid g{image_rows, image_cols, image_rows / patch_size, image_cols / patch_size};
  g.validate();
  return g;
}

std::size_t PatchGrid::patch_of_pixel(std::size_t pixel) const {
  const std::size_t r = pixel / image_cols;
  const std::size_t c = pixel % image_cols;
  return (r / block_rows()) * patch_cols + c / block_cols();
}

void PatchGrid::validate() const {
  if (image_rows == 0 || image_cols == 0 || patch_rows == 0 || patch_cols == 0 ||
      image_rows % patch_rows != 0 || image_cols % patch_cols != 0) {
    throw Error(ErrorCode::BadGrid, std::to_string(patch_rows) + "x" + std::to_string(patch_cols) +
                                        " patches do not tile " + std::to_string(image_rows) + "x" +
                                        std::to_string(image_cols));
  }
}

VectorXd patch_means(const PatchGrid& grid, const Eigen::Ref<const VectorXd>& x) {
  if (static_cast<std::size_t>(x.size()) != grid.image_rows * grid.image_cols) {
    throw Error(ErrorCode::DimensionMismatch, "instance does not match patch grid");
  }
  VectorXd sums = VectorXd::Zero(static_cast<Index>(grid.num_patches()));
  for (Index i = 0; i < x.size(); ++i) {
    sums[static_cast<Index>(grid.patch_of_pixel(static_cast<std::size_t>(i)))] += x[i];
  }
  return sums / static_cast<double>(grid.block_rows() * grid.block_cols());
}

VectorXd expand_mask(const PatchGrid& grid, std::span<const std::uint8_t> bits) {
  if (bits.size() != grid.num_patches()) {
    throw Error(ErrorCode::DimensionMismatch, "mask length does not match patch count");
  }
  VectorXd out(static_cast<Index>(grid.image_rows * grid.image_cols));
  for (Index i = 0; i < out.size(); ++i) {
    out[i] = bits[grid.patch_of_pixel(static_cast<std::size_t>(i))] ? 1.0 : 0.0;
  }
  return out;
}

std::vector<NeighborSample> sample_neighborhood(const Eigen::Ref<const VectorXd>& x, std::size_t m,
                                                const PatchGrid& grid, Rng& rng) {
  grid.validate();
  if (m == 0) throw Error(ErrorCode::InvalidConfig, "neighbourhood size must be positive");
  std::bernoulli_distribution coin(0.5);
  std::vector<NeighborSample> out(m);
  for (auto& s : out) {
    s.mask.bits.resize(grid.num_patches());
    for (auto& b : s.mask.bits) b = coin(rng) ? 1 : 0;
    s.z = x.cwiseProduct(expand_mask(grid, s.mask.bits));
  }
  return out;
}

double shapley_kernel_log_weight(std::size_t patches, std::size_t ones) {
  if (patches < 2) return 0.0;
  if (ones == 0) ones = 1;
  if (ones == patches) ones = patches - 1;
  const double d = static_cast<double>(patches);
  const double s = static_cast<double>(ones);
  const double log_binom = std::lgamma(d + 1) - std::lgamma(s + 1) - std::lgamma(d - s + 1);
  return std::log(d - 1) - log_binom - std::log(s) - std::log(d - s);
}

namespace {

std::vector<std::vector<std::uint8_t>> draw_masks(std::size_t m, std::size_t patches, std::uint64_t seed) {
  Rng rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::vector<std::vector<std::uint8_t>> masks(m, std::vector<std::uint8_t>(patches));
  for (auto& mask : masks) {
    for (auto& b : mask) b = coin(rng) ? 1 : 0;
  }
  return masks;
}

std::size_t count_ones(const std::vector<std::uint8_t>& mask) {
  std::size_t n = 0;
  for (auto b : mask) n += b;
  return n;
}

}  // namespace

SurrogateModel fit_surrogate(const model::PosteriorModel& model, const MatrixXd& instances,
                             const SurrogateConfig& cfg, std::uint64_t fit_seed) {
  const PatchGrid& grid = cfg.grid;
  grid.validate();
  if (instances.cols() == 0) throw Error(ErrorCode::EmptyPool, "surrogate fit on empty pool");
  if (static_cast<std::size_t>(instances.rows()) != grid.image_rows * grid.image_cols ||
      static_cast<std::size_t>(instances.rows()) != model.input_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "instances do not match grid/model input");
  }
  if (cfg.samples_per_instance == 0 || !(cfg.ridge >= 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "surrogate needs m >= 1 and ridge >= 0");
  }
  const std::size_t classes = model.num_classes();
  const std::size_t patches = grid.num_patches();
  const std::size_t m = cfg.samples_per_instance;
  const Index dp = static_cast<Index>(patches);
  const auto n = static_cast<std::size_t>(instances.cols());

  // Shapley-kernel weights span many orders of magnitude; rescale so the
  // mean weight over every drawn mask is one, keeping ridge on the same scale
  // as the uniform mode.
  double log_weight_shift = 0.0;
  if (cfg.weighting == SampleWeighting::ShapleyKernel) {
    double max_lw = -std::numeric_limits<double>::infinity();
    std::vector<double> lws;
    lws.reserve(n * m);
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& mask : draw_masks(m, patches, derive_seed(fit_seed, {i}))) {
        lws.push_back(shapley_kernel_log_weight(patches, count_ones(mask)));
        max_lw = std::max(max_lw, lws.back());
      }
    }
    double acc = 0.0;
    for (double lw : lws) acc += std::exp(lw - max_lw);
    log_weight_shift = max_lw + std::log(acc / static_cast<double>(lws.size()));
  }

  const MatrixXd parent_posteriors = model.predict(instances);
  std::vector<MatrixXd> gram(classes, MatrixXd::Zero(dp, dp));
  std::vector<VectorXd> rhs(classes, VectorXd::Zero(dp));
  std::vector<std::size_t> counts(classes, 0);

  MatrixXd neighbours(instances.rows(), static_cast<Index>(m));
  MatrixXd regressors(dp, static_cast<Index>(m));
  VectorXd sample_weights(static_cast<Index>(m));
  for (std::size_t i = 0; i < n; ++i) {
    const auto col = static_cast<Index>(i);
    Index cls = 0;
    parent_posteriors.col(col).maxCoeff(&cls);
    const VectorXd means = patch_means(grid, instances.col(col));
    const auto masks = draw_masks(m, patches, derive_seed(fit_seed, {i}));
    for (std::size_t s = 0; s < m; ++s) {
      const auto sc = static_cast<Index>(s);
      neighbours.col(sc) = instances.col(col).cwiseProduct(expand_mask(grid, masks[s]));
      for (Index k = 0; k < dp; ++k) regressors(k, sc) = masks[s][static_cast<std::size_t>(k)] ? means[k] : 0.0;
      sample_weights[sc] = cfg.weighting == SampleWeighting::Uniform
                               ? 1.0
                               : std::exp(shapley_kernel_log_weight(patches, count_ones(masks[s])) -
                                          log_weight_shift);
    }
    const VectorXd targets = model.predict(neighbours).row(cls).transpose();
    const MatrixXd weighted = regressors * sample_weights.asDiagonal();
    gram[static_cast<std::size_t>(cls)].noalias() += weighted * regressors.transpose();
    rhs[static_cast<std::size_t>(cls)].noalias() += weighted * targets;
    ++counts[static_cast<std::size_t>(cls)];
  }

  SurrogateModel out;
  out.grid = grid;
  out.fit_seed = fit_seed;
  out.instances_per_class = counts;
  out.weights = MatrixXd::Zero(static_cast<Index>(classes), dp);
  for (std::size_t c = 0; c < classes; ++c) {
    if (counts[c] == 0) continue;
    if (cfg.ridge == 0.0) {
      Eigen::ColPivHouseholderQR<MatrixXd> qr(gram[c]);
      if (qr.rank() < dp) {
        throw Error(ErrorCode::SingularSystem, "class " + std::to_string(c) + " design has rank " +
                                                   std::to_string(qr.rank()) + " < " +
                                                   std::to_string(dp));
      }
      out.weights.row(static_cast<Index>(c)) = qr.solve(rhs[c]).transpose();
    } else {
      gram[c].diagonal().array() += cfg.ridge;
      Eigen::LLT<MatrixXd> llt(gram[c]);
      out.weights.row(static_cast<Index>(c)) = llt.solve(rhs[c]).transpose();
    }
  }
  return out;
}

SurrogateModel fit_surrogate(const model::PosteriorModel& model, const data::LabeledPool& pool,
                             const data::FeatureTable& table, const SurrogateConfig& cfg,
                             std::uint64_t fit_seed) {
  if (pool.empty()) throw Error(ErrorCode::EmptyPool, "surrogate fit on empty pool");
  const auto indices = pool.indices();
  return fit_surrogate(model, table.gather(indices), cfg, fit_seed);
}

}  // namespace alexbench::explainer
