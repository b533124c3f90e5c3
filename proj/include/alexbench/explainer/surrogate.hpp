#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

#include "alexbench/data/dataset.hpp"
#include "alexbench/data/pools.hpp"
#include "alexbench/model/classifier.hpp"
#include "alexbench/random.hpp"

namespace alexbench::explainer {

// Partition of an image into patch_rows x patch_cols equal blocks. Each block
// is one attribution feature.
struct PatchGrid {
  std::size_t image_rows = 28;
  std::size_t image_cols = 28;
  std::size_t patch_rows = 14;
  std::size_t patch_cols = 14;

  // Square blocks of side `patch_size` pixels.
  static PatchGrid square(std::size_t image_rows, std::size_t image_cols, std::size_t patch_size);

  std::size_t num_patches() const { return patch_rows * patch_cols; }
  std::size_t block_rows() const { return image_rows / patch_rows; }
  std::size_t block_cols() const { return image_cols / patch_cols; }
  std::size_t patch_of_pixel(std::size_t pixel) const;

  // Throws BadGrid unless the blocks tile the image exactly.
  void validate() const;

  friend bool operator==(const PatchGrid&, const PatchGrid&) = default;
};

Eigen::VectorXd patch_means(const PatchGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& x);

// Replicates patch bits onto the pixel grid.
Eigen::VectorXd expand_mask(const PatchGrid& grid, std::span<const std::uint8_t> bits);

struct PerturbationMask {
  std::vector<std::uint8_t> bits;  // one per patch
};

struct NeighborSample {
  PerturbationMask mask;
  Eigen::VectorXd z;  // x with masked-out patches set to zero
};

// m samples z = x (*) expand(u), u_i ~ Bernoulli(1/2) independently per patch.
std::vector<NeighborSample> sample_neighborhood(const Eigen::Ref<const Eigen::VectorXd>& x, std::size_t m,
                                                const PatchGrid& grid, Rng& rng);

enum class SampleWeighting { Uniform, ShapleyKernel };

struct SurrogateConfig {
  std::size_t samples_per_instance = 64;
  double ridge = 1e-3;
  PatchGrid grid;
  SampleWeighting weighting = SampleWeighting::Uniform;
};

struct SurrogateModel {
  Eigen::MatrixXd weights;  // classes x patches, one row per class
  PatchGrid grid;
  std::uint64_t fit_seed = 0;
  std::vector<std::size_t> instances_per_class;  // rows with zero count are all-zero
};

// Pooled ridge fit of the local linear surrogate. Every instance contributes
// its neighbourhood to the system of its predicted class l, with target
// theta(z)_l and regressors patch_means(z).
SurrogateModel fit_surrogate(const model::PosteriorModel& model, const Eigen::MatrixXd& instances,
                             const SurrogateConfig& cfg, std::uint64_t fit_seed);

SurrogateModel fit_surrogate(const model::PosteriorModel& model, const data::LabeledPool& pool,
                             const data::FeatureTable& table, const SurrogateConfig& cfg,
                             std::uint64_t fit_seed);

// Weight of a mask with `ones` kept patches out of `patches`, before
// normalisation. Endpoints take the weight of a single kept/dropped patch.
double shapley_kernel_log_weight(std::size_t patches, std::size_t ones);

}  // namespace alexbench::explainer
