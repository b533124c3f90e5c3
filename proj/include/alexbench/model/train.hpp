#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>

#include "alexbench/data/dataset.hpp"
#include "alexbench/data/pools.hpp"
#include "alexbench/model/classifier.hpp"

namespace alexbench::model {

struct TrainConfig {
  std::size_t epochs = 30;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  // Throws InvalidConfig on a non-positive learning rate, batch size or
  // epsilon, or moment coefficients outside [0, 1).
  void validate() const;
};

// Minibatch Adam on mean cross-entropy. Minibatch order is drawn from
// `shuffle_seed`; the result depends only on (model, data, cfg, shuffle_seed).
// Zero epochs returns the model unchanged.
ClassifierModel train(ClassifierModel model, const Eigen::MatrixXd& inputs,
                      std::span<const std::uint8_t> labels, const TrainConfig& cfg,
                      std::uint64_t shuffle_seed);

ClassifierModel train(ClassifierModel model, const data::LabeledPool& pool,
                      const data::FeatureTable& table, const TrainConfig& cfg, std::uint64_t shuffle_seed);

}  // namespace alexbench::model
