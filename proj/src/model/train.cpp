#include "alexbench/model/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "alexbench/error.hpp"
#include "alexbench/random.hpp"
#include "network.hpp"

namespace alexbench::model {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void TrainConfig::validate() const {
  if (epochs > 100000) throw Error(ErrorCode::InvalidConfig, "epochs out of range");
  if (batch_size == 0) throw Error(ErrorCode::InvalidConfig, "batch size must be positive");
  if (!(learning_rate > 0.0)) throw Error(ErrorCode::InvalidConfig, "learning rate must be positive");
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidConfig, "epsilon must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "moment coefficients must lie in [0, 1)");
  }
}

ClassifierModel train(ClassifierModel model, const MatrixXd& inputs, std::span<const std::uint8_t> labels,
                      const TrainConfig& cfg, std::uint64_t shuffle_seed) {
  cfg.validate();
  if (inputs.cols() == 0) throw Error(ErrorCode::EmptyPool, "training set is empty");
  if (static_cast<std::size_t>(inputs.cols()) != labels.size()) {
    throw Error(ErrorCode::DimensionMismatch, "label count differs from instance count");
  }
  const Architecture& arch = model.architecture();
  VectorXd& params = model.parameters();
  VectorXd m = VectorXd::Zero(params.size());
  VectorXd v = VectorXd::Zero(params.size());
  VectorXd grad;

  const std::size_t n = labels.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(shuffle_seed);

  MatrixXd batch;
  std::vector<std::uint8_t> batch_labels;
  double beta1_t = 1.0, beta2_t = 1.0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t len = std::min(cfg.batch_size, n - start);
      batch.resize(inputs.rows(), static_cast<Index>(len));
      batch_labels.resize(len);
      for (std::size_t j = 0; j < len; ++j) {
        batch.col(static_cast<Index>(j)) = inputs.col(static_cast<Index>(order[start + j]));
        batch_labels[j] = labels[order[start + j]];
      }
      detail::backward(arch, params, batch, batch_labels, grad);

      beta1_t *= cfg.beta1;
      beta2_t *= cfg.beta2;
      m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
      v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.cwiseAbs2();
      const double step = cfg.learning_rate / (1.0 - beta1_t);
      const double v_scale = 1.0 / (1.0 - beta2_t);
      params.array() -= step * m.array() / ((v.array() * v_scale).sqrt() + cfg.epsilon);
    }
  }
  return model;
}

ClassifierModel train(ClassifierModel model, const data::LabeledPool& pool, const data::FeatureTable& table,
                      const TrainConfig& cfg, std::uint64_t shuffle_seed) {
  if (pool.empty()) throw Error(ErrorCode::EmptyPool, "labeled pool is empty");
  const auto indices = pool.indices();
  std::vector<std::uint8_t> labels;
  labels.reserve(pool.size());
  for (const auto& e : pool.entries()) labels.push_back(e.label);
  return train(std::move(model), table.gather(indices), labels, cfg, shuffle_seed);
}

}  // namespace alexbench::model
