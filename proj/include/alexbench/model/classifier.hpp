#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "alexbench/data/dataset.hpp"
#include "alexbench/model/architecture.hpp"

namespace alexbench::model {

// Anything that maps a batch of instances (one per column) to class
// posteriors (one per column). The explainer and the selection strategies
// depend on this interface only.
class PosteriorModel {
 public:
  virtual ~PosteriorModel() = default;
  virtual std::size_t input_dim() const = 0;
  virtual std::size_t num_classes() const = 0;
  virtual Eigen::MatrixXd predict(const Eigen::MatrixXd& inputs) const = 0;
};

struct Posterior {
  std::vector<double> probs;

  std::size_t argmax() const;
};

class ClassifierModel final : public PosteriorModel {
 public:
  ClassifierModel(Architecture arch, Eigen::VectorXd parameters, std::uint64_t init_seed);

  const Architecture& architecture() const { return arch_; }
  const Eigen::VectorXd& parameters() const { return params_; }
  Eigen::VectorXd& parameters() { return params_; }
  std::uint64_t init_seed() const { return init_seed_; }

  std::size_t input_dim() const override { return arch_.input_dim(); }
  std::size_t num_classes() const override { return arch_.classes; }

  Eigen::MatrixXd logits(const Eigen::MatrixXd& inputs) const;
  Eigen::MatrixXd predict(const Eigen::MatrixXd& inputs) const override;

 private:
  friend struct Network;
  Architecture arch_;
  Eigen::VectorXd params_;
  std::uint64_t init_seed_ = 0;
};

// Fan-in scaled uniform (He) init for hidden layers; output layer zero.
ClassifierModel init_model(const Architecture& arch, std::uint64_t seed);

// Column-wise, max-shifted softmax.
Eigen::MatrixXd softmax(const Eigen::MatrixXd& logits);

Posterior predict_posterior(const PosteriorModel& model, const data::FeatureVector& x);

// Posteriors for `indices`, evaluated in chunks; classes x indices.size().
Eigen::MatrixXd predict_indices(const PosteriorModel& model, const data::FeatureTable& table,
                                std::span<const data::SourceIndex> indices);

struct LossGrad {
  double loss = 0.0;
  Eigen::VectorXd grad;
};

// Mean cross-entropy over the batch and its gradient w.r.t. the flat parameters.
LossGrad loss_and_grad(const ClassifierModel& model, const Eigen::MatrixXd& inputs,
                       std::span<const std::uint8_t> labels);

double mean_loss(const ClassifierModel& model, const Eigen::MatrixXd& inputs,
                 std::span<const std::uint8_t> labels);

// Sign pattern (1 = active) of every rectifier pre-activation for the batch.
// Two parameter vectors with equal patterns lie on the same smooth piece.
std::vector<std::uint8_t> rectifier_pattern(const ClassifierModel& model, const Eigen::MatrixXd& inputs);
// Smallest |pre-activation| over every rectifier unit for the batch.
double rectifier_gap(const ClassifierModel& model, const Eigen::MatrixXd& inputs);

// Largest posterior; lower means less confident.
double uncertainty_score(std::span<const double> posterior);
// Top-1 minus top-2 probability; lower means closer to a decision boundary.
double margin_score(std::span<const double> posterior);

// Checkpoint: one descriptor line, then little-endian float32 parameters.
void save_model(const ClassifierModel& model, const std::filesystem::path& path);
ClassifierModel load_model(const std::filesystem::path& path);

}  // namespace alexbench::model
