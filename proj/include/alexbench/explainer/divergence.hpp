#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

#include "alexbench/data/dataset.hpp"
#include "alexbench/data/pools.hpp"
#include "alexbench/explainer/surrogate.hpp"
#include "alexbench/model/classifier.hpp"

namespace alexbench::explainer {

struct ExplanationVector {
  std::vector<double> attributions;  // one per patch, signed
  std::size_t class_index = 0;
};

// Elementwise product of the surrogate row for `class_index` with the patch
// means of x.
ExplanationVector explain(const SurrogateModel& surrogate, const Eigen::Ref<const Eigen::VectorXd>& x,
                          std::size_t class_index);

// As above, explaining the model's argmax class for x.
ExplanationVector explanation_vector(const SurrogateModel& surrogate, const data::FeatureVector& x,
                                     const model::PosteriorModel& model);

inline constexpr double kDistributionEpsilon = 1e-8;

// (|e_i| + eps) / sum_j (|e_j| + eps)
std::vector<double> to_distribution(std::span<const double> e, double eps = kDistributionEpsilon);

// sum_i p_i ln(p_i / q_i)
double kld(std::span<const double> p, std::span<const double> q);

// Mean of kld(p_u, q) over the labeled distributions (one per column).
double mean_divergence(std::span<const double> p_u, const Eigen::MatrixXd& labeled_distributions);

double mean_divergence(const data::FeatureVector& x_u, const data::LabeledPool& labeled,
                       const data::FeatureTable& table, const SurrogateModel& surrogate,
                       const model::PosteriorModel& model);

// Explanation distributions for a batch of instances (columns), each
// explained for the given class. patches x n.
Eigen::MatrixXd explanation_distributions(const SurrogateModel& surrogate, const Eigen::MatrixXd& instances,
                                          std::span<const std::size_t> classes,
                                          double eps = kDistributionEpsilon);

}  // namespace alexbench::explainer
