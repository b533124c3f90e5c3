#include "alexbench/explainer/divergence.hpp"

#include <cmath>

#include "alexbench/error.hpp"

namespace alexbench::explainer {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

ExplanationVector explain(const SurrogateModel& surrogate, const Eigen::Ref<const VectorXd>& x,
                          std::size_t class_index) {
  if (class_index >= static_cast<std::size_t>(surrogate.weights.rows())) {
    throw Error(ErrorCode::DimensionMismatch, "class index outside surrogate");
  }
  if (surrogate.weights.cols() != static_cast<Index>(surrogate.grid.num_patches())) {
    throw Error(ErrorCode::DimensionMismatch, "surrogate weights do not match its grid");
  }
  const VectorXd means = patch_means(surrogate.grid, x);
  const VectorXd e = surrogate.weights.row(static_cast<Index>(class_index)).transpose().cwiseProduct(means);
  return {{e.data(), e.data() + e.size()}, class_index};
}

ExplanationVector explanation_vector(const SurrogateModel& surrogate, const data::FeatureVector& x,
                                     const model::PosteriorModel& model) {
  const auto posterior = model::predict_posterior(model, x);
  const VectorXd v = Eigen::Map<const VectorXd>(x.values.data(), static_cast<Index>(x.values.size()));
  return explain(surrogate, v, posterior.argmax());
}

std::vector<double> to_distribution(std::span<const double> e, double eps) {
  std::vector<double> out(e.size());
  double total = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    out[i] = std::abs(e[i]) + eps;
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

double kld(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw Error(ErrorCode::DimensionMismatch, "kld of vectors with lengths " + std::to_string(p.size()) +
                                                  " and " + std::to_string(q.size()));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += p[i] * std::log(p[i] / q[i]);
  return total;
}

double mean_divergence(std::span<const double> p_u, const MatrixXd& labeled_distributions) {
  if (labeled_distributions.cols() == 0) throw Error(ErrorCode::EmptyPool, "mean divergence over empty pool");
  if (static_cast<std::size_t>(labeled_distributions.rows()) != p_u.size()) {
    throw Error(ErrorCode::DimensionMismatch, "distribution lengths differ");
  }
  double total = 0.0;
  for (Index j = 0; j < labeled_distributions.cols(); ++j) {
    total += kld(p_u, {labeled_distributions.col(j).data(), p_u.size()});
  }
  return total / static_cast<double>(labeled_distributions.cols());
}

MatrixXd explanation_distributions(const SurrogateModel& surrogate, const MatrixXd& instances,
                                   std::span<const std::size_t> classes, double eps) {
  if (static_cast<std::size_t>(instances.cols()) != classes.size()) {
    throw Error(ErrorCode::DimensionMismatch, "one class index per instance required");
  }
  MatrixXd out(static_cast<Index>(surrogate.grid.num_patches()), instances.cols());
  for (Index j = 0; j < instances.cols(); ++j) {
    const auto e = explain(surrogate, instances.col(j), classes[static_cast<std::size_t>(j)]);
    const auto p = to_distribution(e.attributions, eps);
    out.col(j) = Eigen::Map<const VectorXd>(p.data(), out.rows());
  }
  return out;
}

double mean_divergence(const data::FeatureVector& x_u, const data::LabeledPool& labeled,
                       const data::FeatureTable& table, const SurrogateModel& surrogate,
                       const model::PosteriorModel& model) {
  if (labeled.empty()) throw Error(ErrorCode::EmptyPool, "mean divergence over empty pool");
  const auto p_u = to_distribution(explanation_vector(surrogate, x_u, model).attributions);
  const auto indices = labeled.indices();
  const MatrixXd inputs = table.gather(indices);
  const MatrixXd posteriors = model.predict(inputs);
  std::vector<std::size_t> classes(indices.size());
  for (std::size_t j = 0; j < classes.size(); ++j) {
    Index c = 0;
    posteriors.col(static_cast<Index>(j)).maxCoeff(&c);
    classes[j] = static_cast<std::size_t>(c);
  }
  return mean_divergence(p_u, explanation_distributions(surrogate, inputs, classes));
}

}  // namespace alexbench::explainer
