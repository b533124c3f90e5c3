#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "alexbench/data/dataset.hpp"
#include "alexbench/explainer/surrogate.hpp"
#include "alexbench/model/classifier.hpp"

namespace testing_support {

inline std::filesystem::path fixture(const std::string& rel) {
  return std::filesystem::path(ALEXBENCH_FIXTURE_DIR) / rel;
}

// Posteriors looked up by instance id, which is stored as the raw value of
// pixel 0 (so ids run 0..255).
class LookupModel final : public alexbench::model::PosteriorModel {
 public:
  LookupModel(std::size_t dim, Eigen::MatrixXd posteriors) : dim_(dim), post_(std::move(posteriors)) {}

  std::size_t input_dim() const override { return dim_; }
  std::size_t num_classes() const override { return static_cast<std::size_t>(post_.rows()); }
  Eigen::MatrixXd predict(const Eigen::MatrixXd& inputs) const override {
    Eigen::MatrixXd out(post_.rows(), inputs.cols());
    for (Eigen::Index j = 0; j < inputs.cols(); ++j) out.col(j) = post_.col(std::lround(inputs(0, j) * 255.0));
    return out;
  }

 private:
  std::size_t dim_;
  Eigen::MatrixXd post_;
};

// Output row l is weights.row(l) . patch_means(z) + bias[l]; linear in the
// surrogate's regressors by construction.
class PatchLinearModel final : public alexbench::model::PosteriorModel {
 public:
  PatchLinearModel(alexbench::explainer::PatchGrid grid, Eigen::MatrixXd weights, Eigen::VectorXd bias)
      : grid_(grid), w_(std::move(weights)), b_(std::move(bias)) {}

  std::size_t input_dim() const override { return grid_.image_rows * grid_.image_cols; }
  std::size_t num_classes() const override { return static_cast<std::size_t>(w_.rows()); }
  Eigen::MatrixXd predict(const Eigen::MatrixXd& inputs) const override {
    Eigen::MatrixXd out(w_.rows(), inputs.cols());
    for (Eigen::Index j = 0; j < inputs.cols(); ++j) {
      out.col(j) = w_ * alexbench::explainer::patch_means(grid_, inputs.col(j)) + b_;
    }
    return out;
  }

 private:
  alexbench::explainer::PatchGrid grid_;
  Eigen::MatrixXd w_;
  Eigen::VectorXd b_;
};

inline alexbench::data::FeatureTable table_of(const std::vector<std::vector<std::uint8_t>>& images,
                                              std::uint32_t rows, std::uint32_t cols) {
  auto t = std::make_shared<alexbench::data::ImageTensor>();
  t->count = static_cast<std::uint32_t>(images.size());
  t->rows = rows;
  t->cols = cols;
  for (const auto& im : images) t->pixels.insert(t->pixels.end(), im.begin(), im.end());
  return alexbench::data::FeatureTable(std::move(t));
}

// Random point on the simplex; with `coarse` the entries come from a small
// set so that exact ties between instances are common.
inline Eigen::VectorXd random_posterior(std::mt19937_64& rng, std::size_t classes, bool coarse) {
  Eigen::VectorXd p(static_cast<Eigen::Index>(classes));
  if (coarse) {
    std::uniform_int_distribution<int> pick(0, 2);
    for (auto& v : p) v = 1.0 + pick(rng);
  } else {
    std::exponential_distribution<double> e(1.0);
    for (auto& v : p) v = e(rng);
  }
  return p / p.sum();
}

struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() /
           ("alexbench-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

}  // namespace testing_support
