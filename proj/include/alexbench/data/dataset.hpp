#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "alexbench/data/idx.hpp"

namespace alexbench::data {

using SourceIndex = std::uint32_t;

enum class Split { Train, Test };

struct RawDataset {
  ImageTensor images;
  std::vector<std::uint8_t> labels;
  Split split = Split::Train;

  std::size_t size() const { return labels.size(); }
};

// Validates that image and label counts agree.
RawDataset make_dataset(ImageTensor images, std::vector<std::uint8_t> labels, Split split);

// Reads {train,t10k}-{images-idx3,labels-idx1}-ubyte from `dir`, accepting an
// optional ".gz" suffix. Both supported datasets are 28x28.
RawDataset load_split(const std::filesystem::path& dir, Split split);

struct FeatureVector {
  std::vector<double> values;  // raw / 255, in [0, 1]
  SourceIndex source_index = 0;
};

std::vector<double> normalize(std::span<const std::uint8_t> raw_pixels);

FeatureVector feature_vector(const ImageTensor& images, SourceIndex index);

// Read-only view over image pixels with no access to labels. Strategies and
// the explainer receive features through this type only.
class FeatureTable {
 public:
  FeatureTable() = default;
  explicit FeatureTable(std::shared_ptr<const ImageTensor> images);

  std::size_t size() const { return images_ ? images_->count : 0; }
  std::size_t dim() const { return images_ ? images_->image_size() : 0; }
  std::size_t rows() const { return images_ ? images_->rows : 0; }
  std::size_t cols() const { return images_ ? images_->cols : 0; }

  Eigen::VectorXd column(SourceIndex index) const;
  // d x n matrix, one normalised instance per column.
  Eigen::MatrixXd gather(std::span<const SourceIndex> indices) const;

  const ImageTensor& images() const { return *images_; }

 private:
  std::shared_ptr<const ImageTensor> images_;
};

}  // namespace alexbench::data
