#include "alexbench/data/dataset.hpp"

#include "alexbench/error.hpp"

namespace alexbench::data {
namespace {

std::vector<std::uint8_t> read_idx_file(const std::filesystem::path& dir, const std::string& stem) {
  const auto plain = dir / stem;
  if (std::filesystem::exists(plain)) return maybe_gunzip(read_file(plain));
  const auto gz = dir / (stem + ".gz");
  if (std::filesystem::exists(gz)) return maybe_gunzip(read_file(gz));
  throw Error(ErrorCode::IoError, "missing " + plain.string() + "[.gz]");
}

}  // namespace

RawDataset make_dataset(ImageTensor images, std::vector<std::uint8_t> labels, Split split) {
  if (images.count != labels.size()) {
    throw Error(ErrorCode::ShapeMismatch, std::to_string(images.count) + " images but " +
                                              std::to_string(labels.size()) + " labels");
  }
  return RawDataset{std::move(images), std::move(labels), split};
}

RawDataset load_split(const std::filesystem::path& dir, Split split) {
  const std::string prefix = split == Split::Train ? "train" : "t10k";
  auto images = parse_idx_images(read_idx_file(dir, prefix + "-images-idx3-ubyte"));
  auto labels = parse_idx_labels(read_idx_file(dir, prefix + "-labels-idx1-ubyte"));
  if (images.rows != 28 || images.cols != 28) {
    throw Error(ErrorCode::ShapeMismatch, "expected 28x28 images, got " +
                                              std::to_string(images.rows) + "x" +
                                              std::to_string(images.cols));
  }
  return make_dataset(std::move(images), std::move(labels), split);
}

std::vector<double> normalize(std::span<const std::uint8_t> raw_pixels) {
  std::vector<double> out(raw_pixels.size());
  for (std::size_t i = 0; i < raw_pixels.size(); ++i) out[i] = raw_pixels[i] / 255.0;
  return out;
}

FeatureVector feature_vector(const ImageTensor& images, SourceIndex index) {
  return {normalize(images.image(index)), index};
}

FeatureTable::FeatureTable(std::shared_ptr<const ImageTensor> images) : images_(std::move(images)) {}

Eigen::VectorXd FeatureTable::column(SourceIndex index) const {
  const auto px = images_->image(index);
  Eigen::VectorXd v(px.size());
  for (std::size_t i = 0; i < px.size(); ++i) v[static_cast<Eigen::Index>(i)] = px[i] / 255.0;
  return v;
}

Eigen::MatrixXd FeatureTable::gather(std::span<const SourceIndex> indices) const {
  const auto d = static_cast<Eigen::Index>(dim());
  Eigen::MatrixXd out(d, static_cast<Eigen::Index>(indices.size()));
  for (std::size_t j = 0; j < indices.size(); ++j) {
    if (indices[j] >= size()) {
      throw Error(ErrorCode::DimensionMismatch, "source index " + std::to_string(indices[j]) +
                                                    " out of range");
    }
    const auto px = images_->image(indices[j]);
    for (Eigen::Index i = 0; i < d; ++i) out(i, static_cast<Eigen::Index>(j)) = px[i] / 255.0;
  }
  return out;
}

}  // namespace alexbench::data
