#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace alexbench::model {

enum class ArchKind { Dense, Conv };

// conv:  [conv kxk, `filters` maps, valid padding, stride 1, ReLU] -> dense `hidden` ReLU -> dense `classes` softmax
// dense: flatten -> dense `hidden` ReLU -> dense `classes` softmax
struct Architecture {
  ArchKind kind = ArchKind::Dense;
  std::size_t image_rows = 28;
  std::size_t image_cols = 28;
  std::size_t kernel = 3;
  std::size_t filters = 32;
  std::size_t hidden = 128;
  std::size_t classes = 10;

  static Architecture dense(std::size_t rows = 28, std::size_t cols = 28);
  static Architecture conv(std::size_t rows = 28, std::size_t cols = 28);

  std::size_t input_dim() const { return image_rows * image_cols; }
  std::size_t conv_rows() const { return image_rows - kernel + 1; }
  std::size_t conv_cols() const { return image_cols - kernel + 1; }
  std::size_t conv_positions() const { return conv_rows() * conv_cols(); }
  // Width of the vector fed into the hidden dense layer.
  std::size_t feature_dim() const;
  std::size_t parameter_count() const;

  // Throws UnsupportedArchitecture on zero sizes or a kernel larger than the image.
  void validate() const;

  // Single-line text form, e.g. "dense rows=28 cols=28 hidden=128 classes=10".
  std::string descriptor() const;
  static Architecture parse(std::string_view descriptor);

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

std::string_view to_string(ArchKind kind);
ArchKind parse_arch_kind(std::string_view name);

}  // namespace alexbench::model
