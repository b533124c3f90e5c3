#pragma once

// IDX container (big-endian header, row-major payload).
//
// images: [0x00000803][n][rows][cols][n*rows*cols bytes]
// labels: [0x00000801][n][n bytes]

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace alexbench::data {

inline constexpr std::uint32_t kImageMagic = 0x00000803;
inline constexpr std::uint32_t kLabelMagic = 0x00000801;
inline constexpr std::uint32_t kMaxDimension = 100'000'000;
inline constexpr std::uint8_t kNumClasses = 10;

struct ImageTensor {
  std::uint32_t count = 0;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::uint8_t> pixels;  // count * rows * cols, row-major per image

  std::size_t image_size() const { return std::size_t{rows} * cols; }
  std::span<const std::uint8_t> image(std::size_t i) const {
    return {pixels.data() + i * image_size(), image_size()};
  }
};

ImageTensor parse_idx_images(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes,
                                           std::uint8_t num_classes = kNumClasses);

std::vector<std::uint8_t> write_idx_images(const ImageTensor& images);
std::vector<std::uint8_t> write_idx_labels(std::span<const std::uint8_t> labels);

// Inflates the payload when it starts with the gzip signature 0x1F 0x8B,
// otherwise returns it unchanged.
std::vector<std::uint8_t> maybe_gunzip(std::vector<std::uint8_t> bytes);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

}  // namespace alexbench::data
