#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "alexbench/data/dataset.hpp"
#include "alexbench/explainer/divergence.hpp"
#include "alexbench/explainer/surrogate.hpp"

namespace alexbench::output {

inline constexpr std::size_t kDefaultUpscale = 8;
inline constexpr double kOverlayAlpha = 0.6;

using Rgb = std::array<std::uint8_t, 3>;

// Diverging palette on t in [-1, 1]: red for t > 0, blue for t < 0, gray 128 at 0.
Rgb diverging_color(double t);

struct Raster {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

  Rgb at(std::size_t row, std::size_t col) const;
};

// Patch attributions over the grayscale image `x` (values in [0, 1]),
// normalised by max |e|, blended at kOverlayAlpha and upscaled.
Raster render_heatmap(const Eigen::Ref<const Eigen::VectorXd>& x, std::span<const double> attributions,
                      const explainer::PatchGrid& grid, std::size_t upscale = kDefaultUpscale);

std::string encode_ppm(const Raster& raster);
Raster decode_ppm(const std::string& bytes);

// Renders and writes a binary PPM; throws IoError.
void render_heatmap(const data::FeatureVector& x, const explainer::ExplanationVector& e,
                    const explainer::PatchGrid& grid, const std::filesystem::path& path,
                    std::size_t upscale = kDefaultUpscale);

}  // namespace alexbench::output
