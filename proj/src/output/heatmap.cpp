#include "alexbench/output/heatmap.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include "alexbench/error.hpp"

namespace alexbench::output {
namespace {

std::uint8_t clamp_byte(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

}  // namespace

Rgb diverging_color(double t) {
  t = std::clamp(t, -1.0, 1.0);
  const double hot = 128.0 + 127.0 * std::abs(t);
  const double cold = 128.0 - 128.0 * std::abs(t);
  if (t >= 0) return {clamp_byte(hot), clamp_byte(cold), clamp_byte(cold)};
  return {clamp_byte(cold), clamp_byte(cold), clamp_byte(hot)};
}

Rgb Raster::at(std::size_t row, std::size_t col) const {
  const std::size_t o = 3 * (row * width + col);
  return {rgb[o], rgb[o + 1], rgb[o + 2]};
}

Raster render_heatmap(const Eigen::Ref<const Eigen::VectorXd>& x, std::span<const double> attributions,
                      const explainer::PatchGrid& grid, std::size_t upscale) {
  grid.validate();
  if (static_cast<std::size_t>(x.size()) != grid.image_rows * grid.image_cols ||
      attributions.size() != grid.num_patches()) {
    throw Error(ErrorCode::DimensionMismatch, "image or attributions do not match the patch grid");
  }
  if (upscale == 0) throw Error(ErrorCode::InvalidValue, "upscale must be >= 1");
  double scale = 0.0;
  for (double a : attributions) {
    if (!std::isfinite(a)) throw Error(ErrorCode::InvalidValue, "attribution is not finite");
    scale = std::max(scale, std::abs(a));
  }

  Raster out;
  out.width = grid.image_cols * upscale;
  out.height = grid.image_rows * upscale;
  out.rgb.resize(out.width * out.height * 3);
  for (std::size_t r = 0; r < grid.image_rows; ++r) {
    for (std::size_t c = 0; c < grid.image_cols; ++c) {
      const std::size_t pixel = r * grid.image_cols + c;
      const double gray = 255.0 * std::clamp(x[static_cast<Eigen::Index>(pixel)], 0.0, 1.0);
      const double t = scale > 0 ? attributions[grid.patch_of_pixel(pixel)] / scale : 0.0;
      const Rgb color = diverging_color(t);
      Rgb blended;
      for (int ch = 0; ch < 3; ++ch) {
        blended[ch] = clamp_byte(kOverlayAlpha * color[ch] + (1.0 - kOverlayAlpha) * gray);
      }
      for (std::size_t dr = 0; dr < upscale; ++dr) {
        for (std::size_t dc = 0; dc < upscale; ++dc) {
          const std::size_t o = 3 * ((r * upscale + dr) * out.width + c * upscale + dc);
          std::copy(blended.begin(), blended.end(), out.rgb.begin() + static_cast<std::ptrdiff_t>(o));
        }
      }
    }
  }
  return out;
}

std::string encode_ppm(const Raster& raster) {
  std::string out = "P6\n" + std::to_string(raster.width) + " " + std::to_string(raster.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(raster.rgb.data()), raster.rgb.size());
  return out;
}

Raster decode_ppm(const std::string& bytes) {
  std::size_t pos = 0;
  auto token = [&] {
    while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return bytes.substr(start, pos - start);
  };
  if (token() != "P6") throw Error(ErrorCode::BadMagic, "not a binary PPM");
  Raster r;
  try {
    r.width = std::stoul(token());
    r.height = std::stoul(token());
    if (std::stoul(token()) != 255) throw Error(ErrorCode::InvalidValue, "PPM max value must be 255");
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::Truncated, "bad PPM header");
  }
  ++pos;  // single whitespace byte before the raster
  if (bytes.size() < pos || bytes.size() - pos != r.width * r.height * 3) {
    throw Error(ErrorCode::Truncated, "PPM raster has the wrong length");
  }
  r.rgb.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
  return r;
}

void render_heatmap(const data::FeatureVector& x, const explainer::ExplanationVector& e,
                    const explainer::PatchGrid& grid, const std::filesystem::path& path, std::size_t upscale) {
  const Eigen::Map<const Eigen::VectorXd> pixels(x.values.data(), static_cast<Eigen::Index>(x.values.size()));
  const std::string bytes = encode_ppm(render_heatmap(pixels, e.attributions, grid, upscale));
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

}  // namespace alexbench::output
