#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "adsight/domain.hpp"
#include "adsight/layout.hpp"

namespace adsight {

// Kernel radius in source-page pixels; rescaled into output pixels by the
// ratio of the render size to the page width.
constexpr double kHeatmapRadiusPx = 25.0;
constexpr int kMinRasterSize = 64;
// Fraction of the image size a segment holding 100% of the dwell would get as
// line thickness.
constexpr double kThicknessScale = 0.05;
// Grey fills for the four standard categories under slot-specific shading,
// indexed by category code; auxiliary boxes are never drawn.
constexpr std::array<std::uint8_t, 4> kCategoryGreys = {200, 170, 140, 110};
constexpr std::uint8_t kUniformGrey = 170;
constexpr std::uint8_t kOutlineGrey = 128;

// Row-major 8-bit RGB image.
struct RasterImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // 3 * width * height bytes

  static RasterImage solid(int width, int height, std::uint8_t r, std::uint8_t g,
                           std::uint8_t b);

  std::uint8_t at(int x, int y, int c) const {
    return data[3 * (static_cast<std::size_t>(y) * width + x) + c];
  }
  void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const std::size_t base = 3 * (static_cast<std::size_t>(y) * width + x);
    data[base] = r;
    data[base + 1] = g;
    data[base + 2] = b;
  }
};

// Pre-normalization Gaussian accumulation field (rows indexed by y). Each
// sample stamps one truncated-Gaussian template at its nearest pixel, so
// every deposit carries identical mass and overlaps add exactly; exposed
// separately from render_heatmap so the cumulative properties are checkable.
Eigen::MatrixXd heatmap_field(const Trial& trial, int size);

// Cumulative Gaussian heatmap, min-max normalized through a monochrome-to-hot
// ramp, with the standard slot boxes outlined in grey on top.
RasterImage render_heatmap(const Trial& trial, const AugmentedLayout& layout, int size);

// Cursor polyline colored green-to-red by sequence position, segment
// thickness proportional to its share of the total dwell (1 px floor),
// start/end markers, standard slot boxes filled grey (uniform or per-category
// levels when slot_specific_grey).
RasterImage render_trajectory(const Trial& trial, const AugmentedLayout& layout, int size,
                              bool slot_specific_grey);

// Thickness rule for one segment, in output pixels.
double segment_thickness(double dwell_share, int size);

std::vector<std::uint8_t> encode_png(const RasterImage& image);
void write_png(const std::filesystem::path& path, const RasterImage& image);
void write_ppm(const std::filesystem::path& path, const RasterImage& image);

}  // namespace adsight
