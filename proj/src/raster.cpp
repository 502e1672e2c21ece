#include "adsight/raster.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace adsight {

namespace {

void require_size(int size) {
  if (size < kMinRasterSize) {
    throw std::invalid_argument("render size must be at least " +
                                std::to_string(kMinRasterSize) + ", got " + std::to_string(size));
  }
}

// Normalized page coordinate -> continuous pixel coordinate.
double to_px(double v, int size) { return v * (size - 1); }

int clamp_px(double v, int size) {
  return std::clamp(static_cast<int>(std::lround(v)), 0, size - 1);
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(v, 0.0, 1.0)));
}

// Monochrome-to-hot ramp: black -> red -> yellow -> white.
void hot_ramp(double t, std::uint8_t* rgb) {
  rgb[0] = to_byte(3.0 * t);
  rgb[1] = to_byte(3.0 * t - 1.0);
  rgb[2] = to_byte(3.0 * t - 2.0);
}

double point_segment_distance(double px, double py, double ax, double ay, double bx, double by) {
  const double dx = bx - ax, dy = by - ay;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((px - ax) * dx + (py - ay) * dy) / len2, 0.0, 1.0);
  return std::hypot(px - (ax + t * dx), py - (ay + t * dy));
}

void draw_capsule(RasterImage& img, double ax, double ay, double bx, double by, double half_width,
                  std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const int x0 = std::clamp(static_cast<int>(std::floor(std::min(ax, bx) - half_width)) - 1, 0,
                            img.width - 1);
  const int x1 = std::clamp(static_cast<int>(std::ceil(std::max(ax, bx) + half_width)) + 1, 0,
                            img.width - 1);
  const int y0 = std::clamp(static_cast<int>(std::floor(std::min(ay, by) - half_width)) - 1, 0,
                            img.height - 1);
  const int y1 = std::clamp(static_cast<int>(std::ceil(std::max(ay, by) + half_width)) + 1, 0,
                            img.height - 1);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      if (point_segment_distance(x, y, ax, ay, bx, by) <= half_width) img.set(x, y, r, g, b);
    }
  }
}

void draw_disc(RasterImage& img, double cx, double cy, double radius, std::uint8_t r,
               std::uint8_t g, std::uint8_t b) {
  draw_capsule(img, cx, cy, cx, cy, radius, r, g, b);
}

struct PixelRect {
  int x0, y0, x1, y1;  // inclusive
};

PixelRect box_pixels(const SlotBox& box, int size) {
  return {clamp_px(to_px(box.x_min, size), size), clamp_px(to_px(box.y_min, size), size),
          clamp_px(to_px(box.x_max, size), size), clamp_px(to_px(box.y_max, size), size)};
}

void fill_rect(RasterImage& img, const PixelRect& r, std::uint8_t grey) {
  for (int y = r.y0; y <= r.y1; ++y) {
    for (int x = r.x0; x <= r.x1; ++x) img.set(x, y, grey, grey, grey);
  }
}

void outline_rect(RasterImage& img, const PixelRect& r, std::uint8_t grey) {
  for (int x = r.x0; x <= r.x1; ++x) {
    img.set(x, r.y0, grey, grey, grey);
    img.set(x, r.y1, grey, grey, grey);
  }
  for (int y = r.y0; y <= r.y1; ++y) {
    img.set(r.x0, y, grey, grey, grey);
    img.set(r.x1, y, grey, grey, grey);
  }
}

void push_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void push_chunk(std::vector<std::uint8_t>& out, const char type[4],
                const std::vector<std::uint8_t>& payload) {
  push_be32(out, static_cast<std::uint32_t>(payload.size()));
  const std::size_t start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), payload.begin(), payload.end());
  const uLong crc = crc32(0L, out.data() + start, static_cast<uInt>(out.size() - start));
  push_be32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

RasterImage RasterImage::solid(int width, int height, std::uint8_t r, std::uint8_t g,
                               std::uint8_t b) {
  RasterImage img;
  img.width = width;
  img.height = height;
  img.data.resize(3 * static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) img.set(x, y, r, g, b);
  }
  return img;
}

double segment_thickness(double dwell_share, int size) {
  return std::max(1.0, dwell_share * kThicknessScale * size);
}

Eigen::MatrixXd heatmap_field(const Trial& trial, int size) {
  require_size(size);
  Eigen::MatrixXd field = Eigen::MatrixXd::Zero(size, size);  // (y, x)

  const double radius =
      kHeatmapRadiusPx * size / static_cast<double>(std::max(1, trial.page_width_px));
  const double sigma = std::max(0.5 * radius, 1e-12);
  const int reach = std::max(1, static_cast<int>(std::ceil(radius)));

  // One truncated-Gaussian template, stamped at each sample's nearest pixel:
  // every deposit then carries identical mass, so overlaps accumulate exactly
  // sample-by-sample instead of drifting with subpixel phase.
  const int side = 2 * reach + 1;
  Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(side, side);
  for (int dy = -reach; dy <= reach; ++dy) {
    for (int dx = -reach; dx <= reach; ++dx) {
      const double d2 = static_cast<double>(dx) * dx + static_cast<double>(dy) * dy;
      if (d2 <= radius * radius) {
        kernel(dy + reach, dx + reach) = std::exp(-d2 / (2.0 * sigma * sigma));
      }
    }
  }

  for (const auto& sample : trial.cursor) {
    const int cx = clamp_px(to_px(sample.x, size), size);
    const int cy = clamp_px(to_px(sample.y, size), size);
    for (int dy = -reach; dy <= reach; ++dy) {
      const int y = cy + dy;
      if (y < 0 || y >= size) continue;
      for (int dx = -reach; dx <= reach; ++dx) {
        const int x = cx + dx;
        if (x < 0 || x >= size) continue;
        field(y, x) += kernel(dy + reach, dx + reach);
      }
    }
  }
  return field;
}

RasterImage render_heatmap(const Trial& trial, const AugmentedLayout& layout, int size) {
  Eigen::MatrixXd field = heatmap_field(trial, size);
  const double lo = field.minCoeff();
  const double hi = field.maxCoeff();
  const double span = hi - lo;

  RasterImage img = RasterImage::solid(size, size, 0, 0, 0);
  if (span > 0.0) {
    std::uint8_t rgb[3];
    for (int y = 0; y < size; ++y) {
      for (int x = 0; x < size; ++x) {
        hot_ramp((field(y, x) - lo) / span, rgb);
        img.set(x, y, rgb[0], rgb[1], rgb[2]);
      }
    }
  }
  for (const auto& slot : layout.slots) {
    if (!is_standard(slot.category)) continue;
    outline_rect(img, box_pixels(slot, size), kOutlineGrey);
  }
  return img;
}

RasterImage render_trajectory(const Trial& trial, const AugmentedLayout& layout, int size,
                              bool slot_specific_grey) {
  require_size(size);
  RasterImage img = RasterImage::solid(size, size, 255, 255, 255);

  for (const auto& slot : layout.slots) {
    if (!is_standard(slot.category)) continue;
    const std::uint8_t grey =
        slot_specific_grey ? kCategoryGreys[static_cast<std::size_t>(category_code(slot.category))]
                           : kUniformGrey;
    fill_rect(img, box_pixels(slot, size), grey);
  }

  const auto& cur = trial.cursor;
  if (cur.size() >= 2) {
    const int n_seg = static_cast<int>(cur.size()) - 1;
    const double total = cur.back().t - cur.front().t;
    for (int i = 0; i < n_seg; ++i) {
      const double share = total > 0.0 ? (cur[i + 1].t - cur[i].t) / total : 1.0 / n_seg;
      const double half = 0.5 * segment_thickness(share, size);
      const double s = n_seg > 1 ? static_cast<double>(i) / (n_seg - 1) : 0.0;
      draw_capsule(img, to_px(cur[i].x, size), to_px(cur[i].y, size), to_px(cur[i + 1].x, size),
                   to_px(cur[i + 1].y, size), half, to_byte(s), to_byte(1.0 - s), 0);
    }
  }
  if (!cur.empty()) {
    const double marker = std::max(2.0, size / 64.0);
    draw_disc(img, to_px(cur.front().x, size), to_px(cur.front().y, size), marker, 0, 255, 0);
    draw_disc(img, to_px(cur.back().x, size), to_px(cur.back().y, size), marker, 255, 0, 0);
  }
  return img;
}

std::vector<std::uint8_t> encode_png(const RasterImage& image) {
  // Raw scanlines: one zero filter byte, then the row's RGB bytes.
  const std::size_t row_bytes = 3 * static_cast<std::size_t>(image.width);
  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<std::size_t>(image.height) * (row_bytes + 1));
  for (int y = 0; y < image.height; ++y) {
    raw.push_back(0);
    const std::uint8_t* row = image.data.data() + static_cast<std::size_t>(y) * row_bytes;
    raw.insert(raw.end(), row, row + row_bytes);
  }

  uLongf z_len = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> z(z_len);
  if (compress2(z.data(), &z_len, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK) {
    throw std::runtime_error("PNG deflate failed");
  }
  z.resize(z_len);

  std::vector<std::uint8_t> out = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  std::vector<std::uint8_t> ihdr;
  push_be32(ihdr, static_cast<std::uint32_t>(image.width));
  push_be32(ihdr, static_cast<std::uint32_t>(image.height));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(2);  // color type: truecolor RGB
  ihdr.push_back(0);  // compression
  ihdr.push_back(0);  // filter
  ihdr.push_back(0);  // interlace
  push_chunk(out, "IHDR", ihdr);
  push_chunk(out, "IDAT", z);
  push_chunk(out, "IEND", {});
  return out;
}

void write_png(const std::filesystem::path& path, const RasterImage& image) {
  const std::vector<std::uint8_t> bytes = encode_png(image);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write image: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

void write_ppm(const std::filesystem::path& path, const RasterImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write image: " + path.string());
  out << "P6\n" << image.width << " " << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.data.data()),
            static_cast<std::streamsize>(image.data.size()));
}

}  // namespace adsight
