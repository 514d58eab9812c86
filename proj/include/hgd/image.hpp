#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace hgd {

// Interleaved RGB, each channel in [0,1], row-major from the top-left.
class Image {
 public:
  Image() = default;
  Image(int width, int height);
  Image(int width, int height, std::vector<double> rgb);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return width_ == 0 || height_ == 0; }

  double& at(int x, int y, int c) { return data_[index(x, y, c)]; }
  double at(int x, int y, int c) const { return data_[index(x, y, c)]; }
  std::span<const double> data() const noexcept { return data_; }

  // Clamps every channel to [0,1].
  void clamp();

 private:
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * 3 + c;
  }
  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

// Bilinear resampling with pixel-center alignment and clamped borders.
Image resize(const Image& img, int width, int height);

Image mirror_horizontal(const Image& img);

enum class ColorSpace { RGB, Lab, HSV, nRnG };

inline constexpr std::array<ColorSpace, 4> kColorSpaces = {ColorSpace::RGB, ColorSpace::Lab,
                                                           ColorSpace::HSV, ColorSpace::nRnG};

std::string_view to_string(ColorSpace space);
int color_dims(ColorSpace space);

// Single-pixel conversions; outputs lie in [0,1].
std::array<double, 3> rgb_to_lab(double r, double g, double b);
std::array<double, 3> rgb_to_hsv(double r, double g, double b);
std::array<double, 2> rgb_to_nrng(double r, double g, double b);

// Color planes for the whole image: color_dims(space) values per pixel,
// interleaved in row-major pixel order.
std::vector<double> convert_color(const Image& img, ColorSpace space);

// PNG (8/16-bit, any channel layout) and binary PPM (P6). 8-bit values map
// to [0,1] by division by 255; no gamma linearization.
Image load_image(const std::filesystem::path& path);
Image decode_ppm(std::span<const std::uint8_t> bytes);
void save_ppm(const Image& img, const std::filesystem::path& path);
void save_png(const Image& img, const std::filesystem::path& path);

}  // namespace hgd
