#include "hgd/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include <png.h>

#include "hgd/error.hpp"

namespace hgd {

Image::Image(int width, int height) : Image(width, height, {}) {}

Image::Image(int width, int height, std::vector<double> rgb)
    : width_(width), height_(height), data_(std::move(rgb)) {
  if (width < 0 || height < 0) fail(ErrorCode::ZeroDimension, "negative image size");
  const auto n = static_cast<std::size_t>(width) * height * 3;
  if (data_.empty()) data_.assign(n, 0.0);
  if (data_.size() != n) fail(ErrorCode::BadLength, "pixel buffer does not match image size");
}

void Image::clamp() {
  for (auto& v : data_) v = std::clamp(v, 0.0, 1.0);
}

Image resize(const Image& img, int width, int height) {
  if (width <= 0 || height <= 0) fail(ErrorCode::ZeroDimension, "resize target must be positive");
  if (img.empty()) fail(ErrorCode::ZeroDimension, "resize of an empty image");
  if (width == img.width() && height == img.height()) return img;

  Image out(width, height);
  const double sx = static_cast<double>(img.width()) / width;
  const double sy = static_cast<double>(img.height()) / height;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, img.height() - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double ty = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, img.width() - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, img.width() - 1);
      const double tx = fx - x0;
      for (int c = 0; c < 3; ++c) {
        const double top = (1 - tx) * img.at(x0, y0, c) + tx * img.at(x1, y0, c);
        const double bottom = (1 - tx) * img.at(x0, y1, c) + tx * img.at(x1, y1, c);
        out.at(x, y, c) = (1 - ty) * top + ty * bottom;
      }
    }
  }
  return out;
}

Image mirror_horizontal(const Image& img) {
  Image out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < 3; ++c) out.at(img.width() - 1 - x, y, c) = img.at(x, y, c);
  return out;
}

std::string_view to_string(ColorSpace space) {
  switch (space) {
    case ColorSpace::RGB: return "RGB";
    case ColorSpace::Lab: return "Lab";
    case ColorSpace::HSV: return "HSV";
    case ColorSpace::nRnG: return "nRnG";
  }
  return "?";
}

int color_dims(ColorSpace space) { return space == ColorSpace::nRnG ? 2 : 3; }

namespace {

double srgb_to_linear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
  constexpr double delta = 6.0 / 29.0;
  return t > delta * delta * delta ? std::cbrt(t) : t / (3 * delta * delta) + 4.0 / 29.0;
}

}  // namespace

std::array<double, 3> rgb_to_lab(double r, double g, double b) {
  // sRGB -> XYZ, D65 white.
  const double lr = srgb_to_linear(r), lg = srgb_to_linear(g), lb = srgb_to_linear(b);
  const double x = 0.4124564 * lr + 0.3575761 * lg + 0.1804375 * lb;
  const double y = 0.2126729 * lr + 0.7151522 * lg + 0.0721750 * lb;
  const double z = 0.0193339 * lr + 0.1191920 * lg + 0.9503041 * lb;
  const double fx = lab_f(x / 0.95047), fy = lab_f(y / 1.0), fz = lab_f(z / 1.08883);
  const double L = 116 * fy - 16;
  const double a = 500 * (fx - fy);
  const double bb = 200 * (fy - fz);
  return {std::clamp(L / 100.0, 0.0, 1.0), std::clamp((a + 128) / 255.0, 0.0, 1.0),
          std::clamp((bb + 128) / 255.0, 0.0, 1.0)};
}

std::array<double, 3> rgb_to_hsv(double r, double g, double b) {
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double chroma = mx - mn;
  double h = 0.0;
  if (chroma > 0) {
    if (mx == r) {
      h = std::fmod((g - b) / chroma, 6.0);
    } else if (mx == g) {
      h = (b - r) / chroma + 2.0;
    } else {
      h = (r - g) / chroma + 4.0;
    }
    h /= 6.0;
    if (h < 0) h += 1.0;
  }
  const double s = mx > 0 ? chroma / mx : 0.0;
  return {h, s, mx};
}

std::array<double, 2> rgb_to_nrng(double r, double g, double b) {
  const double sum = r + g + b;
  if (sum < 1e-6) return {1.0 / 3.0, 1.0 / 3.0};
  return {r / sum, g / sum};
}

std::vector<double> convert_color(const Image& img, ColorSpace space) {
  const int dims = color_dims(space);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(img.width()) * img.height() * dims);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double r = img.at(x, y, 0), g = img.at(x, y, 1), b = img.at(x, y, 2);
      switch (space) {
        case ColorSpace::RGB:
          out.insert(out.end(), {r, g, b});
          break;
        case ColorSpace::Lab: {
          const auto v = rgb_to_lab(r, g, b);
          out.insert(out.end(), v.begin(), v.end());
          break;
        }
        case ColorSpace::HSV: {
          const auto v = rgb_to_hsv(r, g, b);
          out.insert(out.end(), v.begin(), v.end());
          break;
        }
        case ColorSpace::nRnG: {
          const auto v = rgb_to_nrng(r, g, b);
          out.insert(out.end(), v.begin(), v.end());
          break;
        }
      }
    }
  }
  return out;
}

namespace {

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Image decode_png(std::span<const std::uint8_t> bytes, const std::string& name) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size())) {
    fail(ErrorCode::Decode, name + ": " + png.message);
  }
  png.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, pixels.data(), 0, nullptr)) {
    const std::string msg = png.message;
    png_image_free(&png);
    fail(ErrorCode::Decode, name + ": " + msg);
  }
  std::vector<double> rgb(pixels.size());
  std::transform(pixels.begin(), pixels.end(), rgb.begin(), [](std::uint8_t v) { return v / 255.0; });
  return Image(static_cast<int>(png.width), static_cast<int>(png.height), std::move(rgb));
}

}  // namespace

Image decode_ppm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&] {
    skip_space();
    long value = 0;
    const std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) value = value * 10 + (bytes[pos++] - '0');
    if (pos == start || value > (1L << 24)) fail(ErrorCode::Decode, "malformed PPM header");
    return static_cast<int>(value);
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') fail(ErrorCode::Decode, "not a binary PPM (P6)");
  pos = 2;
  const int width = read_int();
  const int height = read_int();
  const int maxval = read_int();
  if (maxval <= 0 || maxval > 65535) fail(ErrorCode::Decode, "bad PPM maxval");
  ++pos;  // single whitespace before the raster
  const int bpc = maxval < 256 ? 1 : 2;
  const std::size_t need = static_cast<std::size_t>(width) * height * 3 * bpc;
  if (bytes.size() < pos + need) fail(ErrorCode::Decode, "truncated PPM raster");
  std::vector<double> rgb(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < rgb.size(); ++i) {
    const unsigned v = bpc == 1 ? bytes[pos + i] : (bytes[pos + 2 * i] << 8) | bytes[pos + 2 * i + 1];
    rgb[i] = static_cast<double>(v) / maxval;
  }
  return Image(width, height, std::move(rgb));
}

Image load_image(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  if (bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0) return decode_png(bytes, path.string());
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') return decode_ppm(bytes);
  fail(ErrorCode::Decode, path.string() + ": unsupported image format");
}

namespace {

std::vector<std::uint8_t> quantize(const Image& img) {
  std::vector<std::uint8_t> out(img.data().size());
  std::transform(img.data().begin(), img.data().end(), out.begin(), [](double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  });
  return out;
}

}  // namespace

void save_ppm(const Image& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out << "P6\n" << img.width() << ' ' << img.height() << "\n255\n";
  const auto bytes = quantize(img);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::Io, "short write to " + path.string());
}

void save_png(const Image& img, const std::filesystem::path& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(img.width());
  png.height = static_cast<png_uint_32>(img.height());
  png.format = PNG_FORMAT_RGB;
  const auto bytes = quantize(img);
  if (!png_image_write_to_file(&png, path.c_str(), 0, bytes.data(), 0, nullptr)) {
    fail(ErrorCode::Io, path.string() + ": " + png.message);
  }
}

}  // namespace hgd
