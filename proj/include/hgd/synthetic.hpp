#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "hgd/image.hpp"

namespace hgd::synthetic {

// Reproducible draws from a 64-bit Mersenne Twister (whose output sequence
// is fixed by the standard, unlike the std distributions).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi);  // inclusive
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

using Rgb = std::array<double, 3>;

// A block figure: head, torso with an optional stripe pattern, legs.
struct Identity {
  Rgb skin{};
  Rgb hair{};
  Rgb torso{};
  Rgb torso_accent{};
  int torso_pattern = 0;  // 0 solid, 1 horizontal stripes, 2 vertical band
  Rgb legs{};
  Rgb shoes{};
  int torso_width = 22;
  int leg_gap = 2;
};

Identity random_identity(Rng& rng);

struct CameraView {
  double gain = 1.0;    // multiplicative brightness
  double offset = 0.0;  // additive brightness
  int jitter = 2;       // max |dx|, |dy| in pixels
  double noise = 0.02;  // Gaussian sigma
  // Random background color plus colored rectangles, drawn afresh for every
  // image. Off: a plain mid-gray background shared by all views.
  bool cluttered = false;
};

// Renders a 48x128 view of the figure.
Image render(const Identity& who, const CameraView& view, Rng& rng);

}  // namespace hgd::synthetic
