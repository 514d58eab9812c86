#include "hgd/synthetic.hpp"

#include <algorithm>
#include <cmath>

namespace hgd::synthetic {

int Rng::integer(int lo, int hi) {
  return lo + static_cast<int>(std::floor(uniform() * (hi - lo + 1)));
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2 * M_PI * u2);
  has_spare_ = true;
  return r * std::cos(2 * M_PI * u2);
}

namespace {

Rgb hsv_color(double h, double s, double v) {
  const double c = v * s;
  const double hp = std::fmod(h, 1.0) * 6.0;
  const double x = c * (1 - std::fabs(std::fmod(hp, 2.0) - 1));
  Rgb rgb{};
  switch (static_cast<int>(hp)) {
    case 0: rgb = {c, x, 0}; break;
    case 1: rgb = {x, c, 0}; break;
    case 2: rgb = {0, c, x}; break;
    case 3: rgb = {0, x, c}; break;
    case 4: rgb = {x, 0, c}; break;
    default: rgb = {c, 0, x}; break;
  }
  const double m = v - c;
  for (auto& ch : rgb) ch += m;
  return rgb;
}

Rgb random_color(Rng& rng) { return hsv_color(rng.uniform(), rng.uniform(0.2, 0.95), rng.uniform(0.2, 0.95)); }

void fill(Image& img, int x0, int y0, int x1, int y1, const Rgb& c) {
  x0 = std::max(x0, 0);
  y0 = std::max(y0, 0);
  x1 = std::min(x1, img.width());
  y1 = std::min(y1, img.height());
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x)
      for (int k = 0; k < 3; ++k) img.at(x, y, k) = c[k];
}

}  // namespace

Identity random_identity(Rng& rng) {
  Identity id;
  id.skin = hsv_color(rng.uniform(0.02, 0.1), rng.uniform(0.3, 0.6), rng.uniform(0.45, 0.95));
  id.hair = hsv_color(rng.uniform(0.0, 0.12), rng.uniform(0.2, 0.8), rng.uniform(0.05, 0.5));
  id.torso = random_color(rng);
  id.torso_accent = random_color(rng);
  id.torso_pattern = rng.integer(0, 2);
  id.legs = random_color(rng);
  id.shoes = hsv_color(rng.uniform(), rng.uniform(0.0, 0.4), rng.uniform(0.05, 0.4));
  id.torso_width = rng.integer(18, 26);
  id.leg_gap = rng.integer(1, 4);
  return id;
}

Image render(const Identity& who, const CameraView& view, Rng& rng) {
  constexpr int W = 48, H = 128;
  Image img(W, H);

  if (view.cluttered) {
    const Rgb base = hsv_color(rng.uniform(), rng.uniform(0.0, 0.5), rng.uniform(0.3, 0.8));
    fill(img, 0, 0, W, H, base);
    const int clutter = rng.integer(3, 7);
    for (int i = 0; i < clutter; ++i) {
      const int x0 = rng.integer(-10, W - 4), y0 = rng.integer(-10, H - 4);
      fill(img, x0, y0, x0 + rng.integer(4, 16), y0 + rng.integer(4, 40), random_color(rng));
    }
  } else {
    fill(img, 0, 0, W, H, Rgb{0.5, 0.5, 0.5});
  }

  const int dx = rng.integer(-view.jitter, view.jitter);
  const int dy = rng.integer(-view.jitter, view.jitter);
  const int cx = W / 2 + dx;

  // Head and hair.
  fill(img, cx - 5, 4 + dy, cx + 5, 10 + dy, who.hair);
  fill(img, cx - 5, 10 + dy, cx + 5, 22 + dy, who.skin);
  // Torso.
  const int half = who.torso_width / 2;
  const int ty0 = 22 + dy, ty1 = 66 + dy;
  fill(img, cx - half, ty0, cx + half, ty1, who.torso);
  if (who.torso_pattern == 1) {
    for (int y = ty0 + 3; y < ty1; y += 8) fill(img, cx - half, y, cx + half, y + 4, who.torso_accent);
  } else if (who.torso_pattern == 2) {
    fill(img, cx - 3, ty0, cx + 3, ty1, who.torso_accent);
  }
  // Arms in the torso color, slightly darker.
  Rgb arm = who.torso;
  for (auto& c : arm) c *= 0.8;
  fill(img, cx - half - 4, ty0 + 2, cx - half, ty1 - 6, arm);
  fill(img, cx + half, ty0 + 2, cx + half + 4, ty1 - 6, arm);
  // Legs and shoes.
  const int gap = who.leg_gap;
  fill(img, cx - gap - 8, ty1, cx - gap, 118 + dy, who.legs);
  fill(img, cx + gap, ty1, cx + gap + 8, 118 + dy, who.legs);
  fill(img, cx - gap - 9, 118 + dy, cx - gap, 124 + dy, who.shoes);
  fill(img, cx + gap, 118 + dy, cx + gap + 9, 124 + dy, who.shoes);

  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x)
      for (int k = 0; k < 3; ++k) img.at(x, y, k) = img.at(x, y, k) * view.gain + view.offset + view.noise * rng.normal();
  img.clamp();
  return img;
}

}  // namespace hgd::synthetic
