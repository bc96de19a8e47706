#include "dart/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dart/event_io.hpp"

namespace dart {

namespace {

struct Rgb {
  uint8_t r, g, b;
};

constexpr Rgb kBackground{255, 255, 255};
constexpr Rgb kPositive{220, 40, 40};  // red
constexpr Rgb kNegative{0, 160, 200};  // cyan
constexpr Rgb kBox{0, 153, 0};
constexpr Rgb kLine{60, 60, 60};

void put(std::vector<uint8_t>& px, int width, int x, int y, Rgb c) {
  const size_t i = (static_cast<size_t>(y) * width + x) * 3;
  px[i] = c.r;
  px[i + 1] = c.g;
  px[i + 2] = c.b;
}

void put_clipped(std::vector<uint8_t>& px, int width, int height, int x, int y, Rgb c) {
  if (x < 0 || x >= width || y < 0 || y >= height) return;
  put(px, width, x, y, c);
}

void draw_line(std::vector<uint8_t>& px, int width, int height, const MatchLine& l,
               Rgb c) {
  int x0 = l.x0, y0 = l.y0;
  const int dx = std::abs(l.x1 - x0), dy = -std::abs(l.y1 - y0);
  const int sx = x0 < l.x1 ? 1 : -1, sy = y0 < l.y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    put_clipped(px, width, height, x0, y0, c);
    if (x0 == l.x1 && y0 == l.y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

}  // namespace

bool render_overlay(const EventStream& stream, uint64_t t0, uint64_t t1,
                    const std::vector<BoundingBox>& boxes,
                    const std::vector<MatchLine>& lines, const std::string& out_path) {
  if (t0 > t1) throw ConfigError("render: t0 > t1");
  const int width = stream.width, height = stream.height;
  if (width <= 0 || height <= 0) throw ConfigError("render: empty sensor");
  std::vector<uint8_t> px(static_cast<size_t>(width) * height * 3);
  for (size_t i = 0; i < px.size(); i += 3) {
    px[i] = kBackground.r;
    px[i + 1] = kBackground.g;
    px[i + 2] = kBackground.b;
  }

  bool any = false;
  for (const Event& e : stream.events) {
    if (e.t < t0) continue;
    if (e.t >= t1) break;
    any = true;
    put_clipped(px, width, height, e.x, e.y, e.p ? kPositive : kNegative);
  }

  for (const BoundingBox& b : boxes) {
    for (int x = b.x_min; x <= b.x_max; ++x) {
      put_clipped(px, width, height, x, b.y_min, kBox);
      put_clipped(px, width, height, x, b.y_max, kBox);
    }
    for (int y = b.y_min; y <= b.y_max; ++y) {
      put_clipped(px, width, height, b.x_min, y, kBox);
      put_clipped(px, width, height, b.x_max, y, kBox);
    }
  }
  for (const MatchLine& l : lines) draw_line(px, width, height, l, kLine);

  char header[64];
  std::snprintf(header, sizeof(header), "P6\n%d %d\n255\n", width, height);
  std::vector<uint8_t> out(header, header + std::char_traits<char>::length(header));
  out.insert(out.end(), px.begin(), px.end());
  write_file_bytes(out_path, out);
  return any;
}

}  // namespace dart
