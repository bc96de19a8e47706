#include "dart/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "dart/rng.hpp"

namespace dart {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr uint64_t kTickUs = 1000;
constexpr uint64_t kWindowUs = 10000;

double polygon_area(const std::vector<std::pair<double, double>>& v) {
  double a = 0.0;
  for (size_t i = 0; i < v.size(); ++i) {
    const auto& [x0, y0] = v[i];
    const auto& [x1, y1] = v[(i + 1) % v.size()];
    a += x0 * y1 - x1 * y0;
  }
  return 0.5 * a;
}

std::pair<double, double> trajectory_at(const std::vector<SynthWaypoint>& w,
                                        uint64_t t_us) {
  if (t_us <= w.front().t_us) return {w.front().x, w.front().y};
  if (t_us >= w.back().t_us) return {w.back().x, w.back().y};
  size_t i = 1;
  while (w[i].t_us < t_us) ++i;
  const SynthWaypoint& a = w[i - 1];
  const SynthWaypoint& b = w[i];
  const double f = static_cast<double>(t_us - a.t_us) / static_cast<double>(b.t_us - a.t_us);
  return {a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)};
}

}  // namespace

SyntheticScene synth_generate(const SyntheticSceneConfig& cfg, uint64_t seed) {
  if (cfg.width <= 0 || cfg.height <= 0) throw ConfigError("synth: empty sensor");
  if (cfg.shape.size() < 3 || std::fabs(polygon_area(cfg.shape)) < 1e-9)
    throw ConfigError("synth: degenerate shape");
  if (cfg.trajectory.empty()) throw ConfigError("synth: empty trajectory");
  for (size_t i = 1; i < cfg.trajectory.size(); ++i)
    if (cfg.trajectory[i].t_us <= cfg.trajectory[i - 1].t_us)
      throw ConfigError("synth: trajectory times must increase");
  if (cfg.edge_rate_per_px_per_ms < 0.0 || cfg.noise_rate_per_ms < 0.0)
    throw ConfigError("synth: negative rate");
  if (cfg.duration_us < kTickUs) throw ConfigError("synth: duration below one tick");

  Rng rng(seed);
  SyntheticScene scene;
  scene.stream.width = static_cast<uint16_t>(cfg.width);
  scene.stream.height = static_cast<uint16_t>(cfg.height);
  scene.stream.source = "synth";

  const uint64_t n_ticks = cfg.duration_us / kTickUs;
  const uint64_t n_windows = (cfg.duration_us + kWindowUs - 1) / kWindowUs;
  struct WindowBox {
    bool seen = false;
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  };
  std::vector<WindowBox> windows(n_windows);

  struct TickEvent {
    Event e;
    EventOrigin origin;
  };
  std::vector<TickEvent> tick_events;
  std::map<int, std::pair<float, float>> edge_pixels;  // packed pixel -> shape coord

  for (uint64_t tick = 0; tick < n_ticks; ++tick) {
    const uint64_t t0 = tick * kTickUs;
    const auto [cx, cy] = trajectory_at(cfg.trajectory, t0);
    const double angle =
        cfg.rotation_deg_per_s * (static_cast<double>(t0) * 1e-6) * kPi / 180.0;
    const double ca = std::cos(angle), sa = std::sin(angle);

    // Rasterize the polygon outline at sub-pixel steps; first sample to land
    // on a pixel defines that pixel's shape-frame correspondence.
    edge_pixels.clear();
    for (size_t i = 0; i < cfg.shape.size(); ++i) {
      const auto& [ax, ay] = cfg.shape[i];
      const auto& [bx, by] = cfg.shape[(i + 1) % cfg.shape.size()];
      const double len = std::hypot(bx - ax, by - ay);
      const int steps = std::max(1, static_cast<int>(std::ceil(len / 0.25)));
      for (int s = 0; s < steps; ++s) {
        const double f = static_cast<double>(s) / steps;
        const double sx = ax + f * (bx - ax);
        const double sy = ay + f * (by - ay);
        const double wx = cx + ca * sx - sa * sy;
        const double wy = cy + sa * sx + ca * sy;
        const long px = std::lround(wx), py = std::lround(wy);
        if (px < 0 || px >= cfg.width || py < 0 || py >= cfg.height) continue;
        edge_pixels.emplace(static_cast<int>(py) * cfg.width + static_cast<int>(px),
                            std::make_pair(static_cast<float>(sx), static_cast<float>(sy)));
      }
    }

    if (!edge_pixels.empty()) {
      WindowBox& wb = windows[t0 / kWindowUs];
      for (const auto& [packed, coord] : edge_pixels) {
        (void)coord;
        const int px = packed % cfg.width, py = packed / cfg.width;
        if (!wb.seen) {
          wb.seen = true;
          wb.x0 = wb.x1 = px;
          wb.y0 = wb.y1 = py;
        } else {
          wb.x0 = std::min(wb.x0, px);
          wb.x1 = std::max(wb.x1, px);
          wb.y0 = std::min(wb.y0, py);
          wb.y1 = std::max(wb.y1, py);
        }
      }
    }

    tick_events.clear();
    for (const auto& [packed, coord] : edge_pixels) {
      const uint64_t n = rng.poisson(cfg.edge_rate_per_px_per_ms);
      for (uint64_t j = 0; j < n; ++j) {
        Event e;
        e.x = static_cast<uint16_t>(packed % cfg.width);
        e.y = static_cast<uint16_t>(packed / cfg.width);
        e.t = t0 + rng.below(kTickUs);
        e.p = static_cast<uint8_t>(rng.next_u64() & 1);
        tick_events.push_back({e, {true, coord.first, coord.second}});
      }
    }
    const uint64_t n_noise = rng.poisson(cfg.noise_rate_per_ms);
    for (uint64_t j = 0; j < n_noise; ++j) {
      Event e;
      e.x = static_cast<uint16_t>(rng.below(cfg.width));
      e.y = static_cast<uint16_t>(rng.below(cfg.height));
      e.t = t0 + rng.below(kTickUs);
      e.p = static_cast<uint8_t>(rng.next_u64() & 1);
      tick_events.push_back({e, {false, 0.0f, 0.0f}});
    }

    std::stable_sort(tick_events.begin(), tick_events.end(),
                     [](const TickEvent& a, const TickEvent& b) { return a.e.t < b.e.t; });
    for (const TickEvent& te : tick_events) {
      scene.stream.events.push_back(te.e);
      scene.origins.push_back(te.origin);
    }
  }

  for (uint64_t w = 0; w < n_windows; ++w) {
    AnnotationInterval iv;
    iv.t_start = w * kWindowUs;
    iv.t_end = std::min((w + 1) * kWindowUs, cfg.duration_us);
    if (windows[w].seen)
      iv.box = BoundingBox{windows[w].x0, windows[w].y0, windows[w].x1, windows[w].y1};
    scene.annotations.intervals.push_back(iv);
  }
  return scene;
}

}  // namespace dart
