#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dart/errors.hpp"

namespace dart {

/// A single sensor spike: pixel location, microsecond timestamp, polarity.
/// Polarity is parsed and carried along but ignored by all descriptor math.
struct Event {
  uint16_t x = 0;
  uint16_t y = 0;
  uint64_t t = 0;  ///< microseconds
  uint8_t p = 0;   ///< polarity bit {0,1}

  bool operator==(const Event&) const = default;
};

/// Ordered event sequence plus sensor geometry.
/// Invariant: events sorted by t ascending (stable for ties), all in bounds.
struct EventStream {
  uint16_t width = 0;
  uint16_t height = 0;
  std::string source;  ///< dataset tag, informational only
  std::vector<Event> events;
};

/// Inclusive pixel bounds. area() uses the inclusive-pixel convention.
struct BoundingBox {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;
  int y_max = 0;

  bool operator==(const BoundingBox&) const = default;

  int64_t area() const {
    return static_cast<int64_t>(x_max - x_min + 1) *
           static_cast<int64_t>(y_max - y_min + 1);
  }
  bool contains(int x, int y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
  double center_x() const { return 0.5 * (x_min + x_max); }
  double center_y() const { return 0.5 * (y_min + y_max); }
  double diagonal() const {
    const double w = static_cast<double>(x_max - x_min + 1);
    const double h = static_cast<double>(y_max - y_min + 1);
    return std::sqrt(w * w + h * h);
  }

  /// Throws InvalidBox when the bounds are inverted.
  void validate() const {
    if (x_min > x_max || y_min > y_max) throw InvalidBox("inverted bounding box");
  }

  /// Grown by (px, py) on each side, clipped to the sensor.
  BoundingBox padded(int px, int py, int width, int height) const {
    BoundingBox b;
    b.x_min = std::max(0, x_min - px);
    b.y_min = std::max(0, y_min - py);
    b.x_max = std::min(width - 1, x_max + px);
    b.y_max = std::min(height - 1, y_max + py);
    return b;
  }
};

/// One ground-truth interval; half-open [t_start, t_end).
/// An absent box marks "object not in frame".
struct AnnotationInterval {
  uint64_t t_start = 0;
  uint64_t t_end = 0;
  std::optional<BoundingBox> box;
};

/// Sorted, non-overlapping annotation intervals.
struct AnnotationTrack {
  std::vector<AnnotationInterval> intervals;
};

/// Events with t0 <= t < t1, order preserved. Throws ConfigError if t0 > t1.
EventStream slice(const EventStream& s, uint64_t t0, uint64_t t1);

}  // namespace dart
