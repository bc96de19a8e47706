#pragma once

#include <cstdint>
#include <vector>

#include "dart/events.hpp"

namespace dart {

/// Default thresholds (microseconds); both are CLI-configurable.
inline constexpr uint64_t kDefaultThetaRefUs = 1000;
inline constexpr uint64_t kDefaultThetaNoiseUs = 5000;

/// Per-pixel timestamp map with a "never seen" sentinel.
class PixelClock {
 public:
  PixelClock(uint16_t width, uint16_t height)
      : width_(width), last_t_(static_cast<size_t>(width) * height, kNever) {}

  uint64_t get(uint16_t x, uint16_t y) const {
    return last_t_[static_cast<size_t>(y) * width_ + x];
  }
  void set(uint16_t x, uint16_t y, uint64_t t) {
    last_t_[static_cast<size_t>(y) * width_ + x] = t;
  }
  static bool never(uint64_t t) { return t == kNever; }

 private:
  static constexpr uint64_t kNever = ~0ULL;
  uint16_t width_;
  std::vector<uint64_t> last_t_;
};

/// Refractory filter: an event passes iff its pixel has no previously *passed*
/// event within theta_ref microseconds (strictly greater gaps pass). Only
/// passing events update the per-pixel clock.
class RefractoryFilter {
 public:
  RefractoryFilter(uint16_t width, uint16_t height, uint64_t theta_ref_us)
      : clock_(width, height), theta_ref_(theta_ref_us) {}

  /// Events must be presented in timestamp order (OrderViolation otherwise).
  bool pass(const Event& e);

 private:
  PixelClock clock_;
  uint64_t theta_ref_;
  uint64_t last_presented_ = 0;
  bool any_presented_ = false;
};

/// Nearest-neighbor support filter: an event passes iff some 8-connected
/// neighbor pixel (center excluded) recorded an event strictly less than
/// theta_noise microseconds earlier. Every presented event is recorded,
/// pass or fail.
class NoiseFilter {
 public:
  NoiseFilter(uint16_t width, uint16_t height, uint64_t theta_noise_us)
      : clock_(width, height), width_(width), height_(height), theta_noise_(theta_noise_us) {}

  /// Events must be presented in timestamp order (OrderViolation otherwise).
  bool pass(const Event& e);

 private:
  PixelClock clock_;
  uint16_t width_, height_;
  uint64_t theta_noise_;
  uint64_t last_presented_ = 0;
  bool any_presented_ = false;
};

/// Cascade: refractory first, then the noise filter over refractory survivors.
EventStream cascade(const EventStream& stream, uint64_t theta_noise_us, uint64_t theta_ref_us);

}  // namespace dart
