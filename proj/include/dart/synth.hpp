#pragma once

#include <cstdint>
#include <vector>

#include "dart/errors.hpp"
#include "dart/events.hpp"

namespace dart {

/// Piecewise-linear trajectory node: shape center at time t_us.
struct SynthWaypoint {
  uint64_t t_us = 0;
  double x = 0.0;
  double y = 0.0;
};

/// A moving polygon whose edge pixels fire Poisson-timed events, plus uniform
/// background noise, rasterized in 1 ms ticks.
struct SyntheticSceneConfig {
  int width = 240;
  int height = 180;
  std::vector<std::pair<double, double>> shape;  ///< polygon vertices, shape frame
  std::vector<SynthWaypoint> trajectory;         ///< center path; clamped at the ends
  double rotation_deg_per_s = 0.0;               ///< about the shape origin
  double edge_rate_per_px_per_ms = 1.0;   ///< mean events per edge pixel per ms
  double noise_rate_per_ms = 0.0;         ///< mean noise events per ms, whole sensor
  uint64_t duration_us = 1000000;
};

/// Where an event came from: its shape-frame coordinate, or noise.
struct EventOrigin {
  bool on_shape = false;
  float sx = 0.0f;
  float sy = 0.0f;
};

struct SyntheticScene {
  EventStream stream;
  AnnotationTrack annotations;       ///< one 10 ms interval per window
  std::vector<EventOrigin> origins;  ///< parallel to stream.events
};

/// Deterministic given seed. Ground-truth boxes cover the shape's edge pixels
/// per 10 ms window; windows where the shape is fully outside the sensor get
/// an absent box. Throws ConfigError on a degenerate shape or empty config.
SyntheticScene synth_generate(const SyntheticSceneConfig& cfg, uint64_t seed);

}  // namespace dart
