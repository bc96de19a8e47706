#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dart/events.hpp"

namespace dart {

/// Line segment in pixel coordinates (match visualization).
struct MatchLine {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};

/// Accumulate the events of [t0, t1) onto a white frame — positive polarity
/// red, negative cyan, later events painting over earlier ones — then draw
/// box outlines and match lines, and write a binary PPM (P6). Bit-exact for
/// fixed inputs. Returns false when the window held no events (a blank frame
/// is still written; the caller should warn).
bool render_overlay(const EventStream& stream, uint64_t t0, uint64_t t1,
                    const std::vector<BoundingBox>& boxes,
                    const std::vector<MatchLine>& lines, const std::string& out_path);

}  // namespace dart
