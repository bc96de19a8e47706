#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dart/events.hpp"

namespace dart {

// ---------------------------------------------------------------------------
// 5-byte AER records (N-MNIST style layout):
//   byte0 = x, byte1 = y, byte2 bit7 = polarity,
//   t = ((byte2 & 0x7F) << 16) | (byte3 << 8) | byte4   (microseconds)
// ---------------------------------------------------------------------------

/// Decode a 5-byte AER buffer. Throws TruncatedRecord when the length is not
/// a multiple of 5, OutOfBounds when a record's pixel exceeds the sensor, and
/// OrderViolation when timestamps decrease.
EventStream parse_aer5(const std::vector<uint8_t>& bytes, uint16_t width, uint16_t height);

/// Inverse of parse_aer5. Throws InvalidTimestamp when t does not fit 23 bits.
std::vector<uint8_t> serialize_aer5(const EventStream& s);

// ---------------------------------------------------------------------------
// Text events: one "t_seconds x y p" per line, whitespace separated.
// ---------------------------------------------------------------------------

/// Parse text events; t is converted to microseconds by round(t_seconds*1e6).
/// Throws ParseError(line), InvalidTimestamp (negative t), OutOfBounds,
/// OrderViolation (unsorted input is rejected, not silently sorted).
EventStream parse_text_events(const std::string& text, uint16_t width, uint16_t height);

/// Write text events with exact microsecond decimals (6 fractional digits).
std::string write_text_events(const EventStream& s);

// ---------------------------------------------------------------------------
// Annotations: "t_start t_end x_min y_min x_max y_max" per line (microseconds,
// pixels), or "t_start t_end -" for object-absent intervals. Half-open.
// ---------------------------------------------------------------------------

/// Parse and validate an annotation track (sorted output). Throws
/// OverlapError for overlapping intervals and InvalidBox for inverted boxes.
AnnotationTrack parse_annotations(const std::string& text);

std::string write_annotations(const AnnotationTrack& track);

// ---------------------------------------------------------------------------
// File helpers
// ---------------------------------------------------------------------------

std::vector<uint8_t> read_file_bytes(const std::string& path);
std::string read_file_text(const std::string& path);
void write_file_bytes(const std::string& path, const std::vector<uint8_t>& bytes);
void write_file_text(const std::string& path, const std::string& text);

}  // namespace dart
