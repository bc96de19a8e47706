#include "dart/event_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace dart {

EventStream slice(const EventStream& s, uint64_t t0, uint64_t t1) {
  if (t0 > t1) throw ConfigError("slice: t0 > t1");
  EventStream out;
  out.width = s.width;
  out.height = s.height;
  out.source = s.source;
  for (const Event& e : s.events) {
    if (e.t >= t1) break;  // events are time-sorted
    if (e.t >= t0) out.events.push_back(e);
  }
  return out;
}

EventStream parse_aer5(const std::vector<uint8_t>& bytes, uint16_t width, uint16_t height) {
  if (bytes.size() % 5 != 0)
    throw TruncatedRecord("aer5: byte length " + std::to_string(bytes.size()) +
                          " is not a multiple of 5");
  EventStream s;
  s.width = width;
  s.height = height;
  s.source = "aer5";
  s.events.reserve(bytes.size() / 5);
  uint64_t last_t = 0;
  for (size_t i = 0; i < bytes.size(); i += 5) {
    Event e;
    e.x = bytes[i];
    e.y = bytes[i + 1];
    e.p = static_cast<uint8_t>((bytes[i + 2] >> 7) & 1);
    e.t = (static_cast<uint64_t>(bytes[i + 2] & 0x7F) << 16) |
          (static_cast<uint64_t>(bytes[i + 3]) << 8) | bytes[i + 4];
    const size_t index = i / 5;
    if (e.x >= width || e.y >= height)
      throw OutOfBounds("aer5: record " + std::to_string(index) + " pixel (" +
                        std::to_string(e.x) + "," + std::to_string(e.y) +
                        ") outside " + std::to_string(width) + "x" + std::to_string(height));
    if (e.t < last_t)
      throw OrderViolation("aer5: record " + std::to_string(index) + " timestamp decreases");
    last_t = e.t;
    s.events.push_back(e);
  }
  return s;
}

std::vector<uint8_t> serialize_aer5(const EventStream& s) {
  std::vector<uint8_t> bytes;
  bytes.reserve(s.events.size() * 5);
  for (const Event& e : s.events) {
    if (e.t > 0x7FFFFF)
      throw InvalidTimestamp("aer5: timestamp " + std::to_string(e.t) +
                             " does not fit 23 bits");
    bytes.push_back(static_cast<uint8_t>(e.x));
    bytes.push_back(static_cast<uint8_t>(e.y));
    bytes.push_back(static_cast<uint8_t>(((e.p & 1) << 7) | ((e.t >> 16) & 0x7F)));
    bytes.push_back(static_cast<uint8_t>((e.t >> 8) & 0xFF));
    bytes.push_back(static_cast<uint8_t>(e.t & 0xFF));
  }
  return bytes;
}

EventStream parse_text_events(const std::string& text, uint16_t width, uint16_t height) {
  EventStream s;
  s.width = width;
  s.height = height;
  s.source = "text";
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  uint64_t last_t = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // skip blank lines
    bool blank = true;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) { blank = false; break; }
    if (blank) continue;

    std::istringstream ls(line);
    double t_seconds = 0.0;
    long long x = 0, y = 0, p = 0;
    if (!(ls >> t_seconds >> x >> y >> p))
      throw ParseError("text events: malformed line " + std::to_string(line_no));
    std::string extra;
    if (ls >> extra)
      throw ParseError("text events: trailing tokens on line " + std::to_string(line_no));
    if (t_seconds < 0.0)
      throw InvalidTimestamp("text events: negative timestamp on line " +
                             std::to_string(line_no));
    if (x < 0 || y < 0 || x >= width || y >= height)
      throw OutOfBounds("text events: pixel out of bounds on line " + std::to_string(line_no));
    if (p != 0 && p != 1)
      throw ParseError("text events: polarity must be 0 or 1 on line " +
                       std::to_string(line_no));
    Event e;
    e.t = static_cast<uint64_t>(std::llround(t_seconds * 1e6));
    e.x = static_cast<uint16_t>(x);
    e.y = static_cast<uint16_t>(y);
    e.p = static_cast<uint8_t>(p);
    if (!s.events.empty() && e.t < last_t)
      throw OrderViolation("text events: timestamp decreases on line " +
                           std::to_string(line_no));
    last_t = e.t;
    s.events.push_back(e);
  }
  return s;
}

std::string write_text_events(const EventStream& s) {
  std::string out;
  out.reserve(s.events.size() * 24);
  char buf[64];
  for (const Event& e : s.events) {
    // integer-exact decimal seconds: microseconds have 6 fractional digits
    std::snprintf(buf, sizeof(buf), "%llu.%06llu %u %u %u\n",
                  static_cast<unsigned long long>(e.t / 1000000ULL),
                  static_cast<unsigned long long>(e.t % 1000000ULL),
                  static_cast<unsigned>(e.x), static_cast<unsigned>(e.y),
                  static_cast<unsigned>(e.p));
    out += buf;
  }
  return out;
}

AnnotationTrack parse_annotations(const std::string& text) {
  AnnotationTrack track;
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    bool blank = true;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) { blank = false; break; }
    if (blank) continue;

    std::istringstream ls(line);
    unsigned long long t0 = 0, t1 = 0;
    if (!(ls >> t0 >> t1))
      throw ParseError("annotations: malformed line " + std::to_string(line_no));
    AnnotationInterval iv;
    iv.t_start = t0;
    iv.t_end = t1;
    if (t1 <= t0)
      throw ParseError("annotations: empty interval on line " + std::to_string(line_no));

    std::string tok;
    if (!(ls >> tok))
      throw ParseError("annotations: missing box on line " + std::to_string(line_no));
    if (tok != "-") {
      BoundingBox box;
      std::istringstream first(tok);
      if (!(first >> box.x_min) || !(ls >> box.y_min >> box.x_max >> box.y_max))
        throw ParseError("annotations: malformed box on line " + std::to_string(line_no));
      box.validate();
      iv.box = box;
    }
    std::string extra;
    if (ls >> extra)
      throw ParseError("annotations: trailing tokens on line " + std::to_string(line_no));
    track.intervals.push_back(iv);
  }

  std::stable_sort(track.intervals.begin(), track.intervals.end(),
                   [](const AnnotationInterval& a, const AnnotationInterval& b) {
                     return a.t_start < b.t_start;
                   });
  for (size_t i = 1; i < track.intervals.size(); ++i) {
    if (track.intervals[i].t_start < track.intervals[i - 1].t_end)
      throw OverlapError("annotations: intervals " + std::to_string(i - 1) + " and " +
                         std::to_string(i) + " overlap");
  }
  return track;
}

std::string write_annotations(const AnnotationTrack& track) {
  std::string out;
  char buf[128];
  for (const AnnotationInterval& iv : track.intervals) {
    if (iv.box) {
      std::snprintf(buf, sizeof(buf), "%llu %llu %d %d %d %d\n",
                    static_cast<unsigned long long>(iv.t_start),
                    static_cast<unsigned long long>(iv.t_end), iv.box->x_min,
                    iv.box->y_min, iv.box->x_max, iv.box->y_max);
    } else {
      std::snprintf(buf, sizeof(buf), "%llu %llu -\n",
                    static_cast<unsigned long long>(iv.t_start),
                    static_cast<unsigned long long>(iv.t_end));
    }
    out += buf;
  }
  return out;
}

std::vector<uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for reading: " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                             std::istreambuf_iterator<char>());
  return bytes;
}

std::string read_file_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for reading: " + path);
  return std::string((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
}

void write_file_bytes(const std::string& path, const std::vector<uint8_t>& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("write failed: " + path);
}

void write_file_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path);
  f << text;
  if (!f) throw IoError("write failed: " + path);
}

}  // namespace dart
