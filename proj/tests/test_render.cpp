#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "dart/event_io.hpp"
#include "dart/events.hpp"
#include "dart/render.hpp"
#include "doctest.h"

using namespace dart;

namespace {

struct Frame {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> px;  // RGB triplets, row-major

  std::array<uint8_t, 3> at(int x, int y) const {
    const size_t i = (static_cast<size_t>(y) * width + x) * 3;
    return {px[i], px[i + 1], px[i + 2]};
  }
};

Frame parse_ppm(const std::string& path) {
  const std::vector<uint8_t> bytes = read_file_bytes(path);
  Frame f;
  int maxval = 0, consumed = 0;
  REQUIRE(std::sscanf(reinterpret_cast<const char*>(bytes.data()), "P6\n%d %d\n%d\n%n",
                      &f.width, &f.height, &maxval, &consumed) == 3);
  REQUIRE(maxval == 255);
  f.px.assign(bytes.begin() + consumed, bytes.end());
  REQUIRE(f.px.size() == static_cast<size_t>(f.width) * f.height * 3);
  return f;
}

constexpr std::array<uint8_t, 3> kWhite{255, 255, 255};
constexpr std::array<uint8_t, 3> kRed{220, 40, 40};
constexpr std::array<uint8_t, 3> kCyan{0, 160, 200};
constexpr std::array<uint8_t, 3> kGreen{0, 153, 0};
constexpr std::array<uint8_t, 3> kGray{60, 60, 60};

EventStream small_stream() {
  EventStream s;
  s.width = 8;
  s.height = 6;
  return s;
}

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

size_t count_color(const Frame& f, std::array<uint8_t, 3> c) {
  size_t n = 0;
  for (int y = 0; y < f.height; ++y)
    for (int x = 0; x < f.width; ++x)
      if (f.at(x, y) == c) ++n;
  return n;
}

}  // namespace

TEST_CASE("render: empty window reports false but still writes a blank frame") {
  EventStream s = small_stream();
  s.events.push_back(Event{1, 1, 500, 1});  // outside the window

  const std::string path = tmp_path("render_blank.ppm");
  std::filesystem::remove(path);
  CHECK_FALSE(render_overlay(s, 0, 100, {}, {}, path));

  const Frame f = parse_ppm(path);
  CHECK(f.width == 8);
  CHECK(f.height == 6);
  CHECK(count_color(f, kWhite) == 48);
}

TEST_CASE("render: one positive event paints exactly one red pixel") {
  EventStream s = small_stream();
  s.events.push_back(Event{3, 2, 50, 1});

  const std::string path = tmp_path("render_one.ppm");
  CHECK(render_overlay(s, 0, 100, {}, {}, path));

  const Frame f = parse_ppm(path);
  CHECK(f.at(3, 2) == kRed);
  CHECK(count_color(f, kRed) == 1);
  CHECK(count_color(f, kWhite) == 47);
}

TEST_CASE("render: negative events are cyan and later events paint over earlier") {
  EventStream s = small_stream();
  s.events.push_back(Event{2, 1, 10, 1});
  s.events.push_back(Event{5, 4, 15, 0});
  s.events.push_back(Event{2, 1, 20, 0});  // same pixel, repainted cyan

  const std::string path = tmp_path("render_colors.ppm");
  CHECK(render_overlay(s, 0, 100, {}, {}, path));

  const Frame f = parse_ppm(path);
  CHECK(f.at(2, 1) == kCyan);
  CHECK(f.at(5, 4) == kCyan);
  CHECK(count_color(f, kRed) == 0);
  CHECK(count_color(f, kCyan) == 2);
}

TEST_CASE("render: the window is half-open") {
  EventStream s = small_stream();
  s.events.push_back(Event{0, 0, 100, 1});  // == t0, included
  s.events.push_back(Event{7, 5, 200, 1});  // == t1, excluded

  const std::string path = tmp_path("render_window.ppm");
  CHECK(render_overlay(s, 100, 200, {}, {}, path));

  const Frame f = parse_ppm(path);
  CHECK(f.at(0, 0) == kRed);
  CHECK(f.at(7, 5) == kWhite);
}

TEST_CASE("render: boxes outline in green, clip at borders, and cover events") {
  EventStream s = small_stream();
  s.events.push_back(Event{3, 0, 10, 1});  // on the box top edge: repainted

  const std::string path = tmp_path("render_box.ppm");
  CHECK(render_overlay(s, 0, 100, {BoundingBox{-2, 0, 3, 2}}, {}, path));

  const Frame f = parse_ppm(path);
  CHECK(f.at(3, 0) == kGreen);  // event underneath the outline
  CHECK(count_color(f, kRed) == 0);
  // Clipped outline: rows 0 and 2 span x 0..3, right column covers y 0..2;
  // the left column at x=-2 vanishes.
  for (int x = 0; x <= 3; ++x) {
    CHECK(f.at(x, 0) == kGreen);
    CHECK(f.at(x, 2) == kGreen);
  }
  CHECK(f.at(3, 1) == kGreen);
  CHECK(f.at(0, 1) == kWhite);
  CHECK(count_color(f, kGreen) == 9);
}

TEST_CASE("render: match lines rasterize gray and last") {
  EventStream s = small_stream();
  s.events.push_back(Event{2, 2, 10, 1});  // on the diagonal: repainted

  const std::string path = tmp_path("render_line.ppm");
  CHECK(render_overlay(s, 0, 100, {}, {MatchLine{0, 0, 4, 4}}, path));

  const Frame f = parse_ppm(path);
  for (int i = 0; i <= 4; ++i) CHECK(f.at(i, i) == kGray);
  CHECK(count_color(f, kGray) == 5);
  CHECK(count_color(f, kRed) == 0);
}

TEST_CASE("render: output bytes are identical across reruns") {
  EventStream s = small_stream();
  s.events.push_back(Event{1, 3, 5, 1});
  s.events.push_back(Event{6, 2, 7, 0});

  const std::string pa = tmp_path("render_rerun_a.ppm");
  const std::string pb = tmp_path("render_rerun_b.ppm");
  CHECK(render_overlay(s, 0, 50, {BoundingBox{1, 1, 5, 4}}, {MatchLine{0, 5, 7, 0}}, pa));
  CHECK(render_overlay(s, 0, 50, {BoundingBox{1, 1, 5, 4}}, {MatchLine{0, 5, 7, 0}}, pb));
  CHECK(read_file_bytes(pa) == read_file_bytes(pb));
}

TEST_CASE("render: guards") {
  EventStream s = small_stream();
  CHECK_THROWS_AS(render_overlay(s, 10, 5, {}, {}, tmp_path("render_bad.ppm")),
                  ConfigError);
  EventStream empty;
  CHECK_THROWS_AS(render_overlay(empty, 0, 10, {}, {}, tmp_path("render_bad.ppm")),
                  ConfigError);
}
