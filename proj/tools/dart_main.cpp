// dart — command-line front end for the event-camera descriptor pipeline.
//
// Subcommands cover the full workflow: format conversion, filtering,
// descriptor extraction, codebook/classifier training, classification,
// tracking, time-slice matching, evaluation, synthetic scene generation,
// and frame rendering.  Every subcommand accepts a key=value config file
// via --config; command-line flags override config values.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "dart/classify.hpp"
#include "dart/descriptor.hpp"
#include "dart/elot.hpp"
#include "dart/encoding.hpp"
#include "dart/errors.hpp"
#include "dart/event_io.hpp"
#include "dart/events.hpp"
#include "dart/filtering.hpp"
#include "dart/matching.hpp"
#include "dart/metrics.hpp"
#include "dart/render.hpp"
#include "dart/svm.hpp"
#include "dart/synth.hpp"

namespace {

using namespace dart;

// ---------------------------------------------------------------------------
// Shared option bundles
// ---------------------------------------------------------------------------

struct IoOpts {
  std::string format = "text";  // "text" or "aer5"
  uint16_t width = 240;
  uint16_t height = 180;
};

struct GridOpts {
  int n_r = GridParams{}.n_r;
  int n_w = GridParams{}.n_w;
  double r_min = GridParams{}.r_min;
  double r_max = GridParams{}.r_max;

  GridParams params() const { return GridParams{n_r, n_w, r_min, r_max}; }
};

struct FilterOpts {
  uint64_t theta_ref_us = kDefaultThetaRefUs;
  uint64_t theta_noise_us = kDefaultThetaNoiseUs;
};

// Attach shared event-file options to a subcommand.
void add_io_opts(CLI::App* sub, IoOpts& io) {
  sub->add_option("--format", io.format, "Event file format")
      ->check(CLI::IsMember({"text", "aer5"}))
      ->capture_default_str();
  sub->add_option("--width", io.width, "Sensor width in pixels")->capture_default_str();
  sub->add_option("--height", io.height, "Sensor height in pixels")->capture_default_str();
}

void add_grid_opts(CLI::App* sub, GridOpts& g) {
  sub->add_option("--n-r", g.n_r, "Radial bins in the log-polar grid")->capture_default_str();
  sub->add_option("--n-w", g.n_w, "Angular bins in the log-polar grid")->capture_default_str();
  sub->add_option("--r-min", g.r_min, "Innermost ring radius in pixels")->capture_default_str();
  sub->add_option("--r-max", g.r_max, "Outermost ring radius in pixels")->capture_default_str();
}

void add_filter_opts(CLI::App* sub, FilterOpts& f) {
  sub->add_option("--theta-ref", f.theta_ref_us, "Refractory period in microseconds")
      ->capture_default_str();
  sub->add_option("--theta-noise", f.theta_noise_us, "Noise-filter support window in microseconds")
      ->capture_default_str();
}

EventStream load_events(const std::string& path, const IoOpts& io) {
  if (io.format == "aer5") {
    return parse_aer5(read_file_bytes(path), io.width, io.height);
  }
  return parse_text_events(read_file_text(path), io.width, io.height);
}

void save_events(const std::string& path, const std::string& format, const EventStream& stream) {
  if (format == "aer5") {
    write_file_bytes(path, serialize_aer5(stream));
  } else {
    write_file_text(path, write_text_events(stream));
  }
}

// ---------------------------------------------------------------------------
// Small parsers for structured string options
// ---------------------------------------------------------------------------

std::vector<double> parse_number_list(const std::string& text, char sep, const char* what) {
  std::vector<double> out;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, sep)) {
    if (token.empty()) continue;
    try {
      size_t used = 0;
      double v = std::stod(token, &used);
      while (used < token.size() && std::isspace(static_cast<unsigned char>(token[used]))) ++used;
      if (used != token.size()) throw std::invalid_argument(token);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError(std::string("bad number '") + token + "' in " + what);
    }
  }
  return out;
}

BoundingBox parse_box_spec(const std::string& text) {
  auto v = parse_number_list(text, ',', "box spec");
  if (v.size() != 4) throw ConfigError("box spec must be x_min,y_min,x_max,y_max");
  BoundingBox b{static_cast<int32_t>(std::llround(v[0])), static_cast<int32_t>(std::llround(v[1])),
                static_cast<int32_t>(std::llround(v[2])), static_cast<int32_t>(std::llround(v[3]))};
  b.validate();
  return b;
}

std::vector<std::pair<double, double>> parse_shape_spec(const std::string& text) {
  std::vector<std::pair<double, double>> shape;
  std::string vertex;
  std::istringstream in(text);
  while (std::getline(in, vertex, ';')) {
    if (vertex.empty()) continue;
    auto v = parse_number_list(vertex, ',', "shape vertex");
    if (v.size() != 2) throw ConfigError("shape vertex must be x,y");
    shape.emplace_back(v[0], v[1]);
  }
  return shape;
}

std::vector<SynthWaypoint> parse_trajectory_spec(const std::string& text) {
  std::vector<SynthWaypoint> traj;
  std::string waypoint;
  std::istringstream in(text);
  while (std::getline(in, waypoint, ';')) {
    if (waypoint.empty()) continue;
    auto v = parse_number_list(waypoint, ',', "trajectory waypoint");
    if (v.size() != 3) throw ConfigError("trajectory waypoint must be t_us,x,y");
    if (v[0] < 0) throw ConfigError("trajectory time must be non-negative");
    traj.push_back(SynthWaypoint{static_cast<uint64_t>(std::llround(v[0])), v[1], v[2]});
  }
  return traj;
}

// Parse the track CSV written by the track subcommand back into a timeline.
std::vector<TrackResult> parse_track_csv(const std::string& text) {
  std::vector<TrackResult> rows;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {  // header row
      first = false;
      continue;
    }
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 7) {
      throw ParseError("track csv line " + std::to_string(line_no) + ": expected 7 fields");
    }
    try {
      TrackResult r;
      r.t_decision_us = std::stoull(fields[0]);
      if (fields[1] == "tracked") {
        r.mode = TrackMode::tracked;
      } else if (fields[1] == "detected") {
        r.mode = TrackMode::detected;
      } else {
        throw ParseError("track csv line " + std::to_string(line_no) + ": bad mode");
      }
      r.box = BoundingBox{std::stoi(fields[2]), std::stoi(fields[3]), std::stoi(fields[4]),
                          std::stoi(fields[5])};
      r.box.validate();
      r.score = std::stod(fields[6]);
      rows.push_back(r);
    } catch (const DartError&) {
      throw;
    } catch (const std::exception&) {
      throw ParseError("track csv line " + std::to_string(line_no) + ": bad field");
    }
  }
  return rows;
}

// Parse the match CSV written by the match subcommand into renderable lines.
std::vector<MatchLine> parse_match_csv(const std::string& text) {
  std::vector<MatchLine> lines;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;
      continue;
    }
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 7) {
      throw ParseError("match csv line " + std::to_string(line_no) + ": expected 7 fields");
    }
    try {
      lines.push_back(MatchLine{std::stoi(fields[0]), std::stoi(fields[1]), std::stoi(fields[3]),
                                std::stoi(fields[4])});
    } catch (const std::exception&) {
      throw ParseError("match csv line " + std::to_string(line_no) + ": bad field");
    }
  }
  return lines;
}

// Manifest: one "<label> <path>" pair per line; '#' starts a comment.
// Relative paths resolve against the manifest's own directory.
std::vector<std::pair<int, std::string>> parse_manifest(const std::string& manifest_path) {
  std::string text = read_file_text(manifest_path);
  std::filesystem::path base = std::filesystem::path(manifest_path).parent_path();
  std::vector<std::pair<int, std::string>> entries;
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    int label = 0;
    std::string path;
    if (!(ls >> label)) continue;  // blank or comment-only line
    if (!(ls >> path)) {
      throw ParseError("manifest line " + std::to_string(line_no) + ": missing path");
    }
    std::string extra;
    if (ls >> extra) {
      throw ParseError("manifest line " + std::to_string(line_no) + ": trailing fields");
    }
    std::filesystem::path p(path);
    if (p.is_relative()) p = base / p;
    entries.emplace_back(label, p.string());
  }
  if (entries.empty()) throw ParseError("manifest has no entries: " + manifest_path);
  return entries;
}

Codebook load_codebook(const std::string& path) { return parse_codebook(read_file_bytes(path)); }

MulticlassModel load_model(const std::string& path) {
  return parse_multiclass(read_file_bytes(path));
}

// ---------------------------------------------------------------------------
// Subcommand option structs + runners
// ---------------------------------------------------------------------------

struct ConvertOpts {
  std::string input, output;
  std::string in_format = "text", out_format = "aer5";
  uint16_t width = 240, height = 180;
};

int run_convert(const ConvertOpts& o) {
  IoOpts in_io{o.in_format, o.width, o.height};
  EventStream s = load_events(o.input, in_io);
  save_events(o.output, o.out_format, s);
  std::printf("events=%zu\n", s.events.size());
  return 0;
}

struct FilterCmdOpts {
  std::string input, output;
  IoOpts io;
  FilterOpts filt;
};

int run_filter(const FilterCmdOpts& o) {
  EventStream s = load_events(o.input, o.io);
  size_t before = s.events.size();
  EventStream out = cascade(s, o.filt.theta_noise_us, o.filt.theta_ref_us);
  save_events(o.output, o.io.format, out);
  std::printf("events_in=%zu\nevents_out=%zu\n", before, out.events.size());
  return 0;
}

struct ExtractOpts {
  std::string input, output, csv;
  IoOpts io;
  GridOpts grid;
  FilterOpts filt;
  size_t fifo = kDefaultFifoCapacity;
  uint32_t stride = 1;
  uint64_t limit = 0;
  bool benchmark = false;
};

int run_extract(const ExtractOpts& o) {
  if (o.stride == 0) throw ConfigError("--stride must be at least 1");
  if (!o.benchmark && o.output.empty() && o.csv.empty()) {
    throw ConfigError("extract needs --output, --csv, or --benchmark");
  }
  EventStream s = load_events(o.input, o.io);
  EventStream filtered = cascade(s, o.filt.theta_noise_us, o.filt.theta_ref_us);
  LogPolarGrid grid = build_grid(o.grid.params());
  DartEngine engine(grid, filtered.width, filtered.height, o.fifo);

  std::vector<DartDescriptor> kept;
  size_t extracted = 0;
  auto t_begin = std::chrono::steady_clock::now();
  for (const Event& e : filtered.events) {
    engine.push(e);
    DartDescriptor d = engine.extract(e);
    ++extracted;
    if ((extracted - 1) % o.stride == 0) {
      if (o.limit == 0 || kept.size() < o.limit) kept.push_back(std::move(d));
    }
  }
  auto t_end = std::chrono::steady_clock::now();

  if (!o.output.empty()) write_file_bytes(o.output, serialize_descriptors(kept));
  if (!o.csv.empty()) write_file_text(o.csv, descriptors_to_csv(kept));

  std::printf("events_in=%zu\nevents_filtered=%zu\ndescriptors_kept=%zu\n", s.events.size(),
              filtered.events.size(), kept.size());
  if (o.benchmark) {
    double secs = std::chrono::duration<double>(t_end - t_begin).count();
    double rate = secs > 0 ? static_cast<double>(extracted) / secs : 0.0;
    std::printf("descriptors_extracted=%zu\nelapsed_s=%.6f\nevents_per_second=%.1f\n", extracted,
                secs, rate);
  }
  return 0;
}

struct TrainCodebookOpts {
  std::vector<std::string> inputs;
  std::string output, forest_output;
  uint32_t k = 1000;
  int iters = 100;
  uint64_t seed = 0;
  uint32_t stride = 1;
  uint32_t trees = 4;
  int max_checks = 15;
  uint32_t leaf_size = 1;
};

int run_train_codebook(const TrainCodebookOpts& o) {
  if (o.stride == 0) throw ConfigError("--stride must be at least 1");
  DataMatrix samples;
  size_t seen = 0;
  for (const std::string& path : o.inputs) {
    auto descs = parse_descriptors(read_file_bytes(path));
    for (auto& d : descs) {
      if (seen++ % o.stride != 0) continue;
      if (samples.dim == 0) samples.dim = d.values.size();
      samples.push_row(d.values);
    }
  }
  std::fprintf(stderr, "training codebook: %zu samples, k=%u\n", samples.rows, o.k);
  KmeansResult km = kmeans_train(samples, o.k, o.iters, o.seed);
  write_file_bytes(o.output, serialize_codebook(km.codebook));
  if (!o.forest_output.empty()) {
    KdForest forest = build_forest(km.codebook, o.trees, o.seed, o.max_checks, o.leaf_size);
    write_file_bytes(o.forest_output, serialize_forest_params(forest));
  }
  std::printf("samples=%zu\nk=%u\ninertia=%.9g\niterations=%d\n", samples.rows, o.k, km.inertia,
              km.iterations);
  return 0;
}

struct RepresentOpts {
  IoOpts io;
  GridOpts grid;
  FilterOpts filt;
  size_t fifo = kDefaultFifoCapacity;
  KernelMapConfig kernel;
  int checks = -1;
  std::string codebook, forest;
};

void add_represent_opts(CLI::App* sub, RepresentOpts& r, bool forest_optional = true) {
  add_io_opts(sub, r.io);
  add_grid_opts(sub, r.grid);
  add_filter_opts(sub, r.filt);
  sub->add_option("--fifo", r.fifo, "Per-descriptor event buffer capacity")->capture_default_str();
  sub->add_option("--kernel-m", r.kernel.m, "Kernel feature-map order")->capture_default_str();
  sub->add_option("--kernel-l", r.kernel.L, "Kernel feature-map sampling period")
      ->capture_default_str();
  sub->add_option("--codebook", r.codebook, "Codebook file")->required()->check(CLI::ExistingFile);
  auto* fo = sub->add_option("--forest", r.forest, "Approximate-search forest file")
                 ->check(CLI::ExistingFile);
  if (!forest_optional) fo->required();
  sub->add_option("--checks", r.checks,
                  "Override forest check budget (-1 keeps the stored value)")
      ->capture_default_str();
}

ClassifyParams classify_params(const RepresentOpts& r) {
  ClassifyParams p;
  p.theta_noise_us = r.filt.theta_noise_us;
  p.theta_ref_us = r.filt.theta_ref_us;
  p.fifo_capacity = r.fifo;
  p.kernel = r.kernel;
  p.checks = r.checks;
  return p;
}

struct TrainClassifierOpts {
  RepresentOpts rep;
  std::string manifest, output;
  double svm_c = kDefaultSvmC;
  int epochs = kDefaultSvmEpochs;
  uint64_t seed = 0;
};

int run_train_classifier(const TrainClassifierOpts& o) {
  Codebook cb = load_codebook(o.rep.codebook);
  std::optional<KdForest> forest;
  if (!o.rep.forest.empty()) {
    forest = parse_and_rebuild_forest(read_file_bytes(o.rep.forest), cb);
  }
  LogPolarGrid grid = build_grid(o.rep.grid.params());
  ClassifyParams params = classify_params(o.rep);

  auto entries = parse_manifest(o.manifest);
  DataMatrix samples;
  std::vector<int> labels;
  for (size_t i = 0; i < entries.size(); ++i) {
    EventStream s = load_events(entries[i].second, o.rep.io);
    auto psi = compute_representation(s, grid, cb, forest ? &*forest : nullptr, params);
    if (samples.dim == 0) samples.dim = psi.size();
    samples.push_row(psi);
    labels.push_back(entries[i].first);
    if ((i + 1) % 50 == 0 || i + 1 == entries.size()) {
      std::fprintf(stderr, "represented %zu/%zu recordings\n", i + 1, entries.size());
    }
  }
  MulticlassModel mc = multiclass_train(samples, labels, o.svm_c, o.epochs, o.seed);
  write_file_bytes(o.output, serialize_multiclass(mc));
  std::printf("recordings=%zu\nclasses=%zu\ndim=%zu\n", samples.rows, mc.labels.size(),
              samples.dim);
  return 0;
}

struct ClassifyCmdOpts {
  RepresentOpts rep;
  std::string input, model, output;
};

int run_classify(const ClassifyCmdOpts& o) {
  Codebook cb = load_codebook(o.rep.codebook);
  std::optional<KdForest> forest;
  if (!o.rep.forest.empty()) {
    forest = parse_and_rebuild_forest(read_file_bytes(o.rep.forest), cb);
  }
  MulticlassModel mc = load_model(o.model);
  LogPolarGrid grid = build_grid(o.rep.grid.params());
  EventStream s = load_events(o.input, o.rep.io);
  int label =
      classify_pipeline(s, grid, cb, forest ? &*forest : nullptr, classify_params(o.rep), mc);
  char line[64];
  std::snprintf(line, sizeof line, "label=%d\n", label);
  std::fputs(line, stdout);
  if (!o.output.empty()) write_file_text(o.output, line);
  return 0;
}

struct EvalClassifyOpts {
  RepresentOpts rep;
  std::string manifest, model, output;
  uint64_t prefix_us = 0;  // 0 = full stream
};

int run_eval_classify(const EvalClassifyOpts& o) {
  Codebook cb = load_codebook(o.rep.codebook);
  std::optional<KdForest> forest;
  if (!o.rep.forest.empty()) {
    forest = parse_and_rebuild_forest(read_file_bytes(o.rep.forest), cb);
  }
  MulticlassModel mc = load_model(o.model);
  LogPolarGrid grid = build_grid(o.rep.grid.params());
  ClassifyParams params = classify_params(o.rep);

  auto entries = parse_manifest(o.manifest);
  std::vector<int> actual, predicted;
  for (size_t i = 0; i < entries.size(); ++i) {
    EventStream s = load_events(entries[i].second, o.rep.io);
    if (o.prefix_us > 0) s = slice(s, 0, o.prefix_us);
    int label = -1;  // sentinel: counts as a miss when no events survive
    try {
      label = classify_pipeline(s, grid, cb, forest ? &*forest : nullptr, params, mc);
    } catch (const NoEvidence&) {
    }
    actual.push_back(entries[i].first);
    predicted.push_back(label);
    if ((i + 1) % 50 == 0 || i + 1 == entries.size()) {
      std::fprintf(stderr, "classified %zu/%zu recordings\n", i + 1, entries.size());
    }
  }

  AccuracyReport report = accuracy(actual, predicted);
  std::ostringstream out;
  out << "recordings=" << actual.size() << "\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "overall=%.6f\n", report.overall);
  out << buf;
  std::snprintf(buf, sizeof buf, "class_averaged=%.6f\n", report.class_averaged);
  out << buf;
  out << "labels=";
  for (size_t i = 0; i < report.labels.size(); ++i) {
    if (i) out << ',';
    out << report.labels[i];
  }
  out << "\n";
  for (size_t r = 0; r < report.labels.size(); ++r) {
    for (size_t c = 0; c < report.labels.size(); ++c) {
      if (c) out << ',';
      out << report.confusion[r][c];
    }
    out << "\n";
  }
  std::fputs(out.str().c_str(), stdout);
  if (!o.output.empty()) write_file_text(o.output, out.str());
  return 0;
}

struct TrackOpts {
  std::string input, init, roi, output;
  IoOpts io;
  GridOpts grid;
  ElotConfig cfg;
  uint64_t one_shot_ms = 0;  // convenience alias; 0 = use --one-shot-us
};

int run_track(const TrackOpts& o) {
  EventStream s = load_events(o.input, o.io);
  BoundingBox roi0;
  if (!o.roi.empty()) {
    roi0 = parse_box_spec(o.roi);
  } else if (!o.init.empty()) {
    AnnotationTrack track = parse_annotations(read_file_text(o.init));
    const AnnotationInterval* first_boxed = nullptr;
    for (const auto& iv : track.intervals) {
      if (iv.box) {
        first_boxed = &iv;
        break;
      }
    }
    if (first_boxed == nullptr) throw ConfigError("--init file has no boxed interval");
    roi0 = *first_boxed->box;
  } else {
    throw ConfigError("track needs --roi or --init");
  }
  ElotConfig cfg = o.cfg;
  cfg.grid = o.grid.params();
  if (o.one_shot_ms > 0) cfg.one_shot_window_us = o.one_shot_ms * 1000;
  std::vector<TrackResult> results = elot_run(s, roi0, cfg);
  write_file_text(o.output, track_results_to_csv(results));
  std::printf("decisions=%zu\n", results.size());
  return 0;
}

struct MatchOpts {
  std::string input, output;
  IoOpts io;
  GridOpts grid;
  FilterOpts filt;
  size_t fifo = kDefaultFifoCapacity;
  std::string slice_a, slice_b;
  uint32_t stride = 1;
  double ratio = kDefaultMatchRatio;
  bool mutual = false;
  bool ann = false;
  uint32_t trees = 4;
  int max_checks = 15;
  uint64_t seed = 0;
};

FeatureSet features_from_slice(const EventStream& filtered, uint64_t t0, uint64_t t1,
                               const LogPolarGrid& grid, size_t fifo, uint32_t stride) {
  EventStream part = slice(filtered, t0, t1);
  DartEngine engine(grid, filtered.width, filtered.height, fifo);
  FeatureSet fs;
  fs.descriptors.dim = grid.bins();
  size_t n = 0;
  for (const Event& e : part.events) {
    engine.push(e);
    DartDescriptor d = engine.extract(e);
    if (n++ % stride != 0) continue;
    fs.events.push_back(e);
    fs.descriptors.push_row(d.values);
  }
  return fs;
}

int run_match(const MatchOpts& o) {
  if (o.stride == 0) throw ConfigError("--stride must be at least 1");
  auto a_range = parse_number_list(o.slice_a, ',', "--slice-a");
  auto b_range = parse_number_list(o.slice_b, ',', "--slice-b");
  if (a_range.size() != 2 || b_range.size() != 2) {
    throw ConfigError("slice ranges must be t0,t1 in microseconds");
  }
  EventStream s = load_events(o.input, o.io);
  EventStream filtered = cascade(s, o.filt.theta_noise_us, o.filt.theta_ref_us);
  LogPolarGrid grid = build_grid(o.grid.params());
  FeatureSet fa = features_from_slice(filtered, static_cast<uint64_t>(a_range[0]),
                                      static_cast<uint64_t>(a_range[1]), grid, o.fifo, o.stride);
  FeatureSet fb = features_from_slice(filtered, static_cast<uint64_t>(b_range[0]),
                                      static_cast<uint64_t>(b_range[1]), grid, o.fifo, o.stride);
  std::vector<MatchPair> pairs;
  if (o.ann) {
    Codebook bcb = features_as_codebook(fb);
    KdForest forest = build_forest(bcb, o.trees, o.seed, o.max_checks);
    pairs = match_sets(fa, fb, o.ratio, &forest, o.mutual);
  } else {
    pairs = match_sets(fa, fb, o.ratio, nullptr, o.mutual);
  }
  write_file_text(o.output, matches_to_csv(fa, fb, pairs));
  std::printf("features_a=%zu\nfeatures_b=%zu\nmatches=%zu\n", fa.events.size(), fb.events.size(),
              pairs.size());
  return 0;
}

struct EvalTrackOpts {
  std::string events, gt, pred, output;
  IoOpts io;
  uint64_t interval_us = kEvalIntervalUs;
  double threshold = kOverlapThreshold;
};

int run_eval_track(const EvalTrackOpts& o) {
  EventStream s = load_events(o.events, o.io);
  AnnotationTrack gt = parse_annotations(read_file_text(o.gt));
  std::vector<TrackResult> rows = parse_track_csv(read_file_text(o.pred));
  std::vector<TimedBox> timeline;
  timeline.reserve(rows.size());
  for (const auto& r : rows) timeline.push_back(TimedBox{r.t_decision_us, r.box});
  std::vector<IntervalMetrics> intervals =
      evaluate_intervals(s, gt, timeline, o.interval_us, o.threshold);
  TrackEvalSummary sum = summarize_track_eval(intervals);
  std::ostringstream out;
  out << "intervals=" << sum.gt_intervals << "\n";
  out << "successes=" << sum.successes << "\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "os=%.6f\n", sum.os);
  out << buf;
  std::snprintf(buf, sizeof buf, "mean_iou=%.6f\n", sum.mean_iou);
  out << buf;
  std::snprintf(buf, sizeof buf, "cle_norm=%.6f\n", sum.cle_norm);
  out << buf;
  std::snprintf(buf, sizeof buf, "cle_px=%.6f\n", sum.cle_px);
  out << buf;
  std::fputs(out.str().c_str(), stdout);
  if (!o.output.empty()) write_file_text(o.output, out.str());
  return 0;
}

struct SynthOpts {
  std::string events, gt, correspondence;
  std::string format = "text";
  std::string shape = "-8,-8;8,-8;8,8;-8,8";
  std::string trajectory = "0,120,90;1000000,120,90";
  SyntheticSceneConfig cfg;
  uint64_t seed = 0;
};

int run_synth(const SynthOpts& o) {
  SyntheticSceneConfig cfg = o.cfg;
  cfg.shape = parse_shape_spec(o.shape);
  cfg.trajectory = parse_trajectory_spec(o.trajectory);
  SyntheticScene scene = synth_generate(cfg, o.seed);
  save_events(o.events, o.format, scene.stream);
  if (!o.gt.empty()) write_file_text(o.gt, write_annotations(scene.annotations));
  if (!o.correspondence.empty()) {
    std::ostringstream csv;
    csv << "index,on_shape,sx,sy\n";
    for (size_t i = 0; i < scene.origins.size(); ++i) {
      const EventOrigin& eo = scene.origins[i];
      char row[96];
      std::snprintf(row, sizeof row, "%zu,%d,%.9g,%.9g\n", i, eo.on_shape ? 1 : 0,
                    static_cast<double>(eo.sx), static_cast<double>(eo.sy));
      csv << row;
    }
    write_file_text(o.correspondence, csv.str());
  }
  std::printf("events=%zu\nannotated_intervals=%zu\n", scene.stream.events.size(),
              scene.annotations.intervals.size());
  return 0;
}

struct RenderOpts {
  std::string input, output, ann, track, matches;
  IoOpts io;
  uint64_t t0 = 0, t1 = 0;
  std::vector<std::string> boxes;
};

int run_render(const RenderOpts& o) {
  EventStream s = load_events(o.input, o.io);
  std::vector<BoundingBox> boxes;
  for (const auto& spec : o.boxes) boxes.push_back(parse_box_spec(spec));
  if (!o.ann.empty()) {
    AnnotationTrack track = parse_annotations(read_file_text(o.ann));
    for (const auto& iv : track.intervals) {
      if (iv.box && iv.t_start < o.t1 && iv.t_end > o.t0) boxes.push_back(*iv.box);
    }
  }
  if (!o.track.empty()) {
    auto rows = parse_track_csv(read_file_text(o.track));
    const TrackResult* last = nullptr;
    for (const auto& r : rows) {
      if (r.t_decision_us <= o.t1) last = &r;
    }
    if (last != nullptr) boxes.push_back(last->box);
  }
  std::vector<MatchLine> lines;
  if (!o.matches.empty()) lines = parse_match_csv(read_file_text(o.matches));
  bool drew = render_overlay(s, o.t0, o.t1, boxes, lines, o.output);
  if (!drew) std::fprintf(stderr, "warning: no events in [%llu, %llu)\n",
                          static_cast<unsigned long long>(o.t0),
                          static_cast<unsigned long long>(o.t1));
  std::printf("rendered=%s\n", drew ? "true" : "false");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-camera log-polar descriptor pipeline"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Key=value config file ([subcommand] sections)");
  app.allow_config_extras(CLI::config_extras_mode::error);
  std::string emit_config;
  app.add_option("--emit-effective-config", emit_config,
                 "Write the effective configuration (defaults plus overrides) to this file");

  std::vector<std::pair<CLI::App*, std::function<int()>>> runners;

  // convert
  {
    auto opt = std::make_shared<ConvertOpts>();
    auto* sub = app.add_subcommand("convert", "Convert an event file between formats");
    sub->add_option("--input", opt->input, "Input event file")->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--output", opt->output, "Output event file")->required();
    sub->add_option("--in-format", opt->in_format, "Input format")
        ->check(CLI::IsMember({"text", "aer5"}))->capture_default_str();
    sub->add_option("--out-format", opt->out_format, "Output format")
        ->check(CLI::IsMember({"text", "aer5"}))->capture_default_str();
    sub->add_option("--width", opt->width, "Sensor width in pixels")->capture_default_str();
    sub->add_option("--height", opt->height, "Sensor height in pixels")->capture_default_str();
    runners.emplace_back(sub, [opt] { return run_convert(*opt); });
  }

  // filter
  {
    auto opt = std::make_shared<FilterCmdOpts>();
    auto* sub = app.add_subcommand("filter", "Run the noise-refractory filter cascade");
    sub->add_option("--input", opt->input, "Input event file")->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--output", opt->output, "Output event file")->required();
    add_io_opts(sub, opt->io);
    add_filter_opts(sub, opt->filt);
    runners.emplace_back(sub, [opt] { return run_filter(*opt); });
  }

  // extract
  {
    auto opt = std::make_shared<ExtractOpts>();
    auto* sub = app.add_subcommand("extract", "Extract log-polar descriptors per event");
    sub->add_option("--input", opt->input, "Input event file")->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--output", opt->output, "Binary descriptor output file");
    sub->add_option("--csv", opt->csv, "CSV descriptor output file");
    add_io_opts(sub, opt->io);
    add_grid_opts(sub, opt->grid);
    add_filter_opts(sub, opt->filt);
    sub->add_option("--fifo", opt->fifo, "Per-descriptor event buffer capacity")
        ->capture_default_str();
    sub->add_option("--stride", opt->stride, "Keep every k-th descriptor")->capture_default_str();
    sub->add_option("--limit", opt->limit, "Stop keeping descriptors after this many (0 = all)")
        ->capture_default_str();
    sub->add_flag("--benchmark", opt->benchmark, "Report extraction throughput");
    runners.emplace_back(sub, [opt] { return run_extract(*opt); });
  }

  // train-codebook
  {
    auto opt = std::make_shared<TrainCodebookOpts>();
    auto* sub = app.add_subcommand("train-codebook", "Cluster descriptors into a codebook");
    sub->add_option("--descriptors", opt->inputs, "Binary descriptor files")->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--output", opt->output, "Codebook output file")->required();
    sub->add_option("--forest-output", opt->forest_output, "Approximate-search forest output");
    sub->add_option("--k", opt->k, "Number of codewords")->capture_default_str();
    sub->add_option("--iters", opt->iters, "Maximum refinement iterations")
        ->capture_default_str();
    sub->add_option("--seed", opt->seed, "Random seed")->capture_default_str();
    sub->add_option("--stride", opt->stride, "Subsample: use every k-th descriptor")
        ->capture_default_str();
    sub->add_option("--trees", opt->trees, "Trees in the search forest")->capture_default_str();
    sub->add_option("--max-checks", opt->max_checks, "Search forest check budget")
        ->capture_default_str();
    sub->add_option("--leaf-size", opt->leaf_size, "Search forest leaf size")
        ->capture_default_str();
    runners.emplace_back(sub, [opt] { return run_train_codebook(*opt); });
  }

  // train-classifier
  {
    auto opt = std::make_shared<TrainClassifierOpts>();
    auto* sub = app.add_subcommand("train-classifier",
                                   "Train a one-vs-rest linear classifier from a manifest");
    sub->add_option("--manifest", opt->manifest, "Lines of '<label> <event-file>'")->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--output", opt->output, "Model output file")->required();
    add_represent_opts(sub, opt->rep);
    sub->add_option("--svm-c", opt->svm_c, "Soft-margin cost")->capture_default_str();
    sub->add_option("--epochs", opt->epochs, "Training epochs")->capture_default_str();
    sub->add_option("--seed", opt->seed, "Random seed")->capture_default_str();
    runners.emplace_back(sub, [opt] { return run_train_classifier(*opt); });
  }

  // classify
  {
    auto opt = std::make_shared<ClassifyCmdOpts>();
    auto* sub = app.add_subcommand("classify", "Predict the label of one recording");
    sub->add_option("--input", opt->input, "Input event file")->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--model", opt->model, "Model file")->required()->check(CLI::ExistingFile);
    sub->add_option("--output", opt->output, "Optional file for the predicted label");
    add_represent_opts(sub, opt->rep);
    runners.emplace_back(sub, [opt] { return run_classify(*opt); });
  }

  // eval-classify
  {
    auto opt = std::make_shared<EvalClassifyOpts>();
    auto* sub = app.add_subcommand("eval-classify", "Score a classifier over a manifest");
    sub->add_option("--manifest", opt->manifest, "Lines of '<label> <event-file>'")->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--model", opt->model, "Model file")->required()->check(CLI::ExistingFile);
    sub->add_option("--output", opt->output, "Optional report output file");
    sub->add_option("--prefix-us", opt->prefix_us,
                    "Classify only events before this time (0 = full recording)")
        ->capture_default_str();
    add_represent_opts(sub, opt->rep);
    runners.emplace_back(sub, [opt] { return run_eval_classify(*opt); });
  }

  // track
  {
    auto opt = std::make_shared<TrackOpts>();
    auto* sub = app.add_subcommand("track", "One-shot long-term tracking with re-detection");
    sub->add_option("--input", opt->input, "Input event file")->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--output", opt->output, "Track CSV output file")->required();
    sub->add_option("--roi", opt->roi, "Initial box as x_min,y_min,x_max,y_max");
    sub->add_option("--init", opt->init, "Annotation file whose first boxed interval seeds the "
                    "tracker")->check(CLI::ExistingFile);
    add_io_opts(sub, opt->io);
    add_grid_opts(sub, opt->grid);
    sub->add_option("--theta-ref", opt->cfg.theta_ref_us, "Refractory period in microseconds")
        ->capture_default_str();
    sub->add_option("--theta-noise", opt->cfg.theta_noise_us,
                    "Noise-filter support window in microseconds")->capture_default_str();
    sub->add_option("--fifo", opt->cfg.fifo_capacity, "Per-descriptor event buffer capacity")
        ->capture_default_str();
    sub->add_option("--k", opt->cfg.K, "Codewords for the bootstrap codebook")
        ->capture_default_str();
    sub->add_option("--trees", opt->cfg.n_trees, "Trees in the search forest")
        ->capture_default_str();
    sub->add_option("--max-checks", opt->cfg.max_checks, "Search forest check budget")
        ->capture_default_str();
    sub->add_option("--e-r", opt->cfg.tracker.e_r, "Decision trigger: events per box pixel")
        ->capture_default_str();
    sub->add_option("--pad-x", opt->cfg.tracker.pad_x, "Horizontal box padding")
        ->capture_default_str();
    sub->add_option("--pad-y", opt->cfg.tracker.pad_y, "Vertical box padding")
        ->capture_default_str();
    sub->add_option("--tau-h", opt->cfg.tracker.tau_h, "Consecutive failures before lost")
        ->capture_default_str();
    sub->add_option("--tau", opt->cfg.tau, "Discriminative-word purity threshold")
        ->capture_default_str();
    sub->add_option("--tau-d", opt->cfg.tau_d, "Detector trigger: events per sensor pixel")
        ->capture_default_str();
    sub->add_option("--kernel-m", opt->cfg.tracker.kernel.m, "Kernel feature-map order")
        ->capture_default_str();
    sub->add_option("--kernel-l", opt->cfg.tracker.kernel.L, "Kernel feature-map sampling period")
        ->capture_default_str();
    sub->add_option("--one-shot-us", opt->cfg.one_shot_window_us,
                    "Bootstrap window in microseconds")->capture_default_str();
    sub->add_option("--one-shot-ms", opt->one_shot_ms, "Bootstrap window in milliseconds");
    sub->add_option("--svm-c", opt->cfg.svm_C, "Soft-margin cost")->capture_default_str();
    sub->add_option("--epochs", opt->cfg.svm_epochs, "Training epochs")->capture_default_str();
    sub->add_option("--seed", opt->cfg.seed, "Random seed")->capture_default_str();
    runners.emplace_back(sub, [opt] { return run_track(*opt); });
  }

  // match
  {
    auto opt = std::make_shared<MatchOpts>();
    auto* sub = app.add_subcommand("match", "Match descriptors between two time slices");
    sub->add_option("--input", opt->input, "Input event file")->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--output", opt->output, "Match CSV output file")->required();
    sub->add_option("--slice-a", opt->slice_a, "Query slice as t0,t1 in microseconds")
        ->required();
    sub->add_option("--slice-b", opt->slice_b, "Candidate slice as t0,t1 in microseconds")
        ->required();
    add_io_opts(sub, opt->io);
    add_grid_opts(sub, opt->grid);
    add_filter_opts(sub, opt->filt);
    sub->add_option("--fifo", opt->fifo, "Per-descriptor event buffer capacity")
        ->capture_default_str();
    sub->add_option("--stride", opt->stride, "Keep every k-th descriptor")->capture_default_str();
    sub->add_option("--ratio", opt->ratio, "Distinctiveness ratio threshold")
        ->capture_default_str();
    sub->add_flag("--mutual", opt->mutual, "Require mutual nearest neighbors");
    sub->add_flag("--ann", opt->ann, "Use the approximate-search forest");
    sub->add_option("--trees", opt->trees, "Trees in the search forest")->capture_default_str();
    sub->add_option("--max-checks", opt->max_checks, "Search forest check budget")
        ->capture_default_str();
    sub->add_option("--seed", opt->seed, "Random seed for the search forest")
        ->capture_default_str();
    runners.emplace_back(sub, [opt] { return run_match(*opt); });
  }

  // eval-track
  {
    auto opt = std::make_shared<EvalTrackOpts>();
    auto* sub = app.add_subcommand("eval-track", "Score a track against annotations");
    sub->add_option("--events", opt->events, "Event file the track was computed on")->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--gt", opt->gt, "Ground-truth annotation file")->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--pred", opt->pred, "Track CSV file")->required()->check(CLI::ExistingFile);
    sub->add_option("--output", opt->output, "Optional report output file");
    add_io_opts(sub, opt->io);
    sub->add_option("--interval-us", opt->interval_us, "Evaluation window in microseconds")
        ->capture_default_str();
    sub->add_option("--threshold", opt->threshold, "Overlap threshold for success")
        ->capture_default_str();
    runners.emplace_back(sub, [opt] { return run_eval_track(*opt); });
  }

  // synth
  {
    auto opt = std::make_shared<SynthOpts>();
    auto* sub = app.add_subcommand("synth", "Generate a synthetic polygon scene");
    sub->add_option("--events", opt->events, "Event output file")->required();
    sub->add_option("--gt", opt->gt, "Annotation output file");
    sub->add_option("--correspondence", opt->correspondence,
                    "CSV mapping each event to its shape-frame origin");
    sub->add_option("--format", opt->format, "Event output format")
        ->check(CLI::IsMember({"text", "aer5"}))->capture_default_str();
    sub->add_option("--width", opt->cfg.width, "Sensor width in pixels")->capture_default_str();
    sub->add_option("--height", opt->cfg.height, "Sensor height in pixels")
        ->capture_default_str();
    sub->add_option("--shape", opt->shape, "Polygon vertices as x,y;x,y;... (shape frame)")
        ->capture_default_str();
    sub->add_option("--trajectory", opt->trajectory, "Waypoints as t_us,x,y;...")
        ->capture_default_str();
    sub->add_option("--rot-deg-per-s", opt->cfg.rotation_deg_per_s, "Rotation rate")
        ->capture_default_str();
    sub->add_option("--edge-rate", opt->cfg.edge_rate_per_px_per_ms,
                    "Mean events per edge pixel per millisecond")->capture_default_str();
    sub->add_option("--noise-rate", opt->cfg.noise_rate_per_ms,
                    "Mean uniform noise events per millisecond")->capture_default_str();
    sub->add_option("--duration-us", opt->cfg.duration_us, "Scene duration in microseconds")
        ->capture_default_str();
    sub->add_option("--seed", opt->seed, "Random seed")->capture_default_str();
    runners.emplace_back(sub, [opt] { return run_synth(*opt); });
  }

  // render
  {
    auto opt = std::make_shared<RenderOpts>();
    auto* sub = app.add_subcommand("render", "Render a time window to a PPM image");
    sub->add_option("--input", opt->input, "Input event file")->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--output", opt->output, "PPM output file")->required();
    add_io_opts(sub, opt->io);
    sub->add_option("--t0", opt->t0, "Window start in microseconds")->required();
    sub->add_option("--t1", opt->t1, "Window end in microseconds")->required();
    sub->add_option("--box", opt->boxes, "Overlay box as x_min,y_min,x_max,y_max (repeatable)");
    sub->add_option("--gt", opt->ann, "Annotation file; overlays boxes intersecting the window")
        ->check(CLI::ExistingFile);
    sub->add_option("--track", opt->track, "Track CSV; overlays the last box at or before t1")
        ->check(CLI::ExistingFile);
    sub->add_option("--matches", opt->matches, "Match CSV; overlays match lines")
        ->check(CLI::ExistingFile);
    runners.emplace_back(sub, [opt] { return run_render(*opt); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (!emit_config.empty()) {
      write_file_text(emit_config, app.config_to_str(true, true));
    }
    for (auto& [sub, run] : runners) {
      if (sub->parsed()) return run();
    }
  } catch (const DartError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;  // unreachable: require_subcommand(1) guarantees a parsed subcommand
}
