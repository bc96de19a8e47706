#include "dart/elot.hpp"

#include <cmath>
#include <cstdio>
#include <deque>

#include "dart/rng.hpp"

namespace dart {

namespace {

constexpr int kBootstrapKmeansIters = 100;

void check_tracker_config(const TrackerConfig& cfg) {
  if (!(cfg.e_r > 0.0) || cfg.e_r > 1.0)
    throw ConfigError("tracker: e_r must be in (0, 1]");
  if (cfg.pad_x < 1 || cfg.pad_y < 1) throw ConfigError("tracker: padding must be >= 1");
  if (cfg.tau_h < 1) throw ConfigError("tracker: tau_h must be >= 1");
}

}  // namespace

BootstrapResult bootstrap_train(const std::vector<DartDescriptor>& roi_desc,
                                const std::vector<DartDescriptor>& bg_desc, size_t K,
                                uint64_t seed, const KernelMapConfig& kernel, double tau,
                                double svm_C, int svm_epochs) {
  if (roi_desc.size() < 10 || bg_desc.size() < 10)
    throw InsufficientInit("bootstrap: need >= 10 descriptors per class");
  const size_t n_roi = roi_desc.size(), n_bg = bg_desc.size();
  const int n_w = roi_desc.front().n_w;

  // Augmentation: an independent random circular shift per descriptor.
  Rng rng(seed);
  DataMatrix X;
  X.dim = roi_desc.front().values.size();
  X.data.reserve((n_roi + n_bg) * X.dim);
  auto push_shifted = [&](const DartDescriptor& d) {
    const long f = static_cast<long>(rng.uniform() * n_w);
    X.push_row(circular_shift(d, f).values);
  };
  for (const DartDescriptor& d : roi_desc) push_shifted(d);
  for (const DartDescriptor& d : bg_desc) push_shifted(d);

  BootstrapResult out;
  out.codebook = kmeans_train(X, K, kBootstrapKmeansIters, seed + 1).codebook;

  // Exact quantization of every shifted training descriptor.
  std::vector<uint32_t> words(X.rows);
  std::vector<double> row(X.dim);
  for (size_t i = 0; i < X.rows; ++i) {
    std::copy_n(X.row(i), X.dim, row.begin());
    words[i] = quantize(row, out.codebook);
  }

  // Bootstrap replicates: one SVM sample per original descriptor, each a BoW
  // over min(class size, 200) draws with replacement from its class.
  DataMatrix samples;
  std::vector<int> labels;
  std::vector<uint32_t> draw;
  auto add_replicates = [&](size_t offset, size_t class_size, int label) {
    const size_t draw_n = std::min(class_size, kBootstrapDrawCap);
    for (size_t rep = 0; rep < class_size; ++rep) {
      draw.clear();
      for (size_t j = 0; j < draw_n; ++j)
        draw.push_back(words[offset + rng.below(class_size)]);
      const BowHistogram h = bow_pool(draw, K);
      samples.push_row(kernel_map(h.freq, kernel));
      labels.push_back(label);
    }
  };
  add_replicates(0, n_roi, 1);
  add_replicates(n_roi, n_bg, -1);

  out.model = svm_train(samples, labels, svm_C, svm_epochs, seed + 2);

  // Detector words: clusters whose training membership is ROI-pure above tau.
  std::vector<uint64_t> total(K, 0), roi_hits(K, 0);
  for (size_t i = 0; i < words.size(); ++i) {
    ++total[words[i]];
    if (i < n_roi) ++roi_hits[words[i]];
  }
  out.detector.tau = tau;
  for (size_t k = 0; k < K; ++k) {
    if (total[k] == 0) continue;
    const double p = static_cast<double>(roi_hits[k]) / static_cast<double>(total[k]);
    if (p > tau) out.detector.words.push_back(static_cast<uint32_t>(k));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tracker (local search)
// ---------------------------------------------------------------------------

Tracker::Tracker(const BoundingBox& roi, const TrackerConfig& cfg, size_t K, int width,
                 int height)
    : cfg_(cfg), width_(width), height_(height) {
  check_tracker_config(cfg);
  roi.validate();
  box_ = roi.padded(0, 0, width, height);  // clip to the sensor
  padded_ = box_.padded(cfg_.pad_x, cfg_.pad_y, width_, height_);
  hist_.assign(K, 0.0);
}

void Tracker::reset_accumulators() {
  std::fill(hist_.begin(), hist_.end(), 0.0);
  members_.clear();
  count_ = 0;
}

void Tracker::reinit(const BoundingBox& box) {
  box_ = box.padded(0, 0, width_, height_);
  padded_ = box_.padded(cfg_.pad_x, cfg_.pad_y, width_, height_);
  fail_ = 0;
  reset_accumulators();
}

TrackDecision Tracker::step(const Event& e, SvmModel& model, const DartEngine& engine,
                            const Codebook& codebook, const KdForest* forest) {
  if (e.x >= width_ || e.y >= height_) return {TrackDecisionKind::accumulating, box_, 0.0};
  if (!padded_.contains(e.x, e.y)) return {TrackDecisionKind::accumulating, box_, 0.0};

  const DartDescriptor d = engine.extract(e);
  const uint32_t word = forest
                            ? forest->query(codebook, d.values.data(), scratch_, cfg_.checks)
                            : quantize(d.values, codebook);
  hist_[word] += 1.0;
  members_.emplace_back(e.x, e.y);
  ++count_;

  if (static_cast<double>(count_) <= cfg_.e_r * static_cast<double>(box_.area()))
    return {TrackDecisionKind::accumulating, box_, 0.0};

  // Decision: score the normalized accumulated histogram.
  std::vector<double> h(hist_);
  const double inv = 1.0 / static_cast<double>(count_);
  for (double& v : h) v *= inv;
  const std::vector<double> psi = kernel_map(h, cfg_.kernel);
  const double score = svm_score(model, psi);

  if (model.score_count > 0 && score < model.score_mean) {
    // Failback: keep the previous box; too many in a row means lost.
    ++fail_;
    reset_accumulators();
    if (fail_ > cfg_.tau_h) return {TrackDecisionKind::lost, box_, score};
    return {TrackDecisionKind::failed_step, box_, score};
  }

  model.observe_score(score);
  svm_update_online(model, psi, 1, online_rate(model));
  BoundingBox next{members_.front().first, members_.front().second,
                   members_.front().first, members_.front().second};
  for (const auto& [mx, my] : members_) {
    next.x_min = std::min<int>(next.x_min, mx);
    next.x_max = std::max<int>(next.x_max, mx);
    next.y_min = std::min<int>(next.y_min, my);
    next.y_max = std::max<int>(next.y_max, my);
  }
  box_ = next;
  padded_ = box_.padded(cfg_.pad_x, cfg_.pad_y, width_, height_);
  fail_ = 0;
  reset_accumulators();
  return {TrackDecisionKind::updated, box_, score};
}

// ---------------------------------------------------------------------------
// Detector (global search)
// ---------------------------------------------------------------------------

Detector::Detector(int width, int height, double tau_d)
    : width_(width), height_(height), tau_d_(tau_d) {
  if (width <= 0 || height <= 0) throw ConfigError("detector: empty sensor");
  if (!(tau_d > 0.0) || tau_d > 1.0)
    throw ConfigError("detector: tau_d must be in (0, 1]");
  m_.assign(static_cast<size_t>(width) * height, 0);
  mb_.assign(static_cast<size_t>(width) * height, 0);
}

void Detector::reset() {
  std::fill(m_.begin(), m_.end(), 0);
  std::fill(mb_.begin(), mb_.end(), 0);
  count_ = 0;
}

DetectDecision Detector::step(const Event& e, uint32_t word, const DetectorModel& model,
                              int64_t last_box_area) {
  if (!model.contains(word)) return {DetectDecisionKind::accumulating, {}};
  const size_t idx = static_cast<size_t>(e.y) * width_ + e.x;
  ++m_[idx];
  ++count_;
  if (m_[idx] > static_cast<uint32_t>(tau_c_)) mb_[idx] = 1;

  if (static_cast<double>(count_) <=
      tau_d_ * static_cast<double>(width_) * static_cast<double>(height_))
    return {DetectDecisionKind::accumulating, {}};

  const bool any = std::find(mb_.begin(), mb_.end(), uint8_t{1}) != mb_.end();
  if (!any) {
    // Votes too spread for the current confidence bar; try a fresh burst.
    reset();
    return {DetectDecisionKind::retry, {}};
  }
  const std::vector<uint8_t> dilated = dilate_cross(mb_, width_, height_);
  const BoundingBox bd = largest_component(dilated, width_, height_);
  if (bd.area() < last_box_area) return {DetectDecisionKind::found, bd};
  ++tau_c_;
  reset();
  return {DetectDecisionKind::retry, {}};
}

std::vector<uint8_t> dilate_cross(const std::vector<uint8_t>& mb, int width, int height) {
  std::vector<uint8_t> out(mb);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (!mb[static_cast<size_t>(y) * width + x]) continue;
      if (x > 0) out[static_cast<size_t>(y) * width + x - 1] = 1;
      if (x + 1 < width) out[static_cast<size_t>(y) * width + x + 1] = 1;
      if (y > 0) out[static_cast<size_t>(y - 1) * width + x] = 1;
      if (y + 1 < height) out[static_cast<size_t>(y + 1) * width + x] = 1;
    }
  }
  return out;
}

BoundingBox largest_component(const std::vector<uint8_t>& mb, int width, int height) {
  if (static_cast<size_t>(width) * height != mb.size())
    throw ShapeError("largest_component: size mismatch");
  std::vector<uint8_t> visited(mb.size(), 0);
  BoundingBox best{};
  size_t best_size = 0;
  std::deque<int> queue;
  for (int start = 0; start < static_cast<int>(mb.size()); ++start) {
    if (!mb[start] || visited[start]) continue;
    // BFS one 4-connected component; first-seen ordering breaks size ties.
    size_t size = 0;
    BoundingBox box{start % width, start / width, start % width, start / width};
    visited[start] = 1;
    queue.push_back(start);
    while (!queue.empty()) {
      const int cur = queue.front();
      queue.pop_front();
      ++size;
      const int x = cur % width, y = cur / width;
      box.x_min = std::min(box.x_min, x);
      box.x_max = std::max(box.x_max, x);
      box.y_min = std::min(box.y_min, y);
      box.y_max = std::max(box.y_max, y);
      const int neighbors[4] = {cur - 1, cur + 1, cur - width, cur + width};
      const bool valid[4] = {x > 0, x + 1 < width, y > 0, y + 1 < height};
      for (int n = 0; n < 4; ++n) {
        if (!valid[n] || !mb[neighbors[n]] || visited[neighbors[n]]) continue;
        visited[neighbors[n]] = 1;
        queue.push_back(neighbors[n]);
      }
    }
    if (size > best_size) {
      best_size = size;
      best = box;
    }
  }
  if (best_size == 0) throw NoComponent("largest_component: all-zero matrix");
  return best;
}

// ---------------------------------------------------------------------------
// Orchestration
// ---------------------------------------------------------------------------

std::vector<TrackResult> elot_run(const EventStream& stream, const BoundingBox& roi0,
                                  const ElotConfig& cfg) {
  check_tracker_config(cfg.tracker);
  roi0.validate();
  const EventStream filtered = cascade(stream, cfg.theta_noise_us, cfg.theta_ref_us);
  if (filtered.events.empty())
    throw InsufficientInit("elot: no events survive filtering");

  const LogPolarGrid grid = build_grid(cfg.grid);
  DartEngine engine(grid, stream.width, stream.height, cfg.fifo_capacity);

  // One-shot window: collect ROI vs background descriptors.
  const uint64_t t0 = filtered.events.front().t;
  const uint64_t init_end = t0 + cfg.one_shot_window_us;
  std::vector<DartDescriptor> roi_desc, bg_desc;
  size_t i = 0;
  for (; i < filtered.events.size() && filtered.events[i].t < init_end; ++i) {
    const Event& e = filtered.events[i];
    engine.push(e);
    const DartDescriptor d = engine.extract(e);
    if (roi0.contains(e.x, e.y))
      roi_desc.push_back(d);
    else
      bg_desc.push_back(d);
  }
  const size_t K = std::min(cfg.K, roi_desc.size() + bg_desc.size());
  BootstrapResult bs =
      bootstrap_train(roi_desc, bg_desc, K, cfg.seed, cfg.tracker.kernel, cfg.tau,
                      cfg.svm_C, cfg.svm_epochs);
  const KdForest forest =
      build_forest(bs.codebook, cfg.n_trees, cfg.seed + 3, cfg.max_checks);

  std::vector<TrackResult> results;
  results.push_back({init_end, roi0, 0.0, TrackMode::tracked});

  Tracker tracker(roi0, cfg.tracker, K, stream.width, stream.height);
  Detector detector(stream.width, stream.height, cfg.tau_d);
  bool detecting = false;
  int64_t last_area = tracker.box().area();
  KdForest::Scratch det_scratch;

  for (; i < filtered.events.size(); ++i) {
    const Event& e = filtered.events[i];
    engine.push(e);
    if (!detecting) {
      const TrackDecision dec = tracker.step(e, bs.model, engine, bs.codebook, &forest);
      switch (dec.kind) {
        case TrackDecisionKind::updated:
          results.push_back({e.t, dec.box, dec.score, TrackMode::tracked});
          last_area = dec.box.area();
          break;
        case TrackDecisionKind::failed_step:
          results.push_back({e.t, dec.box, dec.score, TrackMode::tracked});
          break;
        case TrackDecisionKind::lost:
          detecting = true;
          detector = Detector(stream.width, stream.height, cfg.tau_d);
          last_area = tracker.box().area();
          break;
        case TrackDecisionKind::accumulating:
          break;
      }
    } else {
      const DartDescriptor d = engine.extract(e);
      const uint32_t word =
          forest.query(bs.codebook, d.values.data(), det_scratch, cfg.max_checks);
      const DetectDecision dd = detector.step(e, word, bs.detector, last_area);
      if (dd.kind == DetectDecisionKind::found) {
        tracker.reinit(dd.box);
        results.push_back({e.t, dd.box, 0.0, TrackMode::detected});
        detecting = false;
      }
    }
  }
  return results;
}

std::string track_results_to_csv(const std::vector<TrackResult>& results) {
  std::string out = "t_decision_us,mode,x_min,y_min,x_max,y_max,score\n";
  char buf[160];
  for (const TrackResult& r : results) {
    std::snprintf(buf, sizeof(buf), "%llu,%s,%d,%d,%d,%d,%.9g\n",
                  static_cast<unsigned long long>(r.t_decision_us),
                  r.mode == TrackMode::tracked ? "tracked" : "detected", r.box.x_min,
                  r.box.y_min, r.box.x_max, r.box.y_max, r.score);
    out += buf;
  }
  return out;
}

}  // namespace dart
