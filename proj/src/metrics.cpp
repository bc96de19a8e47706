#include "dart/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace dart {

IntervalMetrics iou_interval(const std::optional<BoundingBox>& pred,
                             const std::optional<BoundingBox>& gt,
                             const std::vector<Event>& events, double threshold) {
  IntervalMetrics m;
  m.has_gt = gt.has_value();
  m.has_pred = pred.has_value();
  for (const Event& e : events) {
    const bool in_pred = pred && pred->contains(e.x, e.y);
    const bool in_gt = gt && gt->contains(e.x, e.y);
    if (in_pred && in_gt)
      ++m.tp;
    else if (in_pred)
      ++m.fp;
    else if (in_gt)
      ++m.fn;
  }
  const uint64_t denom = m.tp + m.fp + m.fn;
  m.iou = denom == 0 ? 0.0 : static_cast<double>(m.tp) / static_cast<double>(denom);
  m.success = m.has_gt && m.iou >= threshold;
  if (pred && gt) {
    const double dx = pred->center_x() - gt->center_x();
    const double dy = pred->center_y() - gt->center_y();
    m.center_error_px = std::hypot(dx, dy);
    m.center_error_norm = m.center_error_px / gt->diagonal();
  }
  return m;
}

double os_metric(const std::vector<IntervalMetrics>& intervals, double threshold) {
  size_t with_gt = 0, hits = 0;
  for (const IntervalMetrics& m : intervals) {
    if (!m.has_gt) continue;
    ++with_gt;
    if (m.iou >= threshold) ++hits;
  }
  if (with_gt == 0) throw NoGroundTruth("os_metric: no interval has ground truth");
  return static_cast<double>(hits) / static_cast<double>(with_gt);
}

std::pair<double, double> cle_metric(const std::vector<IntervalMetrics>& intervals) {
  size_t n = 0;
  double sum_norm = 0.0, sum_px = 0.0;
  for (const IntervalMetrics& m : intervals) {
    if (!m.success || !m.has_pred) continue;
    ++n;
    sum_norm += m.center_error_norm;
    sum_px += m.center_error_px;
  }
  if (n == 0) throw NoSuccesses("cle_metric: no successful interval");
  return {sum_norm / static_cast<double>(n), sum_px / static_cast<double>(n)};
}

AccuracyReport accuracy(const std::vector<int>& actual, const std::vector<int>& predicted) {
  if (actual.empty() || actual.size() != predicted.size())
    throw ShapeError("accuracy: label vectors empty or mismatched");
  std::map<int, size_t> index;
  for (int l : actual) index.emplace(l, 0);
  for (int l : predicted) index.emplace(l, 0);
  AccuracyReport r;
  for (auto& [label, idx] : index) {
    idx = r.labels.size();
    r.labels.push_back(label);
  }
  r.confusion.assign(r.labels.size(), std::vector<uint64_t>(r.labels.size(), 0));
  uint64_t correct = 0;
  for (size_t i = 0; i < actual.size(); ++i) {
    ++r.confusion[index[actual[i]]][index[predicted[i]]];
    if (actual[i] == predicted[i]) ++correct;
  }
  r.overall = static_cast<double>(correct) / static_cast<double>(actual.size());
  double sum = 0.0;
  size_t classes = 0;
  for (size_t c = 0; c < r.labels.size(); ++c) {
    uint64_t row = 0;
    for (uint64_t v : r.confusion[c]) row += v;
    if (row == 0) continue;  // label appears only among predictions
    ++classes;
    sum += static_cast<double>(r.confusion[c][c]) / static_cast<double>(row);
  }
  r.class_averaged = classes == 0 ? 0.0 : sum / static_cast<double>(classes);
  return r;
}

std::vector<IntervalMetrics> evaluate_intervals(const EventStream& stream,
                                                const AnnotationTrack& gt,
                                                const std::vector<TimedBox>& pred,
                                                uint64_t interval_us, double threshold) {
  if (interval_us == 0) throw ConfigError("evaluate_intervals: zero interval");
  if (gt.intervals.empty())
    throw NoGroundTruth("evaluate_intervals: empty annotation track");
  const uint64_t track_start = gt.intervals.front().t_start;
  const uint64_t track_end = gt.intervals.back().t_end;

  std::vector<IntervalMetrics> out;
  size_t ev_cursor = 0, gt_cursor = 0, pred_cursor = 0;
  for (uint64_t a = track_start; a < track_end; a += interval_us) {
    const uint64_t b = std::min(a + interval_us, track_end);

    while (ev_cursor < stream.events.size() && stream.events[ev_cursor].t < a)
      ++ev_cursor;
    std::vector<Event> window;
    for (size_t i = ev_cursor; i < stream.events.size() && stream.events[i].t < b; ++i)
      window.push_back(stream.events[i]);

    while (gt_cursor < gt.intervals.size() && gt.intervals[gt_cursor].t_end <= a)
      ++gt_cursor;
    std::optional<BoundingBox> gt_box;
    if (gt_cursor < gt.intervals.size() && gt.intervals[gt_cursor].t_start <= a)
      gt_box = gt.intervals[gt_cursor].box;

    while (pred_cursor < pred.size() && pred[pred_cursor].t_us < b) ++pred_cursor;
    std::optional<BoundingBox> pred_box;
    if (pred_cursor > 0) pred_box = pred[pred_cursor - 1].box;

    if (!gt_box && !pred_box) continue;  // nothing to score in this window
    IntervalMetrics m = iou_interval(pred_box, gt_box, window, threshold);
    m.t_start = a;
    out.push_back(m);
  }
  return out;
}

TrackEvalSummary summarize_track_eval(const std::vector<IntervalMetrics>& intervals,
                                      double threshold) {
  TrackEvalSummary s;
  s.os = os_metric(intervals, threshold);
  double iou_sum = 0.0;
  for (const IntervalMetrics& m : intervals) {
    if (!m.has_gt) continue;
    ++s.gt_intervals;
    iou_sum += m.iou;
    if (m.success && m.has_pred) ++s.successes;
  }
  s.mean_iou = iou_sum / static_cast<double>(s.gt_intervals);
  if (s.successes > 0) {
    const auto [norm, px] = cle_metric(intervals);
    s.cle_norm = norm;
    s.cle_px = px;
  } else {
    s.cle_norm = s.cle_px = std::numeric_limits<double>::quiet_NaN();
  }
  return s;
}

}  // namespace dart
