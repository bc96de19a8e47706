#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dart/errors.hpp"
#include "dart/events.hpp"

namespace dart {

inline constexpr uint64_t kEvalIntervalUs = 10000;  ///< 10 ms windows
inline constexpr double kOverlapThreshold = 0.5;

/// Event-count overlap figures for one evaluation interval.
struct IntervalMetrics {
  uint64_t t_start = 0;
  uint64_t tp = 0;  ///< events inside both boxes
  uint64_t fp = 0;  ///< events inside the prediction only
  uint64_t fn = 0;  ///< events inside ground truth only
  double iou = 0.0;
  bool has_gt = false;
  bool has_pred = false;
  bool success = false;          ///< iou >= threshold with gt present
  double center_error_px = 0.0;  ///< defined when both boxes present
  double center_error_norm = 0.0;  ///< center error / gt diagonal
};

/// Tally the interval's events against the two boxes. IoU = TP/(TP+FP+FN)
/// (0 when the denominator is empty). A prediction with no ground truth makes
/// every predicted event a false positive.
IntervalMetrics iou_interval(const std::optional<BoundingBox>& pred,
                             const std::optional<BoundingBox>& gt,
                             const std::vector<Event>& events,
                             double threshold = kOverlapThreshold);

/// Fraction of ground-truth-present intervals with IoU >= threshold.
/// Throws NoGroundTruth when no interval carries ground truth.
double os_metric(const std::vector<IntervalMetrics>& intervals,
                 double threshold = kOverlapThreshold);

/// Mean center error over successful intervals; .first normalized by the gt
/// diagonal, .second in raw pixels. Throws NoSuccesses when none succeeded.
std::pair<double, double> cle_metric(const std::vector<IntervalMetrics>& intervals);

/// Overall and class-averaged accuracy with the confusion matrix
/// (rows = actual, columns = predicted, labels ascending).
struct AccuracyReport {
  double overall = 0.0;
  double class_averaged = 0.0;
  std::vector<int> labels;
  std::vector<std::vector<uint64_t>> confusion;
};

AccuracyReport accuracy(const std::vector<int>& actual, const std::vector<int>& predicted);

/// Predicted box state change at t_us (absent = tracker lost).
struct TimedBox {
  uint64_t t_us = 0;
  std::optional<BoundingBox> box;
};

/// Score a predicted-box timeline against an annotation track over 10 ms
/// half-open windows aligned to the track start. The prediction for a window
/// is the latest entry before the window's end; ground truth is the
/// annotation interval containing the window's start.
std::vector<IntervalMetrics> evaluate_intervals(const EventStream& stream,
                                                const AnnotationTrack& gt,
                                                const std::vector<TimedBox>& pred,
                                                uint64_t interval_us = kEvalIntervalUs,
                                                double threshold = kOverlapThreshold);

/// Aggregate of an interval sweep; CLE fields are NaN when nothing succeeded.
struct TrackEvalSummary {
  double os = 0.0;
  double cle_norm = 0.0;
  double cle_px = 0.0;
  double mean_iou = 0.0;
  size_t gt_intervals = 0;
  size_t successes = 0;
};

TrackEvalSummary summarize_track_eval(const std::vector<IntervalMetrics>& intervals,
                                      double threshold = kOverlapThreshold);

}  // namespace dart
