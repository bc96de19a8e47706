#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "dart/descriptor.hpp"
#include "dart/encoding.hpp"
#include "dart/events.hpp"
#include "dart/filtering.hpp"
#include "dart/svm.hpp"

namespace dart {

/// Event-driven tracker parameters.
struct TrackerConfig {
  double e_r = 0.05;  ///< decision after count > e_r * area(previous box)
  int pad_x = 1;      ///< search padding, pixels per side
  int pad_y = 1;
  int tau_h = 3;  ///< consecutive failed decisions tolerated before lost
  KernelMapConfig kernel;
  int checks = -1;  ///< forest budget for in-box quantization
};

/// Codewords whose training clusters were almost purely object descriptors.
struct DetectorModel {
  std::vector<uint32_t> words;  ///< sorted ascending
  double tau = 0.95;            ///< purity threshold used to build the set

  bool contains(uint32_t w) const {
    return std::binary_search(words.begin(), words.end(), w);
  }
};

/// One-shot training output.
struct BootstrapResult {
  Codebook codebook;
  SvmModel model;
  DetectorModel detector;
};

inline constexpr size_t kBootstrapDrawCap = 200;
inline constexpr double kDefaultDetectorTau = 0.95;
inline constexpr double kDefaultDetectorTauD = 0.25;
inline constexpr uint64_t kDefaultOneShotWindowUs = 300000;

/// One-shot learning: every descriptor gets an independent random circular
/// shift; k-means over the union builds the codebook; |roi| positive and
/// |bg| negative bootstrap replicates (each drawing min(class size, 200)
/// shifted descriptors with replacement, BoW-pooled and kernel-mapped) train
/// the SVM; detector words are the clusters with ROI purity strictly above
/// tau. Quantization here is exact. Throws InsufficientInit when either side
/// has fewer than 10 descriptors.
BootstrapResult bootstrap_train(const std::vector<DartDescriptor>& roi_desc,
                                const std::vector<DartDescriptor>& bg_desc, size_t K,
                                uint64_t seed, const KernelMapConfig& kernel = {},
                                double tau = kDefaultDetectorTau,
                                double svm_C = kDefaultSvmC,
                                int svm_epochs = kDefaultSvmEpochs);

enum class TrackDecisionKind { accumulating, updated, failed_step, lost };

struct TrackDecision {
  TrackDecisionKind kind = TrackDecisionKind::accumulating;
  BoundingBox box;     ///< current box after the step
  double score = 0.0;  ///< SVM score at a decision; 0 while accumulating
};

/// Local-search tracker. Events inside the padded previous box accumulate a
/// BoW histogram; once count exceeds e_r * area(previous box) the histogram
/// is scored: below the accepted-score mean it fails back to the previous box
/// (lost after tau_h + 1 consecutive failures), otherwise the box shrinks to
/// the member events' extents and the model takes a positive online update.
class Tracker {
 public:
  Tracker(const BoundingBox& roi, const TrackerConfig& cfg, size_t K, int width,
          int height);

  /// Feed one in-time-order event. The engine must already contain it.
  TrackDecision step(const Event& e, SvmModel& model, const DartEngine& engine,
                     const Codebook& codebook, const KdForest* forest);

  /// Re-entry from the detector: new box, failure count cleared, per-step
  /// accumulators reset; the accepted-score history lives in the model and
  /// is carried forward.
  void reinit(const BoundingBox& box);

  const BoundingBox& box() const { return box_; }
  int fail() const { return fail_; }

 private:
  TrackerConfig cfg_;
  int width_, height_;
  BoundingBox box_;
  BoundingBox padded_;
  std::vector<double> hist_;
  std::vector<std::pair<uint16_t, uint16_t>> members_;
  uint64_t count_ = 0;
  int fail_ = 0;
  KdForest::Scratch scratch_;

  void reset_accumulators();
};

enum class DetectDecisionKind { accumulating, retry, found };

struct DetectDecision {
  DetectDecisionKind kind = DetectDecisionKind::accumulating;
  BoundingBox box;  ///< valid when kind == found
};

/// Global-search detector. Detector-word events vote into an accumulation
/// matrix; pixels past the confidence threshold form a binary map which is
/// cross-dilated, and the largest 4-connected component's box is proposed
/// once votes exceed tau_d * sensor area. Oversized proposals raise the
/// confidence threshold and restart accumulation.
class Detector {
 public:
  Detector(int width, int height, double tau_d = kDefaultDetectorTauD);

  DetectDecision step(const Event& e, uint32_t word, const DetectorModel& model,
                      int64_t last_box_area);

  int tau_c() const { return tau_c_; }

 private:
  int width_, height_;
  double tau_d_;
  int tau_c_ = 1;
  uint64_t count_ = 0;
  std::vector<uint32_t> m_;
  std::vector<uint8_t> mb_;

  void reset();
};

/// Bounding box of the 4-connected component with the most set pixels; ties
/// go to the component holding the first set pixel in row-major order.
/// Throws NoComponent on an all-zero matrix.
BoundingBox largest_component(const std::vector<uint8_t>& mb, int width, int height);

/// Cross (4-neighbor) dilation of a binary matrix.
std::vector<uint8_t> dilate_cross(const std::vector<uint8_t>& mb, int width, int height);

enum class TrackMode { tracked, detected };

struct TrackResult {
  uint64_t t_decision_us = 0;
  BoundingBox box;
  double score = 0.0;
  TrackMode mode = TrackMode::tracked;
};

/// Full long-term pipeline configuration.
struct ElotConfig {
  GridParams grid;
  TrackerConfig tracker;
  double tau = kDefaultDetectorTau;
  double tau_d = kDefaultDetectorTauD;
  size_t K = 300;
  int n_trees = 4;
  int max_checks = 15;
  uint64_t one_shot_window_us = kDefaultOneShotWindowUs;
  uint64_t theta_noise_us = kDefaultThetaNoiseUs;
  uint64_t theta_ref_us = kDefaultThetaRefUs;
  size_t fifo_capacity = kDefaultFifoCapacity;
  double svm_C = kDefaultSvmC;
  int svm_epochs = kDefaultSvmEpochs;
  uint64_t seed = 0;
};

/// One-shot train on the first window (ROI vs background descriptors), then
/// track; on lost, a fresh detector searches globally and re-initializes the
/// tracker on success. The detector gets no online update. The first result
/// records the initialization box. Throws InsufficientInit when the window
/// can't field 10 descriptors per class.
std::vector<TrackResult> elot_run(const EventStream& stream, const BoundingBox& roi0,
                                  const ElotConfig& cfg);

/// Track CSV: header + `t_decision_us, mode, x_min, y_min, x_max, y_max, score`.
std::string track_results_to_csv(const std::vector<TrackResult>& results);

}  // namespace dart
