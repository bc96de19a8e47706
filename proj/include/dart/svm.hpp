#pragma once

#include <cstdint>
#include <vector>

#include "dart/encoding.hpp"
#include "dart/errors.hpp"

namespace dart {

/// Linear SVM over kernel-mapped representations, trained by stochastic
/// subgradient descent on the primal hinge objective.
struct SvmModel {
  std::vector<double> w;
  double b = 0.0;
  double C = 1.0;
  double lambda = 0.0;      ///< 1 / (C * n) from batch training
  double final_step = 0.0;  ///< last batch step size; anchors online updates
  double score_mean = 0.0;  ///< running mean of observed scores
  uint64_t score_count = 0;

  /// Fold a score into the running mean (tracking history).
  void observe_score(double s) {
    ++score_count;
    score_mean += (s - score_mean) / static_cast<double>(score_count);
  }
};

/// One-vs-rest ensemble; models[i] scores labels[i], labels ascending.
struct MulticlassModel {
  std::vector<int> labels;
  std::vector<SvmModel> models;
};

inline constexpr double kDefaultSvmC = 1.0;
inline constexpr int kDefaultSvmEpochs = 50;
/// Online steps run at this fraction of the batch-final step size.
inline constexpr double kOnlineRateFraction = 0.01;

/// Train on rows of `samples` with labels in {-1, +1}. Minimizes
/// lambda/2 |w|^2 + mean hinge loss, lambda = 1/(C*n), step 1/(lambda*t);
/// the bias rides the same schedule as an implicit constant feature.
/// Deterministic given seed. Throws DegenerateTraining unless both labels
/// are present.
SvmModel svm_train(const DataMatrix& samples, const std::vector<int>& labels,
                   double C = kDefaultSvmC, int epochs = kDefaultSvmEpochs,
                   uint64_t seed = 0);

/// w . psi + b; positive indicates presence. Throws ShapeError on mismatch.
double svm_score(const SvmModel& model, const std::vector<double>& psi);

/// One hinge subgradient step at (psi, label) with the given step size; when
/// the margin is already >= 1 only the regularization shrink applies.
void svm_update_online(SvmModel& model, const std::vector<double>& psi, int label,
                       double rate);

/// Step size used for online updates of a batch-trained model.
inline double online_rate(const SvmModel& model) {
  return kOnlineRateFraction * model.final_step;
}

/// One-vs-rest training across the distinct labels (ascending).
MulticlassModel multiclass_train(const DataMatrix& samples, const std::vector<int>& labels,
                                 double C = kDefaultSvmC, int epochs = kDefaultSvmEpochs,
                                 uint64_t seed = 0);

/// Argmax of per-class scores; exact ties resolve to the lowest label.
int multiclass_predict(const MulticlassModel& mc, const std::vector<double>& psi);

/// All per-class scores in label order (diagnostics, temporal plots).
std::vector<double> multiclass_scores(const MulticlassModel& mc,
                                      const std::vector<double>& psi);

// Binary model files: "DRTS" = single model, "DRTM" = one-vs-rest ensemble.
std::vector<uint8_t> serialize_svm(const SvmModel& model);
SvmModel parse_svm(const std::vector<uint8_t>& bytes);
std::vector<uint8_t> serialize_multiclass(const MulticlassModel& mc);
MulticlassModel parse_multiclass(const std::vector<uint8_t>& bytes);

}  // namespace dart
