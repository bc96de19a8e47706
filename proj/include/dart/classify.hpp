#pragma once

#include <cstdint>
#include <vector>

#include "dart/descriptor.hpp"
#include "dart/encoding.hpp"
#include "dart/events.hpp"
#include "dart/filtering.hpp"
#include "dart/svm.hpp"

namespace dart {

/// Stage parameters for the end-to-end classification pipeline.
struct ClassifyParams {
  uint64_t theta_noise_us = kDefaultThetaNoiseUs;
  uint64_t theta_ref_us = kDefaultThetaRefUs;
  size_t fifo_capacity = kDefaultFifoCapacity;
  KernelMapConfig kernel;
  int checks = -1;  ///< forest check budget; negative uses the forest default
};

/// Filter the stream, extract one descriptor per surviving event, and
/// quantize each against the codebook (forest may be null for exact search).
std::vector<QuantizedEvent> quantize_stream(const EventStream& stream,
                                            const LogPolarGrid& grid,
                                            const Codebook& codebook,
                                            const KdForest* forest,
                                            const ClassifyParams& params);

/// Spatial-pyramid pool + kernel map over pre-quantized events.
std::vector<double> representation_from_quantized(const std::vector<QuantizedEvent>& qe,
                                                  int width, int height, size_t K,
                                                  const KernelMapConfig& kernel);

/// Full-stream kernel-mapped representation (quantize + pool + map).
std::vector<double> compute_representation(const EventStream& stream,
                                           const LogPolarGrid& grid,
                                           const Codebook& codebook,
                                           const KdForest* forest,
                                           const ClassifyParams& params);

/// filter -> descriptors -> quantize -> pool -> kernel map -> argmax label.
/// Throws NoEvidence when no event survives filtering.
int classify_pipeline(const EventStream& stream, const LogPolarGrid& grid,
                      const Codebook& codebook, const KdForest* forest,
                      const ClassifyParams& params, const MulticlassModel& mc);

/// Label decided from the events in [0, t_us) at each checkpoint.
struct TimelinePoint {
  uint64_t t_us = 0;
  int label = 0;
};

/// Classify growing prefixes at interval boundaries k*interval_us; checkpoints
/// whose prefix holds no quantized event are skipped.
std::vector<TimelinePoint> classify_timeline(const EventStream& stream,
                                             const LogPolarGrid& grid,
                                             const Codebook& codebook,
                                             const KdForest* forest,
                                             const ClassifyParams& params,
                                             const MulticlassModel& mc,
                                             uint64_t interval_us);

}  // namespace dart
