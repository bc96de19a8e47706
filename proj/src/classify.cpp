#include "dart/classify.hpp"

#include <algorithm>

namespace dart {

std::vector<QuantizedEvent> quantize_stream(const EventStream& stream,
                                            const LogPolarGrid& grid,
                                            const Codebook& codebook,
                                            const KdForest* forest,
                                            const ClassifyParams& params) {
  const EventStream filtered =
      cascade(stream, params.theta_noise_us, params.theta_ref_us);
  DartEngine engine(grid, stream.width, stream.height, params.fifo_capacity);
  KdForest::Scratch scratch;
  std::vector<QuantizedEvent> out;
  out.reserve(filtered.events.size());
  for (const Event& e : filtered.events) {
    engine.push(e);
    const DartDescriptor d = engine.extract(e);
    uint32_t word;
    if (forest)
      word = forest->query(codebook, d.values.data(), scratch, params.checks);
    else
      word = quantize(d.values, codebook);
    out.push_back({e.x, e.y, word});
  }
  return out;
}

std::vector<double> representation_from_quantized(const std::vector<QuantizedEvent>& qe,
                                                  int width, int height, size_t K,
                                                  const KernelMapConfig& kernel) {
  return kernel_map(spm_pool(qe, width, height, K), kernel);
}

std::vector<double> compute_representation(const EventStream& stream,
                                           const LogPolarGrid& grid,
                                           const Codebook& codebook,
                                           const KdForest* forest,
                                           const ClassifyParams& params) {
  const std::vector<QuantizedEvent> qe =
      quantize_stream(stream, grid, codebook, forest, params);
  return representation_from_quantized(qe, stream.width, stream.height, codebook.k,
                                       params.kernel);
}

int classify_pipeline(const EventStream& stream, const LogPolarGrid& grid,
                      const Codebook& codebook, const KdForest* forest,
                      const ClassifyParams& params, const MulticlassModel& mc) {
  const std::vector<QuantizedEvent> qe =
      quantize_stream(stream, grid, codebook, forest, params);
  if (qe.empty()) throw NoEvidence("classify: no events survive filtering");
  const std::vector<double> psi = representation_from_quantized(
      qe, stream.width, stream.height, codebook.k, params.kernel);
  return multiclass_predict(mc, psi);
}

std::vector<TimelinePoint> classify_timeline(const EventStream& stream,
                                             const LogPolarGrid& grid,
                                             const Codebook& codebook,
                                             const KdForest* forest,
                                             const ClassifyParams& params,
                                             const MulticlassModel& mc,
                                             uint64_t interval_us) {
  if (interval_us == 0) throw ConfigError("classify_timeline: zero interval");
  const EventStream filtered =
      cascade(stream, params.theta_noise_us, params.theta_ref_us);
  std::vector<TimelinePoint> out;
  if (filtered.events.empty()) return out;

  // Quantize once; reclassify the growing prefix at each boundary.
  DartEngine engine(grid, stream.width, stream.height, params.fifo_capacity);
  KdForest::Scratch scratch;
  std::vector<QuantizedEvent> qe;
  std::vector<uint64_t> times;
  qe.reserve(filtered.events.size());
  for (const Event& e : filtered.events) {
    engine.push(e);
    const DartDescriptor d = engine.extract(e);
    uint32_t word;
    if (forest)
      word = forest->query(codebook, d.values.data(), scratch, params.checks);
    else
      word = quantize(d.values, codebook);
    qe.push_back({e.x, e.y, word});
    times.push_back(e.t);
  }

  const uint64_t t_last = times.back();
  size_t cursor = 0;
  std::vector<QuantizedEvent> prefix;
  for (uint64_t tick = interval_us;; tick += interval_us) {
    while (cursor < qe.size() && times[cursor] < tick) prefix.push_back(qe[cursor++]);
    if (!prefix.empty()) {
      const std::vector<double> psi = representation_from_quantized(
          prefix, stream.width, stream.height, codebook.k, params.kernel);
      out.push_back({tick, multiclass_predict(mc, psi)});
    }
    if (tick > t_last) break;
  }
  return out;
}

}  // namespace dart
