#include "dart/filtering.hpp"

namespace dart {

bool RefractoryFilter::pass(const Event& e) {
  if (any_presented_ && e.t < last_presented_)
    throw OrderViolation("refractory filter: events out of timestamp order");
  any_presented_ = true;
  last_presented_ = e.t;

  const uint64_t prev = clock_.get(e.x, e.y);
  const bool keep = PixelClock::never(prev) || (e.t - prev) > theta_ref_;
  if (keep) clock_.set(e.x, e.y, e.t);
  return keep;
}

bool NoiseFilter::pass(const Event& e) {
  if (any_presented_ && e.t < last_presented_)
    throw OrderViolation("noise filter: events out of timestamp order");
  any_presented_ = true;
  last_presented_ = e.t;

  bool keep = false;
  for (int dy = -1; dy <= 1 && !keep; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      if (dx == 0 && dy == 0) continue;  // center pixel never supports itself
      const int nx = static_cast<int>(e.x) + dx;
      const int ny = static_cast<int>(e.y) + dy;
      if (nx < 0 || ny < 0 || nx >= width_ || ny >= height_) continue;
      const uint64_t tn = clock_.get(static_cast<uint16_t>(nx), static_cast<uint16_t>(ny));
      if (!PixelClock::never(tn) && (e.t - tn) < theta_noise_) {
        keep = true;
        break;
      }
    }
  }
  clock_.set(e.x, e.y, e.t);  // recorded regardless of the verdict
  return keep;
}

EventStream cascade(const EventStream& stream, uint64_t theta_noise_us, uint64_t theta_ref_us) {
  RefractoryFilter ref(stream.width, stream.height, theta_ref_us);
  NoiseFilter noise(stream.width, stream.height, theta_noise_us);
  EventStream out;
  out.width = stream.width;
  out.height = stream.height;
  out.source = stream.source;
  for (const Event& e : stream.events) {
    if (!ref.pass(e)) continue;  // the noise stage sees refractory survivors only
    if (noise.pass(e)) out.events.push_back(e);
  }
  return out;
}

}  // namespace dart
