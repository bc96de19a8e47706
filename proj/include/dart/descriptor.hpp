#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dart/events.hpp"

namespace dart {

/// Log-polar grid geometry parameters (defaults: 7x12 grid, radii 2..10 px).
struct GridParams {
  int n_r = 7;
  int n_w = 12;
  double r_min = 2.0;
  double r_max = 10.0;
};

/// Up to four (bin, weight) pairs for one integer pixel offset.
struct LutCell {
  uint8_t n = 0;
  uint16_t bin[4] = {0, 0, 0, 0};
  double w[4] = {0.0, 0.0, 0.0, 0.0};
};

/// Precomputed log-polar binning lattice: geometrically spaced ring radii,
/// uniform angular wedges, bin midpoints, and a per-integer-offset
/// interpolation lookup table. Immutable after build; shareable.
struct LogPolarGrid {
  int n_r = 0;
  int n_w = 0;
  double r_min = 0.0;
  double r_max = 0.0;
  double theta_step = 0.0;
  std::vector<double> ring_radii;  ///< rho_1..rho_{n_r}; rho_0 = 0 implicit
  std::vector<double> ring_mid;    ///< rho^m_q = (rho_{q-1}+rho_q)/2, index q-1

  int window = 0;                  ///< LUT half-width = floor(r_max)
  std::vector<LutCell> lut;        ///< (2*window+1)^2, row-major by dy

  int bins() const { return n_r * n_w; }
  /// Flattened bin index for ring q (1-based) and wedge p (1-based).
  int bin_index(int q, int p) const { return (q - 1) * n_w + (p - 1); }
  const LutCell& lut_at(int dx, int dy) const {
    return lut[static_cast<size_t>(dy + window) * (2 * window + 1) + (dx + window)];
  }
};

/// Build the grid. Requires n_r >= 2, n_w >= 4, 0 < r_min < r_max
/// (ConfigError otherwise). Ring radii are geometric from r_min to r_max.
LogPolarGrid build_grid(int n_r, int n_w, double r_min, double r_max);

inline LogPolarGrid build_grid(const GridParams& p) {
  return build_grid(p.n_r, p.n_w, p.r_min, p.r_max);
}

/// (r, theta) with theta in [0, 2pi), quadrant-aware.
/// Throws CenterEvent for the zero offset (callers skip it).
std::pair<double, double> cart_to_polar(double dx, double dy);

/// Bilinear interpolation weights for a polar point. Generic case: the four
/// surrounding bin midpoints with weights from the 4x4 linear system; wedge
/// adjacency wraps modulo n_w. Points radially outside the midpoint span
/// collapse to the single nearest bin (planar distance, lowest index on ties)
/// with weight 1. Requires 0 < r <= r_max (OutOfRange above, CenterEvent at 0).
std::vector<std::pair<int, double>> interp_weights(double r, double theta,
                                                   const LogPolarGrid& grid);

/// L1-normalized n_r x n_w histogram attached to an event, flattened
/// row-major ring-major. All-zero when no past event was in range.
struct DartDescriptor {
  int n_r = 0;
  int n_w = 0;
  Event center;
  std::vector<double> values;

  double l1_norm() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
};

/// Rotate each ring's wedge vector by f positions (mass at wedge p moves to
/// wedge (p+f) mod n_w). f is reduced modulo n_w; negative f is a ConfigError.
DartDescriptor circular_shift(const DartDescriptor& d, long f);

/// FIFO depth giving each descriptor a few thousand recent events of context.
inline constexpr size_t kDefaultFifoCapacity = 3000;

/// FIFO event memory plus per-pixel count matrix feeding descriptor
/// extraction. Strictly sequential per stream.
class DartEngine {
 public:
  DartEngine(const LogPolarGrid& grid, uint16_t width, uint16_t height,
             size_t capacity = kDefaultFifoCapacity);

  /// Push one event: evict the oldest when full, then record (x, y).
  void push(const Event& e);

  /// Descriptor of e from every FIFO occupant within grid range of (x_e, y_e),
  /// center offset excluded; weights scaled by pixel counts, L1-normalized.
  /// The engine must already contain e (its own pixel contributes nothing).
  DartDescriptor extract(const Event& e) const;

  void reset();

  size_t fifo_size() const { return size_; }
  size_t capacity() const { return capacity_; }
  uint32_t count_at(uint16_t x, uint16_t y) const {
    return count_[static_cast<size_t>(y) * width_ + x];
  }
  const LogPolarGrid& grid() const { return *grid_; }
  uint16_t width() const { return width_; }
  uint16_t height() const { return height_; }

 private:
  const LogPolarGrid* grid_;
  uint16_t width_, height_;
  size_t capacity_;
  std::vector<uint32_t> packed_;  // ring buffer of y*width + x
  size_t head_ = 0;               // index of oldest element
  size_t size_ = 0;
  std::vector<uint32_t> count_;
};

// ---------------------------------------------------------------------------
// Descriptor dump: binary header (magic "DRTD", u32 n_r, u32 n_w, u64 count)
// followed by count rows of n_r*n_w little-endian float32 values.
// ---------------------------------------------------------------------------

std::vector<uint8_t> serialize_descriptors(const std::vector<DartDescriptor>& ds);
std::vector<DartDescriptor> parse_descriptors(const std::vector<uint8_t>& bytes);

/// Debug CSV: t,x,y,p followed by the descriptor values.
std::string descriptors_to_csv(const std::vector<DartDescriptor>& ds);

}  // namespace dart
