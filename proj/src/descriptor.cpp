#include "dart/descriptor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "dart/binio.hpp"

namespace dart {

namespace {

constexpr double kTwoPi = 6.28318530717958647692528676655900577;

/// Solve a 4x4 linear system by Gaussian elimination with partial pivoting.
/// Returns false when a pivot degenerates.
bool solve4(double a[4][4], double b[4], double out[4]) {
  int perm[4] = {0, 1, 2, 3};
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::fabs(a[perm[r]][col]) > std::fabs(a[perm[pivot]][col])) pivot = r;
    std::swap(perm[col], perm[pivot]);
    const double p = a[perm[col]][col];
    if (std::fabs(p) < 1e-12) return false;
    for (int r = col + 1; r < 4; ++r) {
      const double f = a[perm[r]][col] / p;
      a[perm[r]][col] = 0.0;
      for (int c = col + 1; c < 4; ++c) a[perm[r]][c] -= f * a[perm[col]][c];
      b[perm[r]] -= f * b[perm[col]];
    }
  }
  for (int row = 3; row >= 0; --row) {
    double v = b[perm[row]];
    for (int c = row + 1; c < 4; ++c) v -= a[perm[row]][c] * out[c];
    out[row] = v / a[perm[row]][row];
  }
  return true;
}

/// Single nearest bin by planar distance to the midpoints, lowest index wins.
std::pair<int, double> nearest_bin(double r, double theta, const LogPolarGrid& g) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int q = 1; q <= g.n_r; ++q) {
    const double rho = g.ring_mid[q - 1];
    for (int p = 1; p <= g.n_w; ++p) {
      const double dt = theta - (p - 0.5) * g.theta_step;
      const double d = r * r + rho * rho - 2.0 * r * rho * std::cos(dt);
      const int idx = g.bin_index(q, p);
      if (d < best_d - 1e-15 || (std::fabs(d - best_d) <= 1e-15 && idx < best)) {
        best_d = d;
        best = idx;
      }
    }
  }
  return {best, 1.0};
}

}  // namespace

LogPolarGrid build_grid(int n_r, int n_w, double r_min, double r_max) {
  if (n_r < 2) throw ConfigError("build_grid: n_r must be >= 2");
  if (n_w < 4) throw ConfigError("build_grid: n_w must be >= 4");
  if (!(r_min > 0.0) || !(r_min < r_max))
    throw ConfigError("build_grid: need 0 < r_min < r_max");

  LogPolarGrid g;
  g.n_r = n_r;
  g.n_w = n_w;
  g.r_min = r_min;
  g.r_max = r_max;
  g.theta_step = kTwoPi / n_w;

  // Geometric radii with rho_1 = r_min and rho_{n_r} = r_max.
  g.ring_radii.resize(n_r);
  for (int q = 1; q <= n_r; ++q)
    g.ring_radii[q - 1] =
        r_min * std::pow(r_max / r_min, static_cast<double>(q - 1) / (n_r - 1));
  g.ring_radii[0] = r_min;
  g.ring_radii[n_r - 1] = r_max;

  // Midpoints between consecutive radii, with the implicit rho_0 = 0.
  g.ring_mid.resize(n_r);
  double prev = 0.0;
  for (int q = 1; q <= n_r; ++q) {
    g.ring_mid[q - 1] = 0.5 * (prev + g.ring_radii[q - 1]);
    prev = g.ring_radii[q - 1];
  }

  g.window = static_cast<int>(std::floor(r_max));
  const int side = 2 * g.window + 1;
  g.lut.assign(static_cast<size_t>(side) * side, LutCell{});
  for (int dy = -g.window; dy <= g.window; ++dy) {
    for (int dx = -g.window; dx <= g.window; ++dx) {
      if (dx == 0 && dy == 0) continue;
      const double r = std::hypot(static_cast<double>(dx), static_cast<double>(dy));
      if (r > r_max) continue;
      const auto [rr, theta] = cart_to_polar(dx, dy);
      LutCell& cell =
          g.lut[static_cast<size_t>(dy + g.window) * side + (dx + g.window)];
      for (const auto& [bin, w] : interp_weights(rr, theta, g)) {
        cell.bin[cell.n] = static_cast<uint16_t>(bin);
        cell.w[cell.n] = w;
        ++cell.n;
      }
    }
  }
  return g;
}

std::pair<double, double> cart_to_polar(double dx, double dy) {
  if (dx == 0.0 && dy == 0.0)
    throw CenterEvent("cart_to_polar: zero offset has no angle");
  const double r = std::hypot(dx, dy);
  double theta = std::atan2(dy, dx);
  if (theta < 0.0) theta += kTwoPi;
  if (theta >= kTwoPi) theta = 0.0;
  return {r, theta};
}

std::vector<std::pair<int, double>> interp_weights(double r, double theta,
                                                   const LogPolarGrid& g) {
  if (!(r > 0.0)) throw CenterEvent("interp_weights: r must be positive");
  if (r > g.r_max) throw OutOfRange("interp_weights: r exceeds r_max");

  // Radial boundary: outside the midpoint span there is no enclosing cell.
  if (r < g.ring_mid.front() || r > g.ring_mid.back())
    return {nearest_bin(r, theta, g)};

  // Enclosing ring pair: rho^m_q <= r <= rho^m_{q+1}.
  int q = 1;
  while (q < g.n_r - 1 && r > g.ring_mid[q]) ++q;
  const double r_lo = g.ring_mid[q - 1];
  const double r_hi = g.ring_mid[q];

  // Enclosing wedge pair on the circle; node angles kept unwrapped so the
  // strip is monotone in theta.
  int s = static_cast<int>(std::floor(theta / g.theta_step - 0.5));
  if (s < -1) s = -1;
  if (s > g.n_w - 1) s = g.n_w - 1;
  const double t_lo = (s + 0.5) * g.theta_step;
  const double t_hi = t_lo + g.theta_step;
  const int p_lo = (s + g.n_w) % g.n_w + 1;        // 1-based wedge of t_lo
  const int p_hi = (s + 1) % g.n_w + 1;            // 1-based wedge of t_hi
  double tq = theta;
  if (tq < t_lo) tq += kTwoPi;                     // only near the wrap seam
  if (tq > t_hi) tq = t_hi;                        // numeric guard

  const double rs[4] = {r_lo, r_hi, r_lo, r_hi};
  const double ts[4] = {t_lo, t_lo, t_hi, t_hi};
  const int bins[4] = {g.bin_index(q, p_lo), g.bin_index(q + 1, p_lo),
                       g.bin_index(q, p_hi), g.bin_index(q + 1, p_hi)};

  double a[4][4], b[4] = {1.0, r, tq, r * tq}, w[4];
  for (int i = 0; i < 4; ++i) {
    a[0][i] = 1.0;
    a[1][i] = rs[i];
    a[2][i] = ts[i];
    a[3][i] = rs[i] * ts[i];
  }
  if (!solve4(a, b, w)) return {nearest_bin(r, theta, g)};

  std::vector<std::pair<int, double>> out;
  out.reserve(4);
  for (int i = 0; i < 4; ++i) out.emplace_back(bins[i], std::max(0.0, w[i]));
  return out;
}

DartDescriptor circular_shift(const DartDescriptor& d, long f) {
  if (f < 0) throw ConfigError("circular_shift: negative shift");
  const int n_w = d.n_w;
  const long shift = n_w > 0 ? f % n_w : 0;
  DartDescriptor out = d;
  for (int q = 0; q < d.n_r; ++q) {
    for (int p = 0; p < n_w; ++p) {
      out.values[static_cast<size_t>(q) * n_w + (p + shift) % n_w] =
          d.values[static_cast<size_t>(q) * n_w + p];
    }
  }
  return out;
}

DartEngine::DartEngine(const LogPolarGrid& grid, uint16_t width, uint16_t height,
                       size_t capacity)
    : grid_(&grid),
      width_(width),
      height_(height),
      capacity_(capacity),
      packed_(capacity),
      count_(static_cast<size_t>(width) * height, 0) {
  if (capacity == 0) throw ConfigError("DartEngine: capacity must be positive");
}

void DartEngine::push(const Event& e) {
  if (e.x >= width_ || e.y >= height_)
    throw OutOfBounds("DartEngine::push: event outside sensor");
  const uint32_t packed = static_cast<uint32_t>(e.y) * width_ + e.x;
  if (size_ == capacity_) {
    --count_[packed_[head_]];
    packed_[head_] = packed;
    head_ = (head_ + 1) % capacity_;
  } else {
    packed_[(head_ + size_) % capacity_] = packed;
    ++size_;
  }
  ++count_[packed];
}

DartDescriptor DartEngine::extract(const Event& e) const {
  const LogPolarGrid& g = *grid_;
  DartDescriptor d;
  d.n_r = g.n_r;
  d.n_w = g.n_w;
  d.center = e;
  d.values.assign(static_cast<size_t>(g.bins()), 0.0);

  const int side = 2 * g.window + 1;
  const int cx = e.x, cy = e.y;
  for (int dy = -g.window; dy <= g.window; ++dy) {
    const int yy = cy + dy;
    if (yy < 0 || yy >= height_) continue;
    const uint32_t* crow = count_.data() + static_cast<size_t>(yy) * width_;
    const LutCell* lrow =
        g.lut.data() + static_cast<size_t>(dy + g.window) * side + g.window;
    const int dx0 = std::max(-g.window, -cx);
    const int dx1 = std::min(g.window, width_ - 1 - cx);
    for (int dx = dx0; dx <= dx1; ++dx) {
      const uint32_t cnt = crow[cx + dx];
      if (cnt == 0) continue;
      const LutCell& cell = lrow[dx];
      const double scale = static_cast<double>(cnt);
      for (uint8_t k = 0; k < cell.n; ++k) d.values[cell.bin[k]] += scale * cell.w[k];
    }
  }

  double total = 0.0;
  for (double v : d.values) total += v;
  if (total > 0.0)
    for (double& v : d.values) v /= total;
  return d;
}

void DartEngine::reset() {
  head_ = 0;
  size_ = 0;
  std::fill(count_.begin(), count_.end(), 0);
}

std::vector<uint8_t> serialize_descriptors(const std::vector<DartDescriptor>& ds) {
  std::vector<uint8_t> out = {'D', 'R', 'T', 'D'};
  const uint32_t n_r = ds.empty() ? 0 : static_cast<uint32_t>(ds.front().n_r);
  const uint32_t n_w = ds.empty() ? 0 : static_cast<uint32_t>(ds.front().n_w);
  le_put_u32(out, n_r);
  le_put_u32(out, n_w);
  le_put_u64(out, ds.size());
  for (const DartDescriptor& d : ds) {
    if (d.values.size() != static_cast<size_t>(n_r) * n_w)
      throw ShapeError("serialize_descriptors: inconsistent descriptor shape");
    for (double v : d.values) le_put_f32(out, static_cast<float>(v));
  }
  return out;
}

std::vector<DartDescriptor> parse_descriptors(const std::vector<uint8_t>& bytes) {
  ByteReader r(bytes, "descriptor dump");
  r.expect_magic("DRTD");
  const uint32_t n_r = r.u32();
  const uint32_t n_w = r.u32();
  const uint64_t count = r.u64();
  const size_t dim = static_cast<size_t>(n_r) * n_w;
  std::vector<DartDescriptor> ds(count);
  for (uint64_t i = 0; i < count; ++i) {
    ds[i].n_r = static_cast<int>(n_r);
    ds[i].n_w = static_cast<int>(n_w);
    ds[i].values.resize(dim);
    for (size_t j = 0; j < dim; ++j) ds[i].values[j] = static_cast<double>(r.f32());
  }
  r.done();
  return ds;
}

std::string descriptors_to_csv(const std::vector<DartDescriptor>& ds) {
  std::string out = "t_us,x,y,p";
  if (!ds.empty())
    for (size_t j = 0; j < ds.front().values.size(); ++j)
      out += ",v" + std::to_string(j);
  out += "\n";
  char buf[64];
  for (const DartDescriptor& d : ds) {
    std::snprintf(buf, sizeof(buf), "%llu,%u,%u,%u",
                  static_cast<unsigned long long>(d.center.t), d.center.x, d.center.y,
                  d.center.p);
    out += buf;
    for (double v : d.values) {
      std::snprintf(buf, sizeof(buf), ",%.9g", v);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace dart
