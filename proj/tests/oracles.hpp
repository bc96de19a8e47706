// Independent reference implementations used to cross-check the library.
// Everything here favors directness over speed: full-history scans, generic
// linear solves, exhaustive searches, brute-force tallies. Nothing in this
// header shares code with the library paths it checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dart/descriptor.hpp"
#include "dart/encoding.hpp"
#include "dart/events.hpp"

namespace oracle {

constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Filters: O(n^2) literal re-statement of the pass rules.
// ---------------------------------------------------------------------------

// An event passes iff every previously *passed* event at its pixel is more
// than theta_ref microseconds older.
inline std::vector<dart::Event> refractory_oracle(const std::vector<dart::Event>& events,
                                                  uint64_t theta_ref) {
  std::vector<dart::Event> kept;
  for (const dart::Event& e : events) {
    bool pass = true;
    for (const dart::Event& k : kept) {
      if (k.x == e.x && k.y == e.y && e.t - k.t <= theta_ref) {
        pass = false;
        break;
      }
    }
    if (pass) kept.push_back(e);
  }
  return kept;
}

// An event passes iff some earlier *presented* event sits on one of the eight
// neighbor pixels strictly less than theta_noise microseconds before it.
inline std::vector<dart::Event> noise_oracle(const std::vector<dart::Event>& events,
                                             uint64_t theta_noise) {
  std::vector<dart::Event> kept;
  for (size_t i = 0; i < events.size(); ++i) {
    const dart::Event& e = events[i];
    bool pass = false;
    for (size_t j = 0; j < i && !pass; ++j) {
      const dart::Event& n = events[j];
      const int ddx = std::abs(int(n.x) - int(e.x));
      const int ddy = std::abs(int(n.y) - int(e.y));
      if (ddx <= 1 && ddy <= 1 && !(ddx == 0 && ddy == 0) && e.t - n.t < theta_noise)
        pass = true;
    }
    if (pass) kept.push_back(e);
  }
  return kept;
}

inline std::vector<dart::Event> cascade_oracle(const std::vector<dart::Event>& events,
                                               uint64_t theta_noise, uint64_t theta_ref) {
  return noise_oracle(refractory_oracle(events, theta_ref), theta_noise);
}

// ---------------------------------------------------------------------------
// Log-polar binning: generic 4x4 solve, no lookup table, no count matrix.
// ---------------------------------------------------------------------------

// Gaussian elimination with partial pivoting; returns false when singular.
inline bool solve_linear4(double a[4][4], double b[4], double x[4]) {
  int perm[4] = {0, 1, 2, 3};
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::fabs(a[perm[r]][col]) > std::fabs(a[perm[piv]][col])) piv = r;
    std::swap(perm[col], perm[piv]);
    const double d = a[perm[col]][col];
    if (std::fabs(d) < 1e-12) return false;
    for (int r = col + 1; r < 4; ++r) {
      const double f = a[perm[r]][col] / d;
      for (int c = col; c < 4; ++c) a[perm[r]][c] -= f * a[perm[col]][c];
      b[perm[r]] -= f * b[perm[col]];
    }
  }
  for (int col = 3; col >= 0; --col) {
    double s = b[perm[col]];
    for (int c = col + 1; c < 4; ++c) s -= a[perm[col]][c] * x[c];
    x[col] = s / a[perm[col]][col];
  }
  return true;
}

// Midpoint radii recomputed from the ring radii (rho_0 = 0 implicit).
inline std::vector<double> midpoint_radii(const dart::LogPolarGrid& g) {
  std::vector<double> m(g.ring_radii.size());
  double prev = 0.0;
  for (size_t q = 0; q < g.ring_radii.size(); ++q) {
    m[q] = 0.5 * (prev + g.ring_radii[q]);
    prev = g.ring_radii[q];
  }
  return m;
}

// Interpolation weights rebuilt from first principles: locate the enclosing
// midpoint rectangle in (r, theta), then make the weights reproduce
// {1, r, theta, r*theta} exactly via a generic linear solve. Points radially
// outside the midpoint span take the planar-nearest bin with weight 1.
inline std::vector<std::pair<int, double>> interp_oracle(double r, double theta,
                                                         const dart::LogPolarGrid& g) {
  const std::vector<double> rm = midpoint_radii(g);
  const double step = 2.0 * kPi / g.n_w;

  if (r < rm.front() || r > rm.back()) {
    int best = -1;
    double best_d = 0.0;
    const double ex = r * std::cos(theta), ey = r * std::sin(theta);
    for (int q = 1; q <= g.n_r; ++q) {
      for (int p = 1; p <= g.n_w; ++p) {
        const double mt = (p - 0.5) * step;
        const double mx = rm[q - 1] * std::cos(mt), my = rm[q - 1] * std::sin(mt);
        const double d = std::hypot(ex - mx, ey - my);
        const int bin = (q - 1) * g.n_w + (p - 1);
        if (best < 0 || d < best_d - 1e-15 ||
            (std::fabs(d - best_d) <= 1e-15 && bin < best)) {
          best = bin;
          best_d = d;
        }
      }
    }
    return {{best, 1.0}};
  }

  int q = 1;  // rings q, q+1 enclose r (1-based)
  while (q < g.n_r - 1 && r > rm[q]) ++q;

  // Enclosing wedges on the circle, angles unwrapped across the seam.
  int p_lo = 0;
  for (int p = 1; p <= g.n_w; ++p)
    if (theta >= (p - 0.5) * step) p_lo = p;
  double t_query = theta;
  if (p_lo == 0) {  // below the first midpoint: wraps to the last wedge
    p_lo = g.n_w;
    t_query += 2.0 * kPi;
  }
  const int p_hi = p_lo % g.n_w + 1;
  const double t_lo = (p_lo - 0.5) * step;
  const double t_hi = t_lo + step;
  if (t_query > t_hi) t_query = t_hi;  // numeric guard at the seam

  const double rs[4] = {rm[q - 1], rm[q], rm[q - 1], rm[q]};
  const double ts[4] = {t_lo, t_lo, t_hi, t_hi};
  const int bins[4] = {(q - 1) * g.n_w + (p_lo - 1), q * g.n_w + (p_lo - 1),
                       (q - 1) * g.n_w + (p_hi - 1), q * g.n_w + (p_hi - 1)};
  double a[4][4], b[4] = {1.0, r, t_query, r * t_query}, w[4];
  for (int i = 0; i < 4; ++i) {
    a[0][i] = 1.0;
    a[1][i] = rs[i];
    a[2][i] = ts[i];
    a[3][i] = rs[i] * ts[i];
  }
  if (!solve_linear4(a, b, w)) return {{bins[0], 1.0}};
  std::vector<std::pair<int, double>> out;
  for (int i = 0; i < 4; ++i) out.emplace_back(bins[i], std::max(0.0, w[i]));
  return out;
}

// Polar angle in [0, 2pi).
inline double angle_of(double dx, double dy) {
  double t = std::atan2(dy, dx);
  if (t < 0.0) t += 2.0 * kPi;
  if (t >= 2.0 * kPi) t = 0.0;
  return t;
}

// Descriptor of an event at (cx, cy) over an explicit occupant list: loop the
// occupants, bin each offset through interp_oracle, normalize. No lookup
// table, no count matrix.
inline std::vector<double> descriptor_oracle(
    const std::vector<std::pair<int, int>>& occupants, int cx, int cy,
    const dart::LogPolarGrid& g) {
  std::vector<double> acc(static_cast<size_t>(g.n_r) * g.n_w, 0.0);
  double total = 0.0;
  for (const auto& [ox, oy] : occupants) {
    const double dx = ox - cx, dy = oy - cy;
    if (dx == 0.0 && dy == 0.0) continue;
    const double r = std::hypot(dx, dy);
    if (r > g.r_max) continue;
    for (const auto& [bin, w] : interp_oracle(r, angle_of(dx, dy), g)) {
      acc[static_cast<size_t>(bin)] += w;
      total += w;
    }
  }
  if (total > 0.0)
    for (double& v : acc) v /= total;
  return acc;
}

// Same loop for real-valued offsets fed straight to the binning rule
// (sub-pixel scale experiments).
inline std::vector<double> descriptor_oracle_real(
    const std::vector<std::pair<double, double>>& offsets, const dart::LogPolarGrid& g) {
  std::vector<double> acc(static_cast<size_t>(g.n_r) * g.n_w, 0.0);
  double total = 0.0;
  for (const auto& [dx, dy] : offsets) {
    if (dx == 0.0 && dy == 0.0) continue;
    const double r = std::hypot(dx, dy);
    if (r > g.r_max) continue;
    for (const auto& [bin, w] : interp_oracle(r, angle_of(dx, dy), g)) {
      acc[static_cast<size_t>(bin)] += w;
      total += w;
    }
  }
  if (total > 0.0)
    for (double& v : acc) v /= total;
  return acc;
}

// ---------------------------------------------------------------------------
// Nearest neighbors, kernels, pooling.
// ---------------------------------------------------------------------------

// Exhaustive nearest centroid; lowest index on ties.
inline uint32_t nn_oracle(const dart::Codebook& cb, const double* x) {
  uint32_t best = 0;
  double best_d = 0.0;
  for (size_t i = 0; i < cb.k; ++i) {
    const double* c = cb.row(i);
    double d = 0.0;
    for (size_t j = 0; j < cb.dim; ++j) d += (x[j] - c[j]) * (x[j] - c[j]);
    if (i == 0 || d < best_d) {
      best = static_cast<uint32_t>(i);
      best_d = d;
    }
  }
  return best;
}

// Exhaustive first and second nearest (squared distances).
inline void nn2_oracle(const dart::Codebook& cb, const double* x, double& d1,
                       uint32_t& i1, double& d2, uint32_t& i2) {
  d1 = d2 = 0.0;
  i1 = i2 = 0;
  bool h1 = false, h2 = false;
  for (size_t i = 0; i < cb.k; ++i) {
    const double* c = cb.row(i);
    double d = 0.0;
    for (size_t j = 0; j < cb.dim; ++j) d += (x[j] - c[j]) * (x[j] - c[j]);
    if (!h1 || d < d1) {
      if (h1) {
        d2 = d1;
        i2 = i1;
        h2 = true;
      }
      d1 = d;
      i1 = static_cast<uint32_t>(i);
      h1 = true;
    } else if (!h2 || d < d2) {
      d2 = d;
      i2 = static_cast<uint32_t>(i);
      h2 = true;
    }
  }
}

// Additive chi-square kernel, summed directly.
inline double chi2_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i)
    if (x[i] + y[i] > 0.0) s += 2.0 * x[i] * y[i] / (x[i] + y[i]);
  return s;
}

inline double dot_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Direct frequency tally.
inline std::vector<double> bow_oracle(const std::vector<uint32_t>& indices, size_t K) {
  std::vector<double> h(K, 0.0);
  for (uint32_t i : indices) h[i] += 1.0;
  if (!indices.empty())
    for (double& v : h) v /= static_cast<double>(indices.size());
  return h;
}

// Brute-force spatial pyramid: tally each cell of the 1/2/3 grids, normalize
// each cell, divide by the number of non-empty cells.
inline std::vector<double> spm_oracle(const std::vector<dart::QuantizedEvent>& events,
                                      int width, int height, size_t K) {
  std::vector<double> out(14 * K, 0.0);
  int cell_base = 0;
  int nonzero = 0;
  for (int g = 1; g <= 3; ++g) {
    for (int cy = 0; cy < g; ++cy) {
      for (int cx = 0; cx < g; ++cx) {
        const size_t cell = static_cast<size_t>(cell_base + cy * g + cx);
        double s = 0.0;
        for (const dart::QuantizedEvent& e : events) {
          if (static_cast<int>(e.x) * g / width == cx &&
              static_cast<int>(e.y) * g / height == cy) {
            out[cell * K + e.word] += 1.0;
            s += 1.0;
          }
        }
        if (s > 0.0) {
          for (size_t j = 0; j < K; ++j) out[cell * K + j] /= s;
          ++nonzero;
        }
      }
    }
    cell_base += g * g;
  }
  if (nonzero > 0)
    for (double& v : out) v /= static_cast<double>(nonzero);
  return out;
}

// ---------------------------------------------------------------------------
// Binary-image components: exhaustive flood fill.
// ---------------------------------------------------------------------------

struct Component {
  std::vector<std::pair<int, int>> pixels;  // (x, y)
  size_t first_row_major = 0;               // y * width + x of the seed pixel
  dart::BoundingBox box;
};

inline std::vector<Component> components_oracle(const std::vector<uint8_t>& mb,
                                                int width, int height) {
  std::vector<Component> comps;
  std::vector<uint8_t> seen(mb.size(), 0);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const size_t idx = static_cast<size_t>(y) * width + x;
      if (!mb[idx] || seen[idx]) continue;
      Component c;
      c.first_row_major = idx;
      c.box = {x, y, x, y};
      std::vector<std::pair<int, int>> stack{{x, y}};
      seen[idx] = 1;
      while (!stack.empty()) {
        auto [px, py] = stack.back();
        stack.pop_back();
        c.pixels.emplace_back(px, py);
        c.box.x_min = std::min(c.box.x_min, px);
        c.box.x_max = std::max(c.box.x_max, px);
        c.box.y_min = std::min(c.box.y_min, py);
        c.box.y_max = std::max(c.box.y_max, py);
        constexpr int kDx[4] = {1, -1, 0, 0};
        constexpr int kDy[4] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
          const int nx = px + kDx[d], ny = py + kDy[d];
          if (nx < 0 || nx >= width || ny < 0 || ny >= height) continue;
          const size_t nidx = static_cast<size_t>(ny) * width + nx;
          if (mb[nidx] && !seen[nidx]) {
            seen[nidx] = 1;
            stack.emplace_back(nx, ny);
          }
        }
      }
      comps.push_back(std::move(c));
    }
  }
  return comps;
}

// Largest component's box; ties go to the earliest row-major seed.
inline std::optional<dart::BoundingBox> largest_component_oracle(
    const std::vector<uint8_t>& mb, int width, int height) {
  const std::vector<Component> comps = components_oracle(mb, width, height);
  if (comps.empty()) return std::nullopt;
  const Component* best = &comps[0];
  for (const Component& c : comps)
    if (c.pixels.size() > best->pixels.size()) best = &c;
  return best->box;
}

// ---------------------------------------------------------------------------
// Metrics: brute-force tallies.
// ---------------------------------------------------------------------------

struct IntervalTally {
  uint64_t tp = 0, fp = 0, fn = 0;
  double iou = 0.0;
  bool success = false;
  double err_px = 0.0, err_norm = 0.0;
};

inline bool in_box(const dart::BoundingBox& b, const dart::Event& e) {
  return e.x >= b.x_min && e.x <= b.x_max && e.y >= b.y_min && e.y <= b.y_max;
}

inline IntervalTally interval_oracle(const std::optional<dart::BoundingBox>& pred,
                                     const std::optional<dart::BoundingBox>& gt,
                                     const std::vector<dart::Event>& events,
                                     double threshold) {
  IntervalTally t;
  for (const dart::Event& e : events) {
    const bool p = pred && in_box(*pred, e);
    const bool g = gt && in_box(*gt, e);
    if (p && g)
      ++t.tp;
    else if (p)
      ++t.fp;
    else if (g)
      ++t.fn;
  }
  const uint64_t denom = t.tp + t.fp + t.fn;
  t.iou = denom ? static_cast<double>(t.tp) / static_cast<double>(denom) : 0.0;
  t.success = gt.has_value() && t.iou >= threshold;
  if (pred && gt) {
    const double dx = pred->center_x() - gt->center_x();
    const double dy = pred->center_y() - gt->center_y();
    t.err_px = std::sqrt(dx * dx + dy * dy);
    t.err_norm = t.err_px / gt->diagonal();
  }
  return t;
}

// Fraction of gt-present intervals at or above the threshold.
inline double os_oracle(const std::vector<std::pair<bool, double>>& gt_iou,
                        double threshold) {
  uint64_t n = 0, hit = 0;
  for (const auto& [has_gt, iou] : gt_iou) {
    if (!has_gt) continue;
    ++n;
    if (iou >= threshold) ++hit;
  }
  return n ? static_cast<double>(hit) / static_cast<double>(n) : 0.0;
}

// Tally-based accuracy figures.
inline std::pair<double, double> accuracy_oracle(const std::vector<int>& actual,
                                                 const std::vector<int>& predicted) {
  uint64_t right = 0;
  for (size_t i = 0; i < actual.size(); ++i)
    if (actual[i] == predicted[i]) ++right;
  const double overall = static_cast<double>(right) / static_cast<double>(actual.size());
  std::vector<int> labels = actual;
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  double sum = 0.0;
  for (int lab : labels) {
    uint64_t n = 0, hit = 0;
    for (size_t i = 0; i < actual.size(); ++i) {
      if (actual[i] != lab) continue;
      ++n;
      if (predicted[i] == lab) ++hit;
    }
    sum += static_cast<double>(hit) / static_cast<double>(n);
  }
  return {overall, sum / static_cast<double>(labels.size())};
}

}  // namespace oracle
