#include "dart/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dart/binio.hpp"
#include "dart/rng.hpp"

namespace dart {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

double sq_dist(const double* a, const double* b, size_t d) {
  double s = 0.0;
  for (size_t i = 0; i < d; ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

// Squared distance with blocked early abandoning against `bound`. Partial
// sums accumulate in the same order as sq_dist, so results match bit-exactly.
double sq_dist_bounded(const double* a, const double* b, size_t d, double bound) {
  double s = 0.0;
  size_t i = 0;
  for (; i + 8 <= d; i += 8) {
    for (size_t j = i; j < i + 8; ++j) {
      const double diff = a[j] - b[j];
      s += diff * diff;
    }
    if (s > bound) return s;
  }
  for (; i < d; ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

}  // namespace

KmeansResult kmeans_train(const DataMatrix& X, size_t K, int max_iters, uint64_t seed,
                          const KmeansObserver& observer) {
  if (K < 2) throw ConfigError("kmeans: K must be >= 2");
  if (X.rows < K) throw ConfigError("kmeans: fewer samples than clusters");
  if (max_iters < 1) throw ConfigError("kmeans: max_iters must be >= 1");
  const size_t n = X.rows, d = X.dim;
  Rng rng(seed);

  // k-means++ seeding: first centroid uniform, the rest proportional to the
  // squared distance to the nearest centroid chosen so far.
  Codebook cb;
  cb.k = K;
  cb.dim = d;
  cb.data.resize(K * d);
  std::vector<double> d2(n);
  std::vector<char> chosen(n, 0);
  const size_t first = static_cast<size_t>(rng.below(n));
  chosen[first] = 1;
  std::copy_n(X.row(first), d, cb.data.begin());
  for (size_t i = 0; i < n; ++i) d2[i] = sq_dist(X.row(i), X.row(first), d);

  for (size_t k = 1; k < K; ++k) {
    double total = 0.0;
    for (size_t i = 0; i < n; ++i)
      if (!chosen[i]) total += d2[i];
    size_t pick = n;
    if (total > 0.0) {
      const double r = rng.uniform() * total;
      double cum = 0.0;
      for (size_t i = 0; i < n; ++i) {
        if (chosen[i]) continue;
        cum += d2[i];
        if (cum > r) {
          pick = i;
          break;
        }
      }
    }
    if (pick == n) {  // all remaining mass is zero (duplicate points)
      for (size_t i = 0; i < n; ++i) {
        if (!chosen[i]) {
          pick = i;
          break;
        }
      }
    }
    chosen[pick] = 1;
    std::copy_n(X.row(pick), d, cb.data.begin() + k * d);
    const double* c = cb.row(k);
    for (size_t i = 0; i < n; ++i) {
      const double dist = sq_dist_bounded(X.row(i), c, d, d2[i]);
      if (dist < d2[i]) d2[i] = dist;
    }
  }

  // Lloyd iterations until the assignment stops changing.
  std::vector<uint32_t> assign(n, 0), prev_assign;
  std::vector<double> assign_dist(n, 0.0);
  std::vector<size_t> counts(K, 0);
  int iter = 0;
  double inertia = 0.0;
  while (iter < max_iters) {
    ++iter;
    inertia = 0.0;
    for (size_t i = 0; i < n; ++i) {
      uint32_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      const double* xi = X.row(i);
      for (size_t k = 0; k < K; ++k) {
        const double dist = sq_dist_bounded(xi, cb.row(k), d, best_d);
        if (dist < best_d) {
          best_d = dist;
          best = static_cast<uint32_t>(k);
        }
      }
      assign[i] = best;
      assign_dist[i] = best_d;
      inertia += best_d;
    }

    // Reseed each empty cluster onto the point farthest from its centroid.
    std::fill(counts.begin(), counts.end(), 0);
    for (size_t i = 0; i < n; ++i) ++counts[assign[i]];
    for (size_t k = 0; k < K; ++k) {
      if (counts[k] != 0) continue;
      size_t far = n;
      double far_d = -1.0;
      for (size_t i = 0; i < n; ++i) {
        if (counts[assign[i]] <= 1) continue;  // don't strand another cluster
        if (assign_dist[i] > far_d) {
          far_d = assign_dist[i];
          far = i;
        }
      }
      --counts[assign[far]];
      assign[far] = static_cast<uint32_t>(k);
      assign_dist[far] = 0.0;
      counts[k] = 1;
    }

    if (observer) observer(iter, cb, assign);
    if (assign == prev_assign) break;
    prev_assign = assign;

    // Recompute means.
    std::fill(cb.data.begin(), cb.data.end(), 0.0);
    for (size_t i = 0; i < n; ++i) {
      double* c = cb.data.data() + static_cast<size_t>(assign[i]) * d;
      const double* xi = X.row(i);
      for (size_t j = 0; j < d; ++j) c[j] += xi[j];
    }
    for (size_t k = 0; k < K; ++k) {
      const double inv = 1.0 / static_cast<double>(counts[k]);
      double* c = cb.data.data() + k * d;
      for (size_t j = 0; j < d; ++j) c[j] *= inv;
    }
  }

  KmeansResult res;
  res.codebook = std::move(cb);
  res.iterations = iter;
  res.inertia = inertia;
  return res;
}

// ---------------------------------------------------------------------------
// KdForest
// ---------------------------------------------------------------------------

KdForest build_forest(const Codebook& cb, int n_trees, uint64_t seed, int max_checks,
                      int leaf_size) {
  if (cb.k < 2) throw ConfigError("build_forest: need K >= 2");
  if (n_trees < 1) throw ConfigError("build_forest: need at least one tree");
  if (max_checks < 1) throw ConfigError("build_forest: max_checks must be >= 1");
  if (leaf_size < 1) throw ConfigError("build_forest: leaf_size must be >= 1");

  KdForest f;
  f.n_trees_ = n_trees;
  f.max_checks_ = max_checks;
  f.leaf_size_ = leaf_size;
  f.seed_ = seed;
  f.indexed_ = cb.k;
  f.trees_.resize(n_trees);
  Rng rng(seed);
  const size_t d = cb.dim;

  for (int t = 0; t < n_trees; ++t) {
    KdForest::Tree& tree = f.trees_[t];
    std::vector<uint32_t> items(cb.k);
    for (size_t i = 0; i < cb.k; ++i) items[i] = static_cast<uint32_t>(i);

    std::vector<double> mean(d), var(d);
    auto build = [&](auto&& self, size_t begin, size_t end) -> int32_t {
      const int32_t idx = static_cast<int32_t>(tree.nodes.size());
      tree.nodes.emplace_back();
      const size_t m = end - begin;
      auto make_leaf = [&]() {
        KdForest::Node& nd = tree.nodes[idx];
        nd.dim = -1;
        nd.begin = static_cast<uint32_t>(tree.items.size());
        tree.items.insert(tree.items.end(), items.begin() + begin, items.begin() + end);
        nd.end = static_cast<uint32_t>(tree.items.size());
      };
      if (m <= static_cast<size_t>(leaf_size)) {
        make_leaf();
        return idx;
      }

      std::fill(mean.begin(), mean.end(), 0.0);
      std::fill(var.begin(), var.end(), 0.0);
      for (size_t i = begin; i < end; ++i) {
        const double* row = cb.row(items[i]);
        for (size_t j = 0; j < d; ++j) mean[j] += row[j];
      }
      for (size_t j = 0; j < d; ++j) mean[j] /= static_cast<double>(m);
      for (size_t i = begin; i < end; ++i) {
        const double* row = cb.row(items[i]);
        for (size_t j = 0; j < d; ++j) {
          const double diff = row[j] - mean[j];
          var[j] += diff * diff;
        }
      }

      // Candidate split dims: the five highest variances in stable order;
      // zero-variance dims can never separate the range.
      std::vector<int> dims;
      for (size_t j = 0; j < d; ++j)
        if (var[j] > 0.0) dims.push_back(static_cast<int>(j));
      if (dims.empty()) {
        make_leaf();
        return idx;
      }
      std::stable_sort(dims.begin(), dims.end(),
                       [&](int a, int b) { return var[a] > var[b]; });
      if (dims.size() > 5) dims.resize(5);

      const size_t first_pick = static_cast<size_t>(rng.below(dims.size()));
      std::vector<int> order;
      order.reserve(dims.size());
      order.push_back(dims[first_pick]);
      for (size_t j = 0; j < dims.size(); ++j)
        if (j != first_pick) order.push_back(dims[j]);

      // Try candidate dims until a value-consistent partition splits the
      // range: threshold = median value, v <= threshold goes left, exactly
      // mirroring the query descent rule.
      std::vector<double> vals(m);
      for (int dim : order) {
        for (size_t i = 0; i < m; ++i) vals[i] = cb.row(items[begin + i])[dim];
        std::vector<double> sorted(vals);
        std::sort(sorted.begin(), sorted.end());
        const double thr = sorted[m / 2];
        std::vector<uint32_t> left, right;
        left.reserve(m);
        right.reserve(m);
        for (size_t i = 0; i < m; ++i) {
          if (vals[i] <= thr)
            left.push_back(items[begin + i]);
          else
            right.push_back(items[begin + i]);
        }
        if (left.empty() || right.empty()) continue;
        std::copy(left.begin(), left.end(), items.begin() + begin);
        std::copy(right.begin(), right.end(), items.begin() + begin + left.size());
        const size_t mid = begin + left.size();
        const int32_t l = self(self, begin, mid);
        const int32_t r = self(self, mid, end);
        KdForest::Node& nd = tree.nodes[idx];  // re-fetch: vector may have grown
        nd.dim = dim;
        nd.thr = thr;
        nd.left = l;
        nd.right = r;
        return idx;
      }
      make_leaf();
      return idx;
    };
    build(build, 0, items.size());
  }
  return f;
}

namespace {

struct HeapEntry {
  double bound;    // accumulated squared boundary distance
  uint32_t order;  // push counter, breaks ties deterministically
  int tree;
  int32_t node;
};
struct HeapCmp {
  bool operator()(const HeapEntry& a, const HeapEntry& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.order > b.order;
  }
};

}  // namespace

template <typename Accept>
void KdForest::search(const Codebook& cb, const double* x, Scratch& scratch, int budget,
                      Accept&& accept) const {
  if (scratch.stamp.size() < cb.k) scratch.stamp.assign(cb.k, 0);
  if (++scratch.epoch == 0) {
    std::fill(scratch.stamp.begin(), scratch.stamp.end(), 0);
    scratch.epoch = 1;
  }
  const uint32_t epoch = scratch.epoch;

  std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapCmp> heap;
  uint32_t order = 0;
  int checks = 0;

  // Walk from a node down to its leaf, queueing every far child with the
  // accumulated squared boundary distance; returns false once the budget of
  // distance computations is spent.
  auto descend = [&](int t, int32_t node_idx, double bound) -> bool {
    const auto& nodes = trees_[t].nodes;
    int32_t cur = node_idx;
    while (nodes[cur].dim >= 0) {
      const Node& nd = nodes[cur];
      const double diff = x[nd.dim] - nd.thr;
      const bool go_left = diff <= 0.0;
      heap.push({bound + diff * diff, order++, t, go_left ? nd.right : nd.left});
      cur = go_left ? nd.left : nd.right;
    }
    const Node& leaf = nodes[cur];
    for (uint32_t i = leaf.begin; i < leaf.end; ++i) {
      const uint32_t item = trees_[t].items[i];
      if (scratch.stamp[item] == epoch) continue;
      if (checks >= budget) return false;
      scratch.stamp[item] = epoch;
      ++checks;
      accept(item);
    }
    return checks < budget;
  };

  for (size_t t = 0; t < trees_.size(); ++t)
    if (!descend(static_cast<int>(t), 0, 0.0)) return;
  while (!heap.empty()) {
    const HeapEntry e = heap.top();
    heap.pop();
    if (!descend(e.tree, e.node, e.bound)) return;
  }
}

uint32_t KdForest::query(const Codebook& cb, const double* x, Scratch& scratch,
                         int checks_override) const {
  if (trees_.empty()) throw ConfigError("KdForest::query: forest not built");
  const int budget = checks_override < 0 ? max_checks_ : std::max(checks_override, 1);
  double best_d = std::numeric_limits<double>::infinity();
  uint32_t best = 0;
  search(cb, x, scratch, budget, [&](uint32_t item) {
    const double dist = sq_dist(cb.row(item), x, cb.dim);
    if (dist < best_d || (dist == best_d && item < best)) {
      best_d = dist;
      best = item;
    }
  });
  return best;
}

void KdForest::query2(const Codebook& cb, const double* x, Scratch& scratch, double& d1,
                      uint32_t& i1, double& d2, uint32_t& i2,
                      int checks_override) const {
  if (trees_.empty()) throw ConfigError("KdForest::query2: forest not built");
  const int budget = checks_override < 0 ? max_checks_ : std::max(checks_override, 2);
  d1 = d2 = std::numeric_limits<double>::infinity();
  i1 = i2 = std::numeric_limits<uint32_t>::max();
  search(cb, x, scratch, budget, [&](uint32_t item) {
    const double dist = sq_dist(cb.row(item), x, cb.dim);
    if (dist < d1 || (dist == d1 && item < i1)) {
      d2 = d1;
      i2 = i1;
      d1 = dist;
      i1 = item;
    } else if (dist < d2 || (dist == d2 && item < i2)) {
      d2 = dist;
      i2 = item;
    }
  });
}

uint32_t quantize(const std::vector<double>& x, const Codebook& cb) {
  if (x.size() != cb.dim) throw ShapeError("quantize: dimension mismatch");
  uint32_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < cb.k; ++k) {
    const double dist = sq_dist_bounded(x.data(), cb.row(k), cb.dim, best_d);
    if (dist < best_d) {
      best_d = dist;
      best = static_cast<uint32_t>(k);
    }
  }
  return best;
}

uint32_t quantize(const std::vector<double>& x, const Codebook& cb,
                  const KdForest* forest, KdForest::Scratch* scratch) {
  if (!forest || !scratch) return quantize(x, cb);
  if (x.size() != cb.dim) throw ShapeError("quantize: dimension mismatch");
  return forest->query(cb, x.data(), *scratch);
}

BowHistogram bow_pool(const std::vector<uint32_t>& indices, size_t K) {
  BowHistogram h;
  h.freq.assign(K, 0.0);
  h.pooled = indices.size();
  for (uint32_t idx : indices) {
    if (idx >= K) throw OutOfBounds("bow_pool: codeword index out of range");
    h.freq[idx] += 1.0;
  }
  if (h.pooled > 0) {
    const double inv = 1.0 / static_cast<double>(h.pooled);
    for (double& v : h.freq) v *= inv;
  }
  return h;
}

std::vector<double> spm_pool(const std::vector<QuantizedEvent>& events, int width,
                             int height, size_t K) {
  if (width <= 0 || height <= 0) throw ConfigError("spm_pool: empty sensor");
  static constexpr int kLevels[3] = {1, 2, 3};
  static constexpr int kCellOffset[3] = {0, 1, 5};  // cells preceding each level
  std::vector<double> out(14 * K, 0.0);

  for (const QuantizedEvent& e : events) {
    if (e.x >= width || e.y >= height)
      throw OutOfBounds("spm_pool: event outside sensor");
    if (e.word >= K) throw OutOfBounds("spm_pool: codeword index out of range");
    for (int l = 0; l < 3; ++l) {
      const int g = kLevels[l];
      const int cx = static_cast<int>(e.x) * g / width;
      const int cy = static_cast<int>(e.y) * g / height;
      const size_t cell = static_cast<size_t>(kCellOffset[l] + cy * g + cx);
      out[cell * K + e.word] += 1.0;
    }
  }

  // Per-cell L1 normalization, then L1 over the concatenation.
  double grand = 0.0;
  for (size_t cell = 0; cell < 14; ++cell) {
    double s = 0.0;
    for (size_t j = 0; j < K; ++j) s += out[cell * K + j];
    if (s > 0.0) {
      for (size_t j = 0; j < K; ++j) out[cell * K + j] /= s;
      grand += 1.0;
    }
  }
  if (grand > 0.0)
    for (double& v : out) v /= grand;
  return out;
}

std::vector<double> kernel_map(const std::vector<double>& x, const KernelMapConfig& cfg) {
  if (cfg.m < 1) throw ConfigError("kernel_map: order m must be >= 1");
  if (!(cfg.L > 0.0)) throw ConfigError("kernel_map: period L must be positive");
  const size_t stride = 2 * static_cast<size_t>(cfg.m) + 1;
  std::vector<double> out(x.size() * stride, 0.0);
  for (size_t i = 0; i < x.size(); ++i) {
    const double c = x[i];
    if (c < 0.0) throw DomainError("kernel_map: negative component");
    if (c == 0.0) continue;  // zero component maps to a zero block
    double* block = out.data() + i * stride;
    block[0] = std::sqrt(c * cfg.L);  // kappa(0) = 1
    const double logc = std::log(c);
    for (int j = 1; j <= cfg.m; ++j) {
      const double lambda = j * cfg.L;
      const double kappa = 1.0 / std::cosh(kPi * lambda);
      const double amp = std::sqrt(2.0 * c * cfg.L * kappa);
      block[2 * j - 1] = amp * std::cos(lambda * logc);
      block[2 * j] = amp * std::sin(lambda * logc);
    }
  }
  return out;
}

std::vector<uint8_t> serialize_codebook(const Codebook& cb) {
  std::vector<uint8_t> out = {'D', 'R', 'T', 'C'};
  le_put_u32(out, static_cast<uint32_t>(cb.k));
  le_put_u32(out, static_cast<uint32_t>(cb.dim));
  for (double v : cb.data) le_put_f32(out, static_cast<float>(v));
  return out;
}

Codebook parse_codebook(const std::vector<uint8_t>& bytes) {
  ByteReader r(bytes, "codebook");
  r.expect_magic("DRTC");
  Codebook cb;
  cb.k = r.u32();
  cb.dim = r.u32();
  cb.data.resize(cb.k * cb.dim);
  for (double& v : cb.data) v = static_cast<double>(r.f32());
  r.done();
  return cb;
}

std::vector<uint8_t> serialize_forest_params(const KdForest& forest) {
  std::vector<uint8_t> out = {'D', 'R', 'T', 'F'};
  le_put_u32(out, static_cast<uint32_t>(forest.n_trees()));
  le_put_u32(out, static_cast<uint32_t>(forest.max_checks()));
  le_put_u32(out, static_cast<uint32_t>(forest.leaf_size()));
  le_put_u64(out, forest.seed());
  return out;
}

KdForest parse_and_rebuild_forest(const std::vector<uint8_t>& bytes, const Codebook& cb) {
  ByteReader r(bytes, "forest");
  r.expect_magic("DRTF");
  const int n_trees = static_cast<int>(r.u32());
  const int max_checks = static_cast<int>(r.u32());
  const int leaf_size = static_cast<int>(r.u32());
  const uint64_t seed = r.u64();
  r.done();
  return build_forest(cb, n_trees, seed, max_checks, leaf_size);
}

}  // namespace dart
