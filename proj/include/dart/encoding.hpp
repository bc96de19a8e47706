#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "dart/errors.hpp"

namespace dart {

/// Dense row-major sample matrix used by training paths.
struct DataMatrix {
  size_t rows = 0;
  size_t dim = 0;
  std::vector<double> data;

  void reserve_rows(size_t n) { data.reserve(n * dim); }
  void push_row(const double* v) {
    data.insert(data.end(), v, v + dim);
    ++rows;
  }
  void push_row(const std::vector<double>& v) {
    if (dim == 0) dim = v.size();
    if (v.size() != dim) throw ShapeError("DataMatrix: inconsistent row dimension");
    push_row(v.data());
  }
  const double* row(size_t i) const { return data.data() + i * dim; }
};

/// K centroids of dimension dim, row-major.
struct Codebook {
  size_t k = 0;
  size_t dim = 0;
  std::vector<double> data;

  const double* row(size_t i) const { return data.data() + i * dim; }
};

struct KmeansResult {
  Codebook codebook;
  int iterations = 0;
  double inertia = 0.0;
};

/// Observer invoked after each Lloyd assignment step (testing hook).
using KmeansObserver =
    std::function<void(int iter, const Codebook&, const std::vector<uint32_t>& assign)>;

/// Lloyd's k-means from k-means++ seeding, run to assignment fixpoint or
/// max_iters. Empty clusters are reseeded to the farthest point. Deterministic
/// given seed. Throws ConfigError when |X| < K.
KmeansResult kmeans_train(const DataMatrix& X, size_t K, int max_iters, uint64_t seed,
                          const KmeansObserver& observer = nullptr);

/// Randomized kd-forest for approximate nearest-centroid queries.
/// Each node splits on a dimension drawn uniformly from the five
/// highest-variance dimensions of its points, threshold = median value.
/// Queries run best-bin-first across all trees through one shared priority
/// queue (keyed by accumulated boundary distance), bounded by max_checks
/// distance comparisons. Immutable after build.
class KdForest {
 public:
  /// Reusable per-caller query scratch so concurrent readers don't contend.
  struct Scratch {
    std::vector<uint32_t> stamp;
    uint32_t epoch = 0;
  };

  KdForest() = default;

  int n_trees() const { return n_trees_; }
  int max_checks() const { return max_checks_; }
  int leaf_size() const { return leaf_size_; }
  uint64_t seed() const { return seed_; }
  size_t indexed_count() const { return indexed_; }

  /// Nearest-centroid index; ties resolve to the lowest index. A negative
  /// checks_override uses the forest's configured max_checks.
  uint32_t query(const Codebook& cb, const double* x, Scratch& scratch,
                 int checks_override = -1) const;

  /// First and second nearest (for ratio-test matching): returns
  /// {(d1, i1), (d2, i2)} with d1 <= d2, squared Euclidean distances.
  void query2(const Codebook& cb, const double* x, Scratch& scratch, double& d1,
              uint32_t& i1, double& d2, uint32_t& i2, int checks_override = -1) const;

  friend KdForest build_forest(const Codebook& cb, int n_trees, uint64_t seed,
                               int max_checks, int leaf_size);

 private:
  struct Node {
    int dim = -1;        // -1 marks a leaf
    double thr = 0.0;
    int32_t left = -1;   // node indices within the tree
    int32_t right = -1;
    uint32_t begin = 0;  // leaf item range
    uint32_t end = 0;
  };
  struct Tree {
    std::vector<Node> nodes;
    std::vector<uint32_t> items;
  };

  int n_trees_ = 0;
  int max_checks_ = 15;
  int leaf_size_ = 1;
  uint64_t seed_ = 0;
  size_t indexed_ = 0;
  std::vector<Tree> trees_;

  // Shared best-bin-first core; calls accept(item) at most `budget` times.
  template <typename Accept>
  void search(const Codebook& cb, const double* x, Scratch& scratch, int budget,
              Accept&& accept) const;
};

/// Build a forest over the codebook. Defaults follow the tracking
/// configuration: 4 trees, max_checks 15. Requires K >= 2.
KdForest build_forest(const Codebook& cb, int n_trees, uint64_t seed,
                      int max_checks = 15, int leaf_size = 1);

/// Exact nearest centroid (lowest index on ties).
uint32_t quantize(const std::vector<double>& x, const Codebook& cb);

/// Approximate nearest centroid via the forest; exact scan when forest null.
uint32_t quantize(const std::vector<double>& x, const Codebook& cb,
                  const KdForest* forest, KdForest::Scratch* scratch);

/// Normalized codeword frequency histogram.
struct BowHistogram {
  std::vector<double> freq;  ///< length K; sums to 1 when pooled > 0
  size_t pooled = 0;         ///< number of quantized descriptors pooled
};

/// h^k = (1/S) * sum 1[index = k]; zero-length input yields the zero vector.
BowHistogram bow_pool(const std::vector<uint32_t>& indices, size_t K);

/// One quantized event for spatial pooling.
struct QuantizedEvent {
  uint16_t x = 0;
  uint16_t y = 0;
  uint32_t word = 0;
};

/// Spatial pyramid vector over 1x1 + 2x2 + 3x3 grids (14 cells, length 14K).
/// Cell index at level g is floor(x*g/width); each cell histogram is
/// L1-normalized independently, then the concatenation is L1-normalized.
std::vector<double> spm_pool(const std::vector<QuantizedEvent>& events, int width,
                             int height, size_t K);

/// Homogeneous chi-square kernel map configuration.
struct KernelMapConfig {
  int m = 1;        ///< approximation order; output dim = d*(2m+1)
  double L = 0.5;   ///< sampling period
};

/// Finite-dimensional expansion whose inner product approximates the additive
/// chi-square kernel k(x,y) = sum 2*x_i*y_i/(x_i+y_i). Per component c:
///   psi_0      = sqrt(c*L*kappa(0))
///   psi_{2j-1} = sqrt(2*c*L*kappa(j*L)) * cos(j*L*log c)
///   psi_{2j}   = sqrt(2*c*L*kappa(j*L)) * sin(j*L*log c)
/// with kappa(lambda) = sech(pi*lambda); zero components map to zero blocks.
/// Blocks are stacked per component. Negative input -> DomainError.
std::vector<double> kernel_map(const std::vector<double>& x, const KernelMapConfig& cfg);

// ---------------------------------------------------------------------------
// Codebook file: magic "DRTC", u32 K, u32 dim, K*dim little-endian float32.
// Forest parameters ride alongside ("DRTF", u32 n_trees, u32 max_checks,
// u32 leaf_size, u64 seed) and the forest is rebuilt deterministically.
// ---------------------------------------------------------------------------

std::vector<uint8_t> serialize_codebook(const Codebook& cb);
Codebook parse_codebook(const std::vector<uint8_t>& bytes);

std::vector<uint8_t> serialize_forest_params(const KdForest& forest);
KdForest parse_and_rebuild_forest(const std::vector<uint8_t>& bytes, const Codebook& cb);

}  // namespace dart
