#include "dart/matching.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace dart {

namespace {

// Exact two-nearest scan over B; squared distances, lowest index on ties.
void two_nearest(const DataMatrix& bm, const double* x, double& d1, uint32_t& i1,
                 double& d2, uint32_t& i2) {
  d1 = d2 = std::numeric_limits<double>::infinity();
  i1 = i2 = std::numeric_limits<uint32_t>::max();
  for (size_t j = 0; j < bm.rows; ++j) {
    const double* row = bm.row(j);
    double s = 0.0;
    for (size_t k = 0; k < bm.dim; ++k) {
      const double diff = x[k] - row[k];
      s += diff * diff;
    }
    if (s < d1) {
      d2 = d1;
      i2 = i1;
      d1 = s;
      i1 = static_cast<uint32_t>(j);
    } else if (s < d2) {
      d2 = s;
      i2 = static_cast<uint32_t>(j);
    }
  }
}

}  // namespace

std::vector<MatchPair> match_sets(const FeatureSet& a, const FeatureSet& b, double ratio,
                                  const KdForest* forest, bool mutual) {
  if (b.descriptors.rows < 2)
    throw InsufficientCandidates("match_sets: need at least two candidates");
  if (!(ratio > 0.0) || ratio > 1.0)
    throw ConfigError("match_sets: ratio must be in (0, 1]");
  if (a.descriptors.rows > 0 && a.descriptors.dim != b.descriptors.dim)
    throw ShapeError("match_sets: descriptor dimension mismatch");

  Codebook bcb;
  KdForest::Scratch scratch;
  if (forest) bcb = features_as_codebook(b);

  std::vector<MatchPair> kept;
  for (size_t i = 0; i < a.descriptors.rows; ++i) {
    const double* x = a.descriptors.row(i);
    double d1, d2;
    uint32_t i1, i2;
    if (forest)
      forest->query2(bcb, x, scratch, d1, i1, d2, i2);
    else
      two_nearest(b.descriptors, x, d1, i1, d2, i2);
    if (d2 == 0.0) continue;  // duplicate candidates: ambiguous
    // d's are squared; d1/d2 < ratio on Euclidean distances.
    if (!(d1 < ratio * ratio * d2)) continue;
    if (mutual) {
      const double* partner = b.descriptors.row(i1);
      double r1, r2;
      uint32_t j1, j2;
      two_nearest(a.descriptors, partner, r1, j1, r2, j2);
      if (j1 != i) continue;
    }
    kept.push_back({static_cast<uint32_t>(i), i1, std::sqrt(d1), std::sqrt(d2)});
  }
  return kept;
}

Codebook features_as_codebook(const FeatureSet& fs) {
  Codebook cb;
  cb.k = fs.descriptors.rows;
  cb.dim = fs.descriptors.dim;
  cb.data = fs.descriptors.data;
  return cb;
}

std::string matches_to_csv(const FeatureSet& a, const FeatureSet& b,
                           const std::vector<MatchPair>& pairs) {
  std::string out = "xa,ya,ta,xb,yb,tb,ratio\n";
  char buf[160];
  for (const MatchPair& p : pairs) {
    const Event& ea = a.events[p.index_a];
    const Event& eb = b.events[p.index_b];
    std::snprintf(buf, sizeof(buf), "%u,%u,%llu,%u,%u,%llu,%.9g\n", ea.x, ea.y,
                  static_cast<unsigned long long>(ea.t), eb.x, eb.y,
                  static_cast<unsigned long long>(eb.t), p.ratio());
    out += buf;
  }
  return out;
}

}  // namespace dart
