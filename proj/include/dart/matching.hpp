#pragma once

#include <cstdint>
#include <vector>

#include "dart/encoding.hpp"
#include "dart/errors.hpp"
#include "dart/events.hpp"

namespace dart {

/// Descriptors from one time slice, with the events they were extracted at.
struct FeatureSet {
  std::vector<Event> events;
  DataMatrix descriptors;  ///< one row per event
};

/// d1 <= d2 are Euclidean distances to the first and second nearest neighbor.
struct MatchPair {
  uint32_t index_a = 0;
  uint32_t index_b = 0;
  double distance_first = 0.0;
  double distance_second = 0.0;

  double ratio() const { return distance_first / distance_second; }
};

inline constexpr double kDefaultMatchRatio = 0.6;

/// For each descriptor of A find its two nearest neighbors in B and keep the
/// pair iff d1/d2 < ratio (strict). A duplicate-point second neighbor
/// (d2 = 0) is ambiguous and rejected. Exact search by default; an optional
/// forest (built over B's rows) answers approximately. With mutual = true a
/// pair is kept only when A's row is also the exact nearest to its partner.
/// Throws InsufficientCandidates when |B| < 2.
std::vector<MatchPair> match_sets(const FeatureSet& a, const FeatureSet& b,
                                  double ratio = kDefaultMatchRatio,
                                  const KdForest* forest = nullptr,
                                  bool mutual = false);

/// Copy a feature set's rows into codebook layout for forest construction.
Codebook features_as_codebook(const FeatureSet& fs);

/// Match CSV: header + `xa, ya, ta, xb, yb, tb, ratio` per kept pair.
std::string matches_to_csv(const FeatureSet& a, const FeatureSet& b,
                           const std::vector<MatchPair>& pairs);

}  // namespace dart
