#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "swiperec/matrix.hpp"
#include "swiperec/types.hpp"

namespace swiperec {

/// Top-k neighbor request. min_similarity is an exclusive lower bound; the
/// default 0 already rules out users with nothing in common.
struct NeighborQuery {
  UserId target;
  std::size_t k = 1;
  double min_similarity = 0.0;
};

struct RankedNeighbor {
  UserId user_id;
  double score = 0.0;        // cosine similarity, in [0, 1]
  std::uint32_t overlap = 0; // co-raided product count

  friend bool operator==(const RankedNeighbor&, const RankedNeighbor&) = default;
};

namespace detail {

/// Cosine of two boolean vectors from their intersection and population
/// counts. Shared by cosine_similarity and the neighbor search so both
/// produce bit-identical scores.
inline double boolean_cosine(std::size_t intersection, std::size_t count_a, std::size_t count_b) {
  if (intersection == 0 || count_a == 0 || count_b == 0) return 0.0;
  return static_cast<double>(intersection) /
         std::sqrt(static_cast<double>(count_a) * static_cast<double>(count_b));
}

}  // namespace detail

/// Cosine similarity of two sparse boolean vectors: |A intersect B| /
/// sqrt(|A| * |B|). Returns 0 when either vector is all-zero. Throws
/// Error(Validation) on dimension mismatch.
double cosine_similarity(const SparseBoolVector& a, const SparseBoolVector& b);

/// All users other than the target with score strictly above
/// query.min_similarity, sorted by score descending, ties broken by larger
/// overlap then ascending user id, truncated to k. Candidates come from an
/// inverted product -> raiders index, so cost scales with co-rating users
/// rather than the whole user base. A target with no raids yields an empty
/// list; an unknown target throws Error(NotFound).
std::vector<RankedNeighbor> nearest_neighbors(const InteractionMatrix& matrix,
                                              const NeighborQuery& query);

}  // namespace swiperec
