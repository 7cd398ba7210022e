#include "swiperec/similarity.hpp"

#include <algorithm>

#include "swiperec/error.hpp"

namespace swiperec {

double cosine_similarity(const SparseBoolVector& a, const SparseBoolVector& b) {
  if (a.dimension != b.dimension) {
    throw Error(ErrorKind::Validation,
                "vector dimension mismatch: " + std::to_string(a.dimension) + " vs " +
                    std::to_string(b.dimension));
  }
  std::size_t intersection = 0;
  auto ia = a.indices.begin();
  auto ib = b.indices.begin();
  while (ia != a.indices.end() && ib != b.indices.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++intersection;
      ++ia;
      ++ib;
    }
  }
  return detail::boolean_cosine(intersection, a.indices.size(), b.indices.size());
}

std::vector<RankedNeighbor> nearest_neighbors(const InteractionMatrix& matrix,
                                              const NeighborQuery& query) {
  if (query.k == 0) {
    throw Error(ErrorKind::Validation, "neighbor query k must be >= 1");
  }
  const auto target = matrix.user_index(query.target);
  if (!target) {
    throw Error(ErrorKind::NotFound, "unknown user '" + query.target + "'");
  }

  const auto target_raids = matrix.raids_of(*target);
  if (target_raids.empty()) return {};  // cold user matches no one

  // Overlap counting via the inverted index: only users sharing at least one
  // raided product are ever touched.
  std::vector<std::uint32_t> overlap(matrix.user_count(), 0);
  std::vector<std::uint32_t> touched;
  for (const std::uint32_t product : target_raids) {
    for (const std::uint32_t user : matrix.raiders_of(product)) {
      if (user == *target) continue;
      if (overlap[user]++ == 0) touched.push_back(user);
    }
  }

  std::vector<RankedNeighbor> ranked;
  ranked.reserve(touched.size());
  for (const std::uint32_t user : touched) {
    const double score = detail::boolean_cosine(overlap[user], target_raids.size(),
                                                matrix.raids_of(user).size());
    if (score > query.min_similarity) {
      ranked.push_back(RankedNeighbor{matrix.users()[user], score, overlap[user]});
    }
  }

  std::sort(ranked.begin(), ranked.end(), [](const RankedNeighbor& a, const RankedNeighbor& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.overlap != b.overlap) return a.overlap > b.overlap;
    return a.user_id < b.user_id;
  });
  if (ranked.size() > query.k) ranked.resize(query.k);
  return ranked;
}

}  // namespace swiperec
