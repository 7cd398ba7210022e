#include "swiperec/recommender.hpp"

#include <algorithm>

#include "swiperec/error.hpp"
#include "swiperec/similarity.hpp"

namespace swiperec {

const char* to_string(NoRecommendationReason reason) noexcept {
  switch (reason) {
    case NoRecommendationReason::ColdUser: return "ColdUser";
    case NoRecommendationReason::NoQualifiedNeighbor: return "NoQualifiedNeighbor";
    case NoRecommendationReason::NoFreshProducts: return "NoFreshProducts";
  }
  return "unknown";
}

std::optional<NoRecommendationReason> no_recommendation_reason_from_string(
    std::string_view s) noexcept {
  if (s == "ColdUser") return NoRecommendationReason::ColdUser;
  if (s == "NoQualifiedNeighbor") return NoRecommendationReason::NoQualifiedNeighbor;
  if (s == "NoFreshProducts") return NoRecommendationReason::NoFreshProducts;
  return std::nullopt;
}

namespace {

/// The neighbor's raided products not yet swiped by the target, latest raid
/// first, product id ties ascending, truncated to n.
std::vector<ProductId> fresh_products(const InteractionMatrix& matrix, std::uint32_t target,
                                      std::uint32_t neighbor, std::size_t n) {
  const auto raids = matrix.raids_of(neighbor);
  const auto times = matrix.raid_times_of(neighbor);

  struct Candidate {
    TimestampMs raided_at;
    const ProductId* id;
  };
  std::vector<Candidate> fresh;
  for (std::size_t i = 0; i < raids.size(); ++i) {
    if (!matrix.swiped(target, raids[i])) {
      fresh.push_back(Candidate{times[i], &matrix.products()[raids[i]]});
    }
  }
  std::sort(fresh.begin(), fresh.end(), [](const Candidate& a, const Candidate& b) {
    if (a.raided_at != b.raided_at) return a.raided_at > b.raided_at;
    return *a.id < *b.id;
  });
  if (fresh.size() > n) fresh.resize(n);

  std::vector<ProductId> out;
  out.reserve(fresh.size());
  for (const Candidate& c : fresh) out.push_back(*c.id);
  return out;
}

}  // namespace

RecommendationOutcome recommend(const InteractionMatrix& matrix, const UserId& target,
                                std::size_t n, TimestampMs created_at) {
  if (n == 0) {
    throw Error(ErrorKind::Validation, "recommendation size must be >= 1");
  }
  const auto target_idx = matrix.user_index(target);
  if (!target_idx) {
    throw Error(ErrorKind::NotFound, "unknown user '" + target + "'");
  }
  if (matrix.raids_of(*target_idx).empty()) {
    return RecommendationOutcome::none(NoRecommendationReason::ColdUser);
  }

  // Full ranked list so we can walk down when the best neighbor has nothing
  // fresh to offer.
  const auto neighbors =
      nearest_neighbors(matrix, NeighborQuery{target, matrix.user_count(), 0.0});
  if (neighbors.empty()) {
    return RecommendationOutcome::none(NoRecommendationReason::NoQualifiedNeighbor);
  }

  for (const RankedNeighbor& neighbor : neighbors) {
    const std::uint32_t neighbor_idx = *matrix.user_index(neighbor.user_id);
    auto queued = fresh_products(matrix, *target_idx, neighbor_idx, n);
    if (!queued.empty()) {
      return RecommendationOutcome::success(RecommendationRecord{
          target, neighbor.user_id, neighbor.score, std::move(queued), created_at});
    }
  }
  return RecommendationOutcome::none(NoRecommendationReason::NoFreshProducts);
}

std::vector<FeedItem> feed(const InteractionMatrix& matrix, const UserId& target, std::size_t n,
                           std::span<const ProductId> fallback_pool) {
  std::vector<FeedItem> items;
  if (n == 0) return items;

  const auto target_idx = matrix.user_index(target);
  if (target_idx) {
    const RecommendationOutcome outcome = recommend(matrix, target, n);
    if (outcome.recommended()) {
      const RecommendationRecord& rec = outcome.record();
      for (const ProductId& product : rec.queued) {
        items.push_back(FeedItem{product, ImpressionSource::Recommender, rec.similarity});
      }
    }
  }

  for (const ProductId& product : fallback_pool) {
    if (items.size() >= n) break;
    if (target_idx) {
      const auto p = matrix.product_index(product);
      if (p && matrix.swiped(*target_idx, *p)) continue;
    }
    const bool already_queued =
        std::any_of(items.begin(), items.end(),
                    [&](const FeedItem& item) { return item.product_id == product; });
    if (already_queued) continue;
    items.push_back(FeedItem{product, ImpressionSource::Fallback, std::nullopt});
  }
  return items;
}

}  // namespace swiperec
