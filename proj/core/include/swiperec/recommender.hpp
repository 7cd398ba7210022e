#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "swiperec/matrix.hpp"
#include "swiperec/types.hpp"

namespace swiperec {

enum class NoRecommendationReason { ColdUser, NoQualifiedNeighbor, NoFreshProducts };

const char* to_string(NoRecommendationReason reason) noexcept;
std::optional<NoRecommendationReason> no_recommendation_reason_from_string(std::string_view s) noexcept;

/// What gets persisted alongside a served recommendation: the neighbor the
/// products came from, the similarity that justified the pick, and the queued
/// product ids.
struct RecommendationRecord {
  UserId target;
  UserId neighbor;
  double similarity = 0.0;
  std::vector<ProductId> queued;  // 1..n products, neighbor raid recency order
  TimestampMs created_at = 0;

  friend bool operator==(const RecommendationRecord&, const RecommendationRecord&) = default;
};

/// Either a recommendation or the reason there is none.
class RecommendationOutcome {
 public:
  static RecommendationOutcome success(RecommendationRecord record) {
    return RecommendationOutcome(std::move(record));
  }
  static RecommendationOutcome none(NoRecommendationReason reason) {
    return RecommendationOutcome(reason);
  }

  bool recommended() const { return std::holds_alternative<RecommendationRecord>(state_); }
  const RecommendationRecord& record() const { return std::get<RecommendationRecord>(state_); }
  NoRecommendationReason reason() const { return std::get<NoRecommendationReason>(state_); }

  friend bool operator==(const RecommendationOutcome&, const RecommendationOutcome&) = default;

 private:
  explicit RecommendationOutcome(RecommendationRecord record) : state_(std::move(record)) {}
  explicit RecommendationOutcome(NoRecommendationReason reason) : state_(reason) {}

  std::variant<RecommendationRecord, NoRecommendationReason> state_;
};

/// Picks the most similar neighbor and queues up to n of that neighbor's
/// raided products that the target has not swiped in either direction,
/// ordered by the neighbor's raid recency (latest first, product id ties
/// ascending). A neighbor with no fresh products is passed over for the next
/// one in rank order. created_at is stamped into the record; it does not
/// affect the choice. Throws Error(NotFound) for unknown targets.
RecommendationOutcome recommend(const InteractionMatrix& matrix, const UserId& target,
                                std::size_t n = 5, TimestampMs created_at = 0);

struct FeedItem {
  ProductId product_id;
  ImpressionSource source = ImpressionSource::Fallback;
  std::optional<double> similarity;  // present for recommender items

  friend bool operator==(const FeedItem&, const FeedItem&) = default;
};

/// Mixed feed of up to n products: recommender picks first, then fallback
/// products the target has not swiped, in pool order. Targets unknown to the
/// matrix get a pure fallback feed. Every emitted item is meant to be logged
/// as an ImpressionEvent with the item's source.
std::vector<FeedItem> feed(const InteractionMatrix& matrix, const UserId& target, std::size_t n,
                           std::span<const ProductId> fallback_pool);

}  // namespace swiperec
