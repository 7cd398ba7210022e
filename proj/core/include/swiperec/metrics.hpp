#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swiperec/types.hpp"

namespace swiperec {

class ProductClusterMap;

/// Counts behind the dataset formulas. total_users and total_products are the
/// registry/catalogue denominators supplied by the caller, not inferred from
/// the swipes (the matrix can be smaller than the catalogue).
struct DatasetStats {
  std::uint64_t total_users = 0;
  std::uint64_t total_products = 0;
  std::uint64_t total_swipes = 0;
  std::uint64_t products_swiped_min_twice = 0;
  std::uint64_t products_raided = 0;

  friend bool operator==(const DatasetStats&, const DatasetStats&) = default;
};

/// Tallies swipe-derived counts against caller-supplied denominators. When a
/// cluster map is given, products are canonicalized before per-product
/// counting; the swipe total itself is unaffected by remapping.
DatasetStats make_dataset_stats(std::span<const SwipeEvent> swipes, std::uint64_t total_users,
                                std::uint64_t total_products,
                                const ProductClusterMap* clusters = nullptr);

/// (1 - total_swipes / (total_products * total_users)) * 100.
/// Throws Error(Validation) when either denominator count is zero.
double sparsity(const DatasetStats& stats);

/// products_swiped_min_twice / total_products * 100.
double catalogue_coverage(const DatasetStats& stats);

/// products_raided / total_products * 100.
double coverage(const DatasetStats& stats);

/// n_relevant_selected / n_selected, or nullopt when nothing was selected.
/// Throws Error(Validation) when n_relevant_selected > n_selected.
std::optional<double> precision(std::uint64_t n_relevant_selected, std::uint64_t n_selected);

using PositivePredicate = std::function<bool(const ImpressionEvent&)>;

/// The default notion of a positive action: a Raid swipe or a referral click
/// on the impressed product by the same user at or after the impression.
class PositiveActionIndex {
 public:
  static PositiveActionIndex build(std::span<const SwipeEvent> swipes,
                                   std::span<const ReferralClickEvent> referral_clicks);

  bool positive(const ImpressionEvent& impression) const;

  PositivePredicate predicate() const {
    return [self = *this](const ImpressionEvent& e) { return self.positive(e); };
  }

 private:
  // (user_id \x1f product_id) -> latest positive-action timestamp
  std::map<std::string, TimestampMs> latest_action_;
};

struct SimilarityBucket {
  double lower = 0.0;
  double upper = 0.0;
  std::uint64_t impressions = 0;
  std::uint64_t positives = 0;
  std::optional<double> precision;  // absent when the bucket is empty

  friend bool operator==(const SimilarityBucket&, const SimilarityBucket&) = default;
};

/// Buckets recommender-sourced impressions by similarity score and reports
/// per-bucket precision. Buckets partition [0, 1]; the last bucket includes
/// 1.0. bucket_width must divide 1 evenly.
std::vector<SimilarityBucket> similarity_precision_buckets(
    std::span<const ImpressionEvent> impressions, const PositivePredicate& positives,
    double bucket_width = 0.05);

/// Shown -> recommended -> positive-action funnel counts with derived shares.
struct FunnelReport {
  std::uint64_t total_shown = 0;
  std::uint64_t recommended_shown = 0;
  std::uint64_t positive_actions_on_recommended = 0;

  std::optional<double> recommended_share_pct() const;  // recommended/shown * 100
  std::optional<double> precision() const;              // positives/recommended
  std::optional<double> precision_pct() const;

  /// Display rounding: share to one decimal ("17.9%"), precision to the
  /// nearest integer percent ("13%"). "-" when undefined.
  std::string recommended_share_display() const;
  std::string precision_display() const;

  static FunnelReport from_counts(std::uint64_t total_shown, std::uint64_t recommended_shown,
                                  std::uint64_t positive_actions_on_recommended);

  friend bool operator==(const FunnelReport&, const FunnelReport&) = default;
};

FunnelReport funnel(std::span<const ImpressionEvent> impressions,
                    const PositivePredicate& positives);

/// User-perspective measurements over a log window.
struct UserMetricsReport {
  std::uint64_t sessions = 0;
  std::optional<double> avg_session_minutes;
  std::optional<double> avg_swipes_per_new_user;  // swipes inside a user's first session
  std::uint64_t referral_clicks = 0;
  std::uint64_t returning_users = 0;  // users with >= 2 sessions
  std::map<std::string, std::uint64_t> monthly_swipes;  // "YYYY-MM" -> count
  std::uint64_t users_with_recommendation = 0;
  std::optional<double> avg_swipes_to_first_recommendation;

  friend bool operator==(const UserMetricsReport&, const UserMetricsReport&) = default;
};

/// Computes the user-perspective report. With a window, only events inside it
/// participate (sessions count by their start time).
UserMetricsReport user_metrics(const EventSet& events,
                               std::optional<TimeWindow> window = std::nullopt);

/// Events filtered to a window by event time (sessions by start time).
EventSet filter_events(const EventSet& events, const TimeWindow& window);

}  // namespace swiperec
